#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexstab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using CVecX = Eigen::VectorXcd;
using CMatX = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// 2x2 rotation by -pi/2: J(x,y) = (y,-x).
inline Mat2 sympl_j2() {
    Mat2 j;
    j << 0.0, 1.0, -1.0, 0.0;
    return j;
}

/// Block-diagonal J_N acting on 2N coordinates.
inline MatX sympl_jn(int n_vortices) {
    MatX j = MatX::Zero(2 * n_vortices, 2 * n_vortices);
    for (int k = 0; k < n_vortices; ++k)
        j.block<2, 2>(2 * k, 2 * k) = sympl_j2();
    return j;
}

/// In-place application of J_N (cheaper than the matrix product on hot paths).
inline VecX apply_jn(const VecX& v) {
    VecX out(v.size());
    for (Eigen::Index k = 0; k + 1 < v.size(); k += 2) {
        out[k] = v[k + 1];
        out[k + 1] = -v[k];
    }
    return out;
}

/// Diagonal of M_Gamma = diag(G_1, G_1, ..., G_N, G_N).
inline VecX mgamma_diag(const std::vector<double>& gamma) {
    VecX d(2 * static_cast<Eigen::Index>(gamma.size()));
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        d[2 * j] = gamma[j];
        d[2 * j + 1] = gamma[j];
    }
    return d;
}

/// Diagonal lift (a, a, ..., a) of a planar vector; spans the translation subspace D.
inline VecX diagonal_lift(const Vec2& a, int n_vortices) {
    VecX v(2 * n_vortices);
    for (int k = 0; k < n_vortices; ++k)
        v.segment<2>(2 * k) = a;
    return v;
}

// ---------------------------------------------------------------------------
// Error hierarchy.  ConfigError maps to CLI exit code 2, NumericalError to 3;
// code() is the machine-readable error class used in diagnostic JSON.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what) : Error("invalid-config", what) {}
    ConfigError(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class CollisionError : public NumericalError {
public:
    explicit CollisionError(const std::string& what) : NumericalError("collision", what) {}
};

class DomainError : public NumericalError {
public:
    explicit DomainError(const std::string& what) : NumericalError("domain-exit", what) {}
};

class InversionError : public NumericalError {
public:
    explicit InversionError(const std::string& what) : NumericalError("inversion", what) {}
};

class NonConvergenceError : public NumericalError {
public:
    explicit NonConvergenceError(const std::string& what) : NumericalError("non-convergence", what) {}
};

class SectionMissError : public NumericalError {
public:
    explicit SectionMissError(const std::string& what) : NumericalError("section-miss", what) {}
};

class NotPeriodicError : public NumericalError {
public:
    explicit NotPeriodicError(const std::string& what) : NumericalError("not-periodic", what) {}
};

class StepSizeError : public NumericalError {
public:
    explicit StepSizeError(const std::string& what) : NumericalError("step-underflow", what) {}
};

}  // namespace vortexstab
