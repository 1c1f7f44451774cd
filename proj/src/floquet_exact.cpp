// Extended-precision lane for r = 0 monodromies.
//
// A whole-plane relative equilibrium has the corotating-frame factorization
//   X_0(t) = exp(-nu J_N t) exp(t C),  C = nu J_N + M^{-1} J_N hess H_0(z0),
// because hess H_0 is equivariant under simultaneous rotation.  Evaluating it
// in 50-digit arithmetic keeps a defective unit multiplier within ~1e-12 of 1
// under the QR eigensolve, where double precision smears a 4-block across
// ~1e-3 (Jordan splitting grows like perturbation^(1/4)).

#include "vortexstab/floquet.hpp"
#include "vortexstab/hamiltonian.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Eigenvalues>

namespace vortexstab {

namespace {

template <class Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// scaling-and-squaring Taylor exponential; plenty for these 4x4..8x8 matrices
template <class Scalar>
MatT<Scalar> expm(MatT<Scalar> a, double term_floor) {
    int squarings = 0;
    Scalar norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > Scalar(0.25)) {
        a /= Scalar(2);
        norm /= Scalar(2);
        ++squarings;
    }
    const auto n = a.rows();
    MatT<Scalar> sum = MatT<Scalar>::Identity(n, n);
    MatT<Scalar> term = MatT<Scalar>::Identity(n, n);
    for (int j = 1; j < 200; ++j) {
        term = (term * a) / Scalar(j);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < Scalar(term_floor)) break;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

template <class Scalar>
struct CorotatingParts {
    MatT<Scalar> rotation_generator;  // -nu J_N
    MatT<Scalar> corotating;          // C
};

template <class Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Re-solves the rigid-rotation identity grad H_0(z) + nu M z = 0 in the
// target precision with nu pinned at +-1 (Gauss-Newton with the centre of
// vorticity and a rotation pin as gauge rows).  A double-precision z0 carries
// ~1e-16 coordinate error, which alone splits a defective unit multiplier by
// ~(1e-16)^(1/4) ~ 1e-4; the polish removes that source entirely.
template <class Scalar>
VecT<Scalar> polish_equilibrium(VecT<Scalar> z, const std::vector<Scalar>& gamma, Scalar nu) {
    const int n = static_cast<int>(gamma.size());
    const int d = 2 * n;

    VecT<Scalar> jz_pin(d);  // rotation gauge: <J z_seed, z> = 0
    for (int j = 0; j < n; ++j) {
        jz_pin[2 * j] = z[2 * j + 1];
        jz_pin[2 * j + 1] = -z[2 * j];
    }

    VecT<Scalar> grad(d);
    MatT<Scalar> hess(d, d);
    for (int iter = 0; iter < 60; ++iter) {
        detail::whole_plane_gradient_t<Scalar>(z, gamma, grad);
        VecT<Scalar> residual(d + 3);
        for (int i = 0; i < d; ++i) residual[i] = grad[i] + nu * gamma[i / 2] * z[i];
        Scalar cx = Scalar(0), cy = Scalar(0);
        for (int j = 0; j < n; ++j) {
            cx += gamma[j] * z[2 * j];
            cy += gamma[j] * z[2 * j + 1];
        }
        residual[d] = cx;
        residual[d + 1] = cy;
        residual[d + 2] = jz_pin.dot(z);
        if (residual.cwiseAbs().maxCoeff() < Scalar(1e-44)) break;

        detail::whole_plane_hessian_t<Scalar>(z, gamma, hess);
        MatT<Scalar> jac = MatT<Scalar>::Zero(d + 3, d);
        jac.topRows(d) = hess;
        for (int i = 0; i < d; ++i) jac(i, i) += nu * gamma[i / 2];
        for (int j = 0; j < n; ++j) {
            jac(d, 2 * j) = gamma[j];
            jac(d + 1, 2 * j + 1) = gamma[j];
        }
        jac.row(d + 2) = jz_pin.transpose();
        VecT<Scalar> step = jac.colPivHouseholderQr().solve(-residual);
        z += step;
    }
    detail::whole_plane_gradient_t<Scalar>(z, gamma, grad);
    for (int i = 0; i < d; ++i) grad[i] += nu * gamma[i / 2] * z[i];
    if (grad.cwiseAbs().maxCoeff() > Scalar(1e-40))
        throw NonConvergenceError(
            "extended-precision polish: input is not a relative equilibrium");
    return z;
}

template <class Scalar>
CorotatingParts<Scalar> corotating_parts(const RelativeEquilibrium& eq, bool polish) {
    const int n = eq.n_vortices();
    const int d = 2 * n;

    // normalize to |nu| = 1 inside the target precision so the period is
    // exactly 2 pi there
    VecT<Scalar> z(d);
    for (int i = 0; i < d; ++i) z[i] = Scalar(eq.z0[i]);
    std::vector<Scalar> gamma(n);
    for (int j = 0; j < n; ++j) gamma[j] = Scalar(eq.vorticities.gamma(j));
    using std::abs;
    using std::sqrt;
    Scalar nu = Scalar(eq.nu);
    Scalar s = sqrt(abs(nu));
    z *= s;
    nu = nu / (s * s);  // exactly +-1
    if (polish) z = polish_equilibrium<Scalar>(z, gamma, nu);

    MatT<Scalar> hess = MatT<Scalar>::Zero(d, d);
    detail::whole_plane_hessian_t<Scalar>(z, gamma, hess);

    MatT<Scalar> jn = MatT<Scalar>::Zero(d, d);
    for (int j = 0; j < n; ++j) {
        jn(2 * j, 2 * j + 1) = Scalar(1);
        jn(2 * j + 1, 2 * j) = Scalar(-1);
    }
    MatT<Scalar> minv_j_h(d, d);
    for (int j = 0; j < n; ++j) {
        minv_j_h.row(2 * j) = hess.row(2 * j + 1) / gamma[j];
        minv_j_h.row(2 * j + 1) = -hess.row(2 * j) / gamma[j];
    }
    return {-nu * jn, nu * jn + minv_j_h};
}

}  // namespace

MatX equilibrium_monodromy_corotating(const RelativeEquilibrium& eq) {
    auto parts = corotating_parts<double>(eq, /*polish=*/false);
    const double two_pi = 2.0 * 3.14159265358979323846;
    MatT<double> x = expm<double>(two_pi * parts.rotation_generator, 1e-20) *
                     expm<double>(two_pi * parts.corotating, 1e-20);
    return x;
}

ExactMonodromy equilibrium_monodromy_exact(const RelativeEquilibrium& eq) {
    using Scalar = boost::multiprecision::cpp_bin_float_50;
    auto parts = corotating_parts<Scalar>(eq, /*polish=*/true);
    const Scalar two_pi =
        Scalar(2) * Scalar("3.14159265358979323846264338327950288419716939937510582097494");
    MatT<Scalar> x = expm<Scalar>(two_pi * parts.rotation_generator, 1e-60) *
                     expm<Scalar>(two_pi * parts.corotating, 1e-60);

    Eigen::EigenSolver<MatT<Scalar>> es(x);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigensolver", "extended-precision QR did not converge");

    ExactMonodromy out;
    out.monodromy = MatX(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.monodromy(i, j) = static_cast<double>(x(i, j));
    out.eigenvalues = CVecX(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        out.eigenvalues[i] = Complex(static_cast<double>(es.eigenvalues()[i].real()),
                                     static_cast<double>(es.eigenvalues()[i].imag()));
    return out;
}

}  // namespace vortexstab
