#pragma once

#include "vortexstab/domain.hpp"
#include "vortexstab/vorticity.hpp"

#include <memory>

namespace vortexstab {

/// Fraction of the configuration diameter below which a pairwise separation
/// counts as a collision (evaluations throw instead of returning NaN).
inline constexpr double kCollisionFraction = 1e-8;

namespace detail {

template <class Scalar>
Scalar pi_value() {
    return static_cast<Scalar>(3.141592653589793238462643383279502884L);
}

template <class Scalar, class VecT>
void check_separation(const VecT& z, int n) {
    if (n < 2) return;
    Scalar min_d2 = Scalar(-1), max_d2 = Scalar(0);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            Scalar dx = z[2 * j] - z[2 * k];
            Scalar dy = z[2 * j + 1] - z[2 * k + 1];
            Scalar d2 = dx * dx + dy * dy;
            if (min_d2 < Scalar(0) || d2 < min_d2) min_d2 = d2;
            if (d2 > max_d2) max_d2 = d2;
        }
    // relative to the configuration diameter, with an absolute floor (a pure
    // pair is scale-free, so only the floor applies to it)
    if (min_d2 <= max_d2 * Scalar(kCollisionFraction) * Scalar(kCollisionFraction) ||
        min_d2 < Scalar(1e-280))
        throw CollisionError("configuration at or below the pairwise-distance guard");
}

/// H_0(z) = -(1/2pi) sum_{j != k} G_j G_k log|z_j - z_k|
template <class Scalar, class VecT, class GammaT>
Scalar whole_plane_energy_t(const VecT& z, const GammaT& gamma) {
    using std::log;
    const int n = static_cast<int>(gamma.size());
    check_separation<Scalar>(z, n);
    Scalar e = Scalar(0);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            Scalar dx = z[2 * j] - z[2 * k];
            Scalar dy = z[2 * j + 1] - z[2 * k + 1];
            e -= gamma[j] * gamma[k] * log(dx * dx + dy * dy) / (Scalar(2) * pi_value<Scalar>());
        }
    return e;
}

template <class Scalar, class VecT, class GammaT, class OutT>
void whole_plane_gradient_t(const VecT& z, const GammaT& gamma, OutT& grad) {
    const int n = static_cast<int>(gamma.size());
    check_separation<Scalar>(z, n);
    for (int i = 0; i < 2 * n; ++i) grad[i] = Scalar(0);
    const Scalar pi = pi_value<Scalar>();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            Scalar dx = z[2 * j] - z[2 * k];
            Scalar dy = z[2 * j + 1] - z[2 * k + 1];
            Scalar d2 = dx * dx + dy * dy;
            Scalar c = gamma[j] * gamma[k] / (pi * d2);
            grad[2 * j] -= c * dx;
            grad[2 * j + 1] -= c * dy;
        }
}

template <class Scalar, class VecT, class GammaT, class MatT>
void whole_plane_hessian_t(const VecT& z, const GammaT& gamma, MatT& hess) {
    const int n = static_cast<int>(gamma.size());
    check_separation<Scalar>(z, n);
    hess.setZero();
    const Scalar pi = pi_value<Scalar>();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            Scalar dx = z[2 * j] - z[2 * k];
            Scalar dy = z[2 * j + 1] - z[2 * k + 1];
            Scalar d2 = dx * dx + dy * dy;
            Scalar c = gamma[j] * gamma[k] / pi;
            // block = I/d2 - 2 w w^T / d2^2
            Scalar bxx = Scalar(1) / d2 - Scalar(2) * dx * dx / (d2 * d2);
            Scalar bxy = -Scalar(2) * dx * dy / (d2 * d2);
            Scalar byy = Scalar(1) / d2 - Scalar(2) * dy * dy / (d2 * d2);
            hess(2 * j, 2 * j) -= c * bxx;
            hess(2 * j, 2 * j + 1) -= c * bxy;
            hess(2 * j + 1, 2 * j) -= c * bxy;
            hess(2 * j + 1, 2 * j + 1) -= c * byy;
            hess(2 * j, 2 * k) += c * bxx;
            hess(2 * j, 2 * k + 1) += c * bxy;
            hess(2 * j + 1, 2 * k) += c * bxy;
            hess(2 * j + 1, 2 * k + 1) += c * byy;
        }
}

}  // namespace detail

double whole_plane_energy(const VecX& z, const Vorticities& vort);
VecX whole_plane_gradient(const VecX& z, const Vorticities& vort);
MatX whole_plane_hessian(const VecX& z, const Vorticities& vort);

/// Interaction energy F(z) = sum_{j,k} G_j G_k g(z_j, z_k) (diagonal included).
double interaction_energy(const DomainModel& domain, const VecX& z, const Vorticities& vort);
VecX interaction_gradient(const DomainModel& domain, const VecX& z, const Vorticities& vort);
MatX interaction_hessian(const DomainModel& domain, const VecX& z, const Vorticities& vort);

/// Scaled Hamiltonian H_r(u) = H_0(u) - F(ru) + F(0) on F_N(Omega/r);
/// at r = 0 it coincides with the whole-plane Hamiltonian.
class ScaledHamiltonian {
public:
    ScaledHamiltonian(std::shared_ptr<const DomainModel> domain, Vorticities vort, double r);

    double r() const { return r_; }
    const Vorticities& vorticities() const { return vort_; }
    const DomainModel& domain() const { return *domain_; }
    std::shared_ptr<const DomainModel> domain_ptr() const { return domain_; }
    int n_vortices() const { return vort_.count(); }
    int dim() const { return 2 * vort_.count(); }

    /// Throws DomainError if any r*u_j leaves the domain.
    void check_admissible(const VecX& u) const;

    double value(const VecX& u) const;
    VecX gradient(const VecX& u) const;
    MatX hessian(const VecX& u) const;

    /// Right-hand side of M_Gamma du/dt = J_N grad H_r(u).
    VecX vector_field(const VecX& u) const;
    /// A_r(u) = M^{-1} J_N hess H_r(u), the variational coefficient matrix.
    MatX variational_matrix(const VecX& u) const;

    ScaledHamiltonian with_r(double r) const { return {domain_, vort_, r}; }

private:
    std::shared_ptr<const DomainModel> domain_;
    Vorticities vort_;
    double r_;
    double f0_;  // F(0)
};

}  // namespace vortexstab
