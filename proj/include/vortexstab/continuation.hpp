#pragma once

#include "vortexstab/floquet.hpp"

#include <optional>

namespace vortexstab {

/// Poincare-section coordinate machinery anchored at a 2pi-periodic relative
/// equilibrium z0 (|nu| = 1):
///   Sigma        = { z : omega_Gamma(z0, z) = 0 }
///   T_{z0}Sigma_0 = { u in Sigma : <grad H_0(z0), u> = 0 }
///   psi_r(u)     = u + s(r,u) z0            (chart onto Sigma_r)
///   psi_r^{-1}(w) = w + (pi/L) <grad H_0(z0), w> z0
class SectionChart {
public:
    static SectionChart build(const RelativeEquilibrium& normalized_eq);

    const VecX& anchor() const { return z0_; }
    const VecX& grad_h0() const { return grad_h0_; }
    /// Orthonormal columns spanning T_{z0}Sigma_0 (dimension 2N-2).
    const MatX& tangent_basis() const { return basis_; }
    double momentum() const { return momentum_; }
    int dim() const { return static_cast<int>(z0_.size()); }

    /// omega_Gamma(z0, u).
    double section_value(const VecX& u) const { return normal_.dot(u); }
    const VecX& section_normal() const { return normal_; }

    VecX chart_inverse(const VecX& w) const;

    /// Max violation of the two defining functionals on the diagonal lifts
    /// e1^, e2^ (the invariant D subset T_{z0}Sigma_0).
    double translation_containment_defect() const;

private:
    VecX z0_, grad_h0_, normal_;
    MatX basis_;
    double momentum_ = 0.0;
};

/// One continued periodic orbit u^{(r)} of the scaled system.
struct FamilyPoint {
    double r = 0.0;
    VecX u0;              ///< on Sigma, ||phi_r(2pi, u0) - u0|| = residual
    double energy = 0.0;  ///< H_r(u0)
    double residual = 0.0;
    MatX monodromy;       ///< X_r(2pi)
    double symplectic_defect = 0.0;
    FloquetSpectrum spec;
};

struct ContinuationOptions {
    IntegratorOptions integrator;
    double newton_tol = 1e-10;
    int max_newton_iterations = 25;
    double periodicity_tol = 1e-9;
    /// Family-point labels use 1e-4 tolerances: the defective unit pair of a
    /// periodic orbit splits under QR by ~sqrt(monodromy error) ~ 2e-5, and
    /// the split can leave the unit circle.  The bifurcating pair sits at
    /// distance >= 4 r_min^2 ~ 1e-2 from 1, far outside the cluster radius.
    SpectrumOptions spectrum{.cluster_tol = 1e-4, .circle_tol = 1e-4};
    int jobs = 1;  ///< >1 parallelizes the per-point analysis after the serial warm-up
};

struct FamilyResult {
    RelativeEquilibrium seed;  ///< normalized (|nu| = 1) seeding equilibrium
    std::vector<FamilyPoint> points;
    /// set when Newton broke the predictor chain; points holds the partial family
    std::optional<std::string> diagnostic;
};

/// Continues the 2pi-periodic family u^{(r)} from a relative equilibrium near
/// a nondegenerate Robin critical point at the origin.  Preconditions:
/// Gamma != 0, L != 0, grad h(0) ~ 0, det hess h(0) != 0 (bypassed for the
/// whole plane, where the family is constant), and the seed algebraically
/// nondegenerate (unit multiplicity exactly 4 at r = 0).
FamilyResult continue_family(std::shared_ptr<const DomainModel> domain,
                             const RelativeEquilibrium& eq, const std::vector<double>& r_grid,
                             const ContinuationOptions& opts = {});

/// First hitting time of Sigma near one period: the root of
/// t -> omega_Gamma(z0, phi_r(t,u)) in (2pi - 1, 2pi + 1).
double hitting_time(const ScaledHamiltonian& sh, const SectionChart& chart, const VecX& u,
                    const IntegratorOptions& opts = {});

/// Linearization of the Poincare return map in the fixed chart,
/// M_r = D psi_r^{-1}(u_r) o DP_r(u_r) o D psi_r(psi_r^{-1}(u_r)),
/// expressed in the tangent basis (dimension 2N-2).  `leak` reports the
/// out-of-subspace residual of the columns (should be ~machine precision).
MatX reduced_monodromy(const SectionChart& chart, const ScaledHamiltonian& sh_r,
                       const FamilyPoint& point, double* leak = nullptr);

/// Bifurcating multiplier pair along a family, with its asymptotic fits.
struct MultiplierCurve {
    std::vector<double> r;
    std::vector<Complex> lambda_plus, lambda_minus;
    std::vector<std::string> flags;   ///< per-r pair-identification flags ("" when clean)
    Complex predicted_coefficient;    ///< 2 pi Gamma sqrt(-det hess h(0))
    Complex fitted_coefficient;       ///< least squares of (lambda_+ - 1) against C r^2
    double fitted_exponent = 0.0;     ///< free power-law fit of |lambda_+ - 1| vs r
    double max_pairing_defect = 0.0;  ///< max |lambda_+ lambda_- - 1|
};
MultiplierCurve multiplier_curve(std::shared_ptr<const DomainModel> domain,
                                 const FamilyResult& family,
                                 const ContinuationOptions& opts = {});

/// Trace of the full monodromy along a two-vortex extremum family, fitted
/// against 4 - c^2 r^4.
struct TraceCurve {
    std::vector<double> r;
    std::vector<double> trace;
    double predicted_c = 0.0;           ///< 2 pi Gamma sqrt(det hess h(0))
    double fitted_coefficient = 0.0;    ///< least squares of (4 - tr) against C r^4
    double fitted_exponent = 0.0;       ///< free power-law fit of (4 - tr) vs r
};
TraceCurve trace_curve(const DomainModel& domain, const FamilyResult& family);

/// (r, X_r(2pi)) samples for the monodromy-expansion check.
std::vector<std::pair<double, MatX>> expansion_samples(const FamilyResult& family);

/// Robin Hessian at the origin of a domain.
Mat2 robin_hessian_at_origin(const DomainModel& domain);

}  // namespace vortexstab
