#pragma once

#include "vortexstab/dynamics.hpp"
#include "vortexstab/equilibria.hpp"

namespace vortexstab {

struct SpectrumOptions {
    double cluster_tol = 1e-5;       ///< transitive-closure clustering radius
    double circle_tol = 1e-6;        ///< |lambda| within this of 1 counts as on S^1
    double geometric_rank_tol = 1e-6;  ///< SVD threshold for the estimated kernel of X - I
};

struct StabilityLabels {
    bool spectrally_stable = false;
    bool spectrally_unstable = false;
    bool l_stable = false;
    bool algebraic_nondegenerate = false;  ///< unit cluster of size exactly 4 (r = 0 equilibria)
};

/// Eigen-data of a monodromy matrix with multiplicity clustering.
struct FloquetSpectrum {
    MatX monodromy;
    CVecX eigenvalues;
    std::vector<std::vector<int>> clusters;  ///< index groups, transitive closure at cluster_tol
    int unit_multiplier_multiplicity = 0;    ///< size of the cluster containing 1
    int estimated_geometric_multiplicity = 0;  ///< rank-revealing estimate of dim ker(X - I)
    StabilityLabels labels;
    double determinant = 0.0;
    double pairing_defect = 0.0;  ///< max over lambda of min distance of 1/lambda to the spectrum
};

/// Clusters by transitive closure of pairwise distance < tol.
std::vector<std::vector<int>> cluster_eigenvalues(const CVecX& eigenvalues, double tol);

/// Dense eigensolve + clustering + labels.
FloquetSpectrum spectrum(const MatX& x, const SpectrumOptions& opts = {});
FloquetSpectrum spectrum_from_eigenvalues(const MatX& x, const CVecX& eigenvalues,
                                          const SpectrumOptions& opts);

/// Size of the eigenvalue cluster containing 1 at the given tolerance.
int unit_multiplier_multiplicity(const MatX& x, double tol);

/// X_r(2pi) along a (numerically) 2pi-periodic initial condition; the
/// periodicity defect must be below `periodicity_tol` or NotPeriodicError is
/// thrown.
MatX monodromy(const ScaledHamiltonian& sh, const VecX& u0_periodic,
               double periodicity_tol = 1e-8, const IntegratorOptions& opts = {});

/// Monodromy of a whole-plane relative equilibrium over one period, computed
/// by integrating the variational equation along the |nu| = 1 normalization.
MatX equilibrium_monodromy(const RelativeEquilibrium& eq, const IntegratorOptions& opts = {});

/// Same monodromy through the corotating-frame closed form
/// X(2pi) = exp(-2pi nu J_N) exp(2pi (nu J_N + M^{-1} J_N hess H_0(z0))),
/// evaluated in 50-digit arithmetic together with its spectrum.  This is the
/// robust lane for degeneracy detection: a defective unit multiplier splits
/// under double-precision QR by more than the 1e-4 detection tolerance.
struct ExactMonodromy {
    MatX monodromy;      ///< closed form, rounded to double
    CVecX eigenvalues;   ///< eigenvalues of the extended-precision matrix
};
ExactMonodromy equilibrium_monodromy_exact(const RelativeEquilibrium& eq);

/// Closed form in plain double arithmetic (test oracle for the integrator).
MatX equilibrium_monodromy_corotating(const RelativeEquilibrium& eq);

/// Degeneracy detector: unit-multiplier multiplicity of a whole-plane
/// equilibrium from the extended-precision spectrum, clustered at `tol`
/// (default the 1e-4 detection tolerance).
int equilibrium_unit_multiplicity(const RelativeEquilibrium& eq, double tol = 1e-4);

/// Full spectrum of an r = 0 equilibrium through the extended-precision lane
/// (cluster structure is exact; the integrated route splits defective unit
/// multipliers across the default cluster tolerance).
FloquetSpectrum equilibrium_spectrum(const RelativeEquilibrium& eq,
                                     const SpectrumOptions& opts = {});

/// Verifies X_r(2pi) a^ = a^ - 2pi Gamma r^2 (J hess_h0 a)^ + o(r^2) along a
/// continued family, for a in {e1, e2}.
struct MonodromyExpansionReport {
    struct Direction {
        Vec2 axis;
        VecX limit;                     ///< -2pi Gamma (J hess_h0 a)^
        std::vector<double> deviation;  ///< ||(X_r a^ - a^)/r^2 - limit|| per grid r
        double order_estimate = 0.0;    ///< log-log slope of deviation vs r
    };
    std::vector<double> r_grid;
    Direction e1, e2;
    double limit_scale = 0.0;  ///< ||limit|| (equal for e1, e2 up to rotation)
};
MonodromyExpansionReport check_monodromy_expansion(
    const Mat2& hess_h0, double gamma_total,
    const std::vector<std::pair<double, MatX>>& samples);

}  // namespace vortexstab
