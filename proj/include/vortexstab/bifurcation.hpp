#pragma once

#include "vortexstab/types.hpp"

#include <functional>
#include <optional>

namespace vortexstab {

/// A parameterized family of square matrices r -> M_r on [0, r_max].
struct MatrixFamily {
    std::function<CMatX(double)> eval;
    double r_max = 1.0;
};

struct FitOptions {
    double lambda0_tol = 1e-6;    ///< eigenvalue cluster radius around lambda0 in M_0
    double distinct_tol = 1e-8;   ///< B0 eigenvalues closer than this (x scale) are "not distinct"
    double rank_tol = 1e-8;       ///< eigenvector rank test (defective eigenspace)
    double decay_factor = 0.5;    ///< smallest-r remainder must undercut the largest by this
    double decay_absolute = 0.1;  ///< ... and fall below this times max(1, |B0|) outright
};

/// Restricted expansion M_r|V0 = lambda0 Id + f(r) B0 + o(f(r)) fitted from
/// samples, with the acceptance test that operationalizes "o(f(r))".
struct ExpansionFit {
    Complex lambda0;
    CMatX v0_basis;   ///< orthonormal columns spanning the eigenspace E_lambda0(M_0)
    int gauge_power;  ///< f(r) = r^n
    CMatX b0;         ///< fitted restriction matrix on V0
    CVecX b0_eigenvalues;
    std::vector<double> r_grid;
    std::vector<double> remainder_ratios;  ///< ||M_r E - lambda0 E - f(r) E B0|| / |f(r)| per r
    bool accepted = false;
    std::string rejection_reason;  ///< empty when accepted
};

/// Fits B0 by least squares of (P M_r E - lambda0 Id)/f(r) over the grid,
/// where E embeds V0 (from the eigen-decomposition of M_0 unless an explicit
/// basis is supplied) and P projects along the orthogonal complement.
/// A defective lambda0 (geometric < algebraic multiplicity) is rejected.
ExpansionFit fit_expansion(const MatrixFamily& family, Complex lambda0, int gauge_power,
                           const std::vector<double>& r_grid, const FitOptions& opts = {},
                           const std::optional<CMatX>& v0_basis = std::nullopt);

/// One predicted eigenvalue branch lambda0 + f(r) mu0 matched against the true
/// spectrum per grid point.
struct EigBranch {
    Complex mu0;
    std::vector<Complex> predicted;  ///< lambda0 + f(r) mu0
    std::vector<Complex> matched;    ///< nearest true eigenvalue of M_r
    std::vector<double> deviation;   ///< |matched - predicted| / |f(r)|
    std::vector<bool> ambiguous;     ///< two true eigenvalues essentially equidistant
};
std::vector<EigBranch> predict_and_match(const ExpansionFit& fit, const MatrixFamily& family,
                                         const std::vector<double>& r_grid);

// --- counterexample families ------------------------------------------------

/// 2x2 family with M_r e1 = (1+r^2) e1 + o(r^2) but spectrum {e^{±ir^2}}.
CMatX almost_eigenvector_counterexample(double r);
MatrixFamily almost_eigenvector_family();
/// Same family conjugated by diag(1, r): shares the spectrum and is
/// approximately simple at gauge r^2 with B0 eigenvalues ±i.
MatrixFamily almost_eigenvector_family_balanced();

/// Rotation family R(1/r) diag(1+r, 1/(1+r)) R(1/r)^{-1}: eigenvalue branches
/// continue but eigenvector directions have no limit; never approximately
/// simple.
MatrixFamily rotation_counterexample_family();

/// Runs both counterexamples plus the trivial family and asserts the
/// documented behaviors.
struct CounterexampleReport {
    struct Item {
        std::string name;
        bool passed = false;
        std::string detail;
    };
    std::vector<Item> items;
    bool all_passed = false;
};
CounterexampleReport counterexample_suite();

}  // namespace vortexstab
