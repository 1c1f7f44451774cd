#include "vortexstab/bifurcation.hpp"

#include "vortexstab/config.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace vortexstab {

namespace {

double gauge(double r, int n) { return std::pow(r, n); }

CMatX orthonormalize(const CMatX& cols, double rank_tol, int expected_rank) {
    Eigen::JacobiSVD<CMatX> svd(cols, Eigen::ComputeThinU);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > rank_tol * svd.singularValues()[0]) ++rank;
    if (rank < expected_rank) return CMatX();  // deficient
    return svd.matrixU().leftCols(expected_rank);
}

}  // namespace

ExpansionFit fit_expansion(const MatrixFamily& family, Complex lambda0, int gauge_power,
                           const std::vector<double>& r_grid, const FitOptions& opts,
                           const std::optional<CMatX>& v0_basis) {
    if (!family.eval)
        throw ConfigError("fit_expansion: family has no evaluator");
    if (gauge_power < 1)
        throw ConfigError("fit_expansion: gauge exponent must be >= 1");
    if (r_grid.size() < 2)
        throw ConfigError("fit_expansion: need at least two grid points");
    for (double r : r_grid)
        if (r <= 0.0 || r > family.r_max)
            throw ConfigError("fit_expansion: grid point outside (0, r_max]");

    ExpansionFit fit;
    fit.lambda0 = lambda0;
    fit.gauge_power = gauge_power;
    fit.r_grid = r_grid;
    std::sort(fit.r_grid.begin(), fit.r_grid.end());

    const CMatX m0 = family.eval(0.0);
    const int dim = static_cast<int>(m0.rows());

    // V0 and the algebraic multiplicity from the spectrum of M_0
    Eigen::ComplexEigenSolver<CMatX> es(m0);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigensolver", "fit_expansion: eigensolve of M_0 failed");
    std::vector<int> cluster;
    for (int i = 0; i < dim; ++i)
        if (std::abs(es.eigenvalues()[i] - lambda0) < opts.lambda0_tol) cluster.push_back(i);
    if (cluster.empty()) {
        fit.rejection_reason = "lambda0 is not in the spectrum of M_0";
        return fit;
    }
    const int nu = static_cast<int>(cluster.size());

    if (v0_basis) {
        if (v0_basis->rows() != dim || v0_basis->cols() != nu)
            throw ConfigError("fit_expansion: supplied V0 basis must span the lambda0 cluster (" +
                              std::to_string(nu) + " columns)");
        fit.v0_basis = orthonormalize(*v0_basis, opts.rank_tol, nu);
        if (fit.v0_basis.size() == 0)
            throw ConfigError("fit_expansion: supplied V0 basis is rank deficient");
    } else {
        CMatX vecs(dim, nu);
        for (int c = 0; c < nu; ++c) vecs.col(c) = es.eigenvectors().col(cluster[c]);
        fit.v0_basis = orthonormalize(vecs, opts.rank_tol, nu);
        if (fit.v0_basis.size() == 0) {
            fit.rejection_reason =
                "not approximately simple - eigenspace deficient (geometric < algebraic "
                "multiplicity)";
            return fit;
        }
    }
    const CMatX& e = fit.v0_basis;  // dim x nu, orthonormal: P = E^*

    // Least squares of (P M_r E - lambda0 Id)/f(r) over the small-r half of
    // the grid.  Fitting near the limit keeps the large-r remainder visible;
    // a whole-grid mean would center the residuals and mask genuine decay.
    const std::size_t fit_count = std::max<std::size_t>(2, (fit.r_grid.size() + 1) / 2);
    CMatX b0 = CMatX::Zero(nu, nu);
    for (std::size_t i = 0; i < fit_count; ++i) {
        double r = fit.r_grid[i];
        b0 += (e.adjoint() * family.eval(r) * e - lambda0 * CMatX::Identity(nu, nu)) /
              gauge(r, gauge_power);
    }
    b0 /= static_cast<double>(fit_count);
    fit.b0 = b0;

    Eigen::ComplexEigenSolver<CMatX> esb(b0);
    fit.b0_eigenvalues = esb.eigenvalues();

    // full-space remainder catches out-of-V0 leakage
    for (double r : fit.r_grid) {
        double f = gauge(r, gauge_power);
        CMatX rem = family.eval(r) * e - lambda0 * e - f * (e * b0);
        Eigen::JacobiSVD<CMatX> svd(rem);
        fit.remainder_ratios.push_back(svd.singularValues()[0] / std::abs(f));
    }

    // acceptance: remainder decays toward r -> 0, B0 eigenvalues pairwise
    // distinct, dim V0 equal to the cluster size (holds by construction)
    const double scale = std::max(1.0, fit.b0.cwiseAbs().maxCoeff());
    bool distinct = true;
    for (int i = 0; i < nu; ++i)
        for (int j = i + 1; j < nu; ++j)
            if (std::abs(fit.b0_eigenvalues[i] - fit.b0_eigenvalues[j]) <
                opts.distinct_tol * scale)
                distinct = false;

    const double at_smallest = fit.remainder_ratios.front();
    const double largest = *std::max_element(fit.remainder_ratios.begin(),
                                             fit.remainder_ratios.end());
    const bool exact = largest < 1e-12 * scale;
    const bool decays = exact || (at_smallest < opts.decay_factor * largest &&
                                  at_smallest < opts.decay_absolute * scale);

    if (!distinct)
        fit.rejection_reason = "B0 eigenvalues are not pairwise distinct";
    else if (!decays)
        fit.rejection_reason = "remainder ratios do not decay toward r -> 0";
    else
        fit.accepted = true;
    return fit;
}

std::vector<EigBranch> predict_and_match(const ExpansionFit& fit, const MatrixFamily& family,
                                         const std::vector<double>& r_grid) {
    if (!fit.accepted)
        throw ConfigError("predict_and_match: the expansion fit was rejected");
    std::vector<EigBranch> branches;
    for (Eigen::Index b = 0; b < fit.b0_eigenvalues.size(); ++b) {
        EigBranch br;
        br.mu0 = fit.b0_eigenvalues[b];
        branches.push_back(br);
    }
    for (double r : r_grid) {
        double f = gauge(r, fit.gauge_power);
        CMatX mr = family.eval(r);
        Eigen::ComplexEigenSolver<CMatX> es(mr);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigensolver", "predict_and_match: eigensolve failed");
        const CVecX ev = es.eigenvalues();
        for (EigBranch& br : branches) {
            Complex predicted = fit.lambda0 + f * br.mu0;
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity(), second_d = best_d;
            for (Eigen::Index i = 0; i < ev.size(); ++i) {
                double d = std::abs(ev[i] - predicted);
                if (d < best_d) {
                    second_d = best_d;
                    best_d = d;
                    best = static_cast<int>(i);
                } else {
                    second_d = std::min(second_d, d);
                }
            }
            br.predicted.push_back(predicted);
            br.matched.push_back(ev[best]);
            br.deviation.push_back(best_d / std::abs(f));
            br.ambiguous.push_back(std::isfinite(second_d) &&
                                   second_d - best_d < 1e-9 * std::max(1.0, std::abs(predicted)));
        }
    }
    return branches;
}

// ---------------------------------------------------------------------------
// counterexample families
// ---------------------------------------------------------------------------

CMatX almost_eigenvector_counterexample(double r) {
    CMatX m(2, 2);
    if (r == 0.0) {
        m.setIdentity();
        return m;
    }
    double r2 = r * r;
    m << std::cos(r2) + std::sin(r2), -2.0 * r, std::sin(r2) * std::sin(r2) / r,
        std::cos(r2) - std::sin(r2);
    return m;
}

MatrixFamily almost_eigenvector_family() {
    return {[](double r) { return almost_eigenvector_counterexample(r); }, 1.0};
}

MatrixFamily almost_eigenvector_family_balanced() {
    return {[](double r) -> CMatX {
                if (r == 0.0) {
                    // limit of T_r^{-1} M_r T_r as r -> 0 is the identity
                    return CMatX::Identity(2, 2);
                }
                CMatX t = CMatX::Zero(2, 2), tinv = CMatX::Zero(2, 2);
                t(0, 0) = 1.0;
                t(1, 1) = r;
                tinv(0, 0) = 1.0;
                tinv(1, 1) = 1.0 / r;
                return tinv * almost_eigenvector_counterexample(r) * t;
            },
            1.0};
}

MatrixFamily rotation_counterexample_family() {
    return {[](double r) -> CMatX {
                if (r == 0.0) return CMatX::Identity(2, 2);
                double th = 1.0 / r;
                Eigen::Matrix2d rot;
                rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
                Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
                d(0, 0) = 1.0 + r;
                d(1, 1) = 1.0 / (1.0 + r);
                return (rot * d * rot.inverse()).cast<Complex>();
            },
            0.5};
}

CounterexampleReport counterexample_suite() {
    CounterexampleReport rep;
    std::vector<double> grid = {0.02, 0.05, 0.1, 0.2, 0.3};
    auto add = [&rep](const std::string& name, bool ok, const std::string& detail) {
        rep.items.push_back({name, ok, detail});
    };

    // (a) the almost-eigenvector defect vanishes at order r^2 ...
    {
        bool defect_decays = true;
        double last = std::numeric_limits<double>::infinity();
        for (double r : {0.3, 0.2, 0.1, 0.05, 0.02}) {
            CMatX m = almost_eigenvector_counterexample(r);
            CVecX e1 = CVecX::Zero(2);
            e1[0] = 1.0;
            double defect = (m * e1 - (1.0 + r * r) * e1).norm() / (r * r);
            if (defect > last) defect_decays = false;
            last = defect;
        }
        add("almost-eigenvector defect is o(r^2)", defect_decays && last < 0.03,
            "defect/r^2 at r=0.02: " + format_double(last));
    }

    // ... yet no true eigenvalue lies within o(r^2) of 1 + r^2
    {
        double floor_gap = std::numeric_limits<double>::infinity();
        for (double r : grid) {
            CMatX m = almost_eigenvector_counterexample(r);
            Eigen::ComplexEigenSolver<CMatX> es(m);
            double gap = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 2; ++i)
                gap = std::min(gap, std::abs(es.eigenvalues()[i] - Complex(1.0 + r * r)));
            floor_gap = std::min(floor_gap, gap / (r * r));
        }
        add("no eigenvalue within o(r^2) of 1 + r^2", floor_gap > 1.0,
            "min gap/r^2 over the grid: " + format_double(floor_gap) +
                " (sqrt(2) expected in the limit)");
    }

    // raw family at gauge r^2: rejected (the -2r column breaks the expansion)
    {
        ExpansionFit fit = fit_expansion(almost_eigenvector_family(), Complex(1.0), 2, grid);
        add("raw family rejected at gauge r^2", !fit.accepted, fit.rejection_reason);
    }

    // balanced family: accepted with B0 eigenvalues ±i, branches match e^{±ir^2}
    {
        MatrixFamily fam = almost_eigenvector_family_balanced();
        ExpansionFit fit = fit_expansion(fam, Complex(1.0), 2, grid);
        bool eig_ok = false;
        if (fit.accepted && fit.b0_eigenvalues.size() == 2) {
            Complex a = fit.b0_eigenvalues[0], b = fit.b0_eigenvalues[1];
            if (std::imag(a) < std::imag(b)) std::swap(a, b);
            eig_ok = std::abs(a - Complex(0, 1)) < 0.05 && std::abs(b - Complex(0, -1)) < 0.05;
        }
        bool branches_ok = false;
        if (fit.accepted) {
            auto branches = predict_and_match(fit, fam, grid);
            branches_ok = !branches.empty();
            for (const EigBranch& br : branches)
                branches_ok = branches_ok && br.deviation.front() < 0.2 &&
                              br.deviation.front() < br.deviation.back();
        }
        add("balanced family accepted with B0 eigenvalues +-i and matching branches",
            fit.accepted && eig_ok && branches_ok,
            fit.accepted ? "B0 spectrum ok, branch deviations decay" : fit.rejection_reason);
    }

    // rotation family: eigenvalue branches are continuable, fit rejected
    {
        MatrixFamily fam = rotation_counterexample_family();
        std::vector<double> rgrid = {0.01, 0.02, 0.04, 0.08};
        bool branches_exact = true;
        for (double r : rgrid) {
            Eigen::ComplexEigenSolver<CMatX> es(fam.eval(r));
            double d = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 2; ++i) d = std::min(d, std::abs(es.eigenvalues()[i] - (1.0 + r)));
            if (d > 1e-10) branches_exact = false;
        }
        bool rejected = true;
        for (int n : {1, 2}) {
            ExpansionFit fit = fit_expansion(fam, Complex(1.0), n, rgrid);
            rejected = rejected && !fit.accepted;
        }
        add("rotation family: branches continuable, expansion fit rejected",
            branches_exact && rejected, "eigenvalues exactly {1+r, 1/(1+r)}; no fixed B0 works");
    }

    // trivial family M_r = Id: rejected (B0 = 0 has no distinct eigenvalues)
    {
        MatrixFamily fam{[](double) { return CMatX::Identity(2, 2).eval(); }, 1.0};
        ExpansionFit fit = fit_expansion(fam, Complex(1.0), 2, grid);
        add("trivial family rejected", !fit.accepted, fit.rejection_reason);
    }

    rep.all_passed = std::all_of(rep.items.begin(), rep.items.end(),
                                 [](const auto& i) { return i.passed; });
    return rep;
}

}  // namespace vortexstab
