#include "vortexstab/floquet.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vortexstab {

std::vector<std::vector<int>> cluster_eigenvalues(const CVecX& ev, double tol) {
    const int n = static_cast<int>(ev.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(ev[i] - ev[j]) < tol) parent[find(i)] = find(j);

    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& g : groups)
        if (!g.empty()) out.push_back(std::move(g));
    // deterministic order: by smallest member index
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

namespace {

int cluster_containing(const CVecX& ev, const std::vector<std::vector<int>>& clusters,
                       Complex target, double tol) {
    int best = -1;
    double best_d = tol;
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (int idx : clusters[c]) {
            double d = std::abs(ev[idx] - target);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
    return best;
}

}  // namespace

FloquetSpectrum spectrum_from_eigenvalues(const MatX& x, const CVecX& ev,
                                          const SpectrumOptions& opts) {
    FloquetSpectrum out;
    out.monodromy = x;
    out.eigenvalues = ev;
    out.clusters = cluster_eigenvalues(ev, opts.cluster_tol);
    out.determinant = x.determinant();

    out.pairing_defect = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) == 0.0) continue;
        Complex inv = 1.0 / ev[i];
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < ev.size(); ++j)
            best = std::min(best, std::abs(ev[j] - inv));
        out.pairing_defect = std::max(out.pairing_defect, best);
    }

    int unit = cluster_containing(ev, out.clusters, Complex(1.0, 0.0), opts.cluster_tol);
    out.unit_multiplier_multiplicity =
        unit >= 0 ? static_cast<int>(out.clusters[unit].size()) : 0;

    // estimated geometric multiplicity: rank-revealing factorization of X - I
    Eigen::JacobiSVD<MatX> svd(x - MatX::Identity(x.rows(), x.cols()));
    double thresh = opts.geometric_rank_tol * std::max(1.0, svd.singularValues()[0]);
    out.estimated_geometric_multiplicity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] < thresh) ++out.estimated_geometric_multiplicity;

    bool on_circle = true;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(std::abs(ev[i]) - 1.0) > opts.circle_tol) on_circle = false;
    out.labels.spectrally_stable = on_circle;
    out.labels.spectrally_unstable = !on_circle;
    out.labels.algebraic_nondegenerate = out.unit_multiplier_multiplicity == 4;

    // L-stable: stable, unit cluster exactly {1,1}, other multipliers simple,
    // and no multiplier at -1.  Labels come from clusters, not raw eigenvalues.
    bool minus_one =
        cluster_containing(ev, out.clusters, Complex(-1.0, 0.0), opts.cluster_tol) >= 0;
    bool others_simple = true;
    for (std::size_t c = 0; c < out.clusters.size(); ++c)
        if (static_cast<int>(c) != unit && out.clusters[c].size() != 1) others_simple = false;
    out.labels.l_stable = on_circle && out.unit_multiplier_multiplicity == 2 && others_simple &&
                          !minus_one;
    return out;
}

FloquetSpectrum spectrum(const MatX& x, const SpectrumOptions& opts) {
    if (x.rows() != x.cols() || !x.allFinite())
        throw ConfigError("spectrum: need a finite square matrix");
    Eigen::EigenSolver<MatX> es(x);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigensolver", "spectrum: QR iteration did not converge");
    return spectrum_from_eigenvalues(x, es.eigenvalues(), opts);
}

int unit_multiplier_multiplicity(const MatX& x, double tol) {
    Eigen::EigenSolver<MatX> es(x);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigensolver", "unit multiplicity: QR iteration did not converge");
    CVecX ev = es.eigenvalues();
    auto clusters = cluster_eigenvalues(ev, tol);
    int c = cluster_containing(ev, clusters, Complex(1.0, 0.0), tol);
    return c >= 0 ? static_cast<int>(clusters[c].size()) : 0;
}

MatX monodromy(const ScaledHamiltonian& sh, const VecX& u0, double periodicity_tol,
               const IntegratorOptions& opts) {
    const double two_pi = 2.0 * 3.14159265358979323846;
    VecX u_end = flow_state(sh, u0, two_pi, opts);
    double defect = (u_end - u0).norm();
    if (defect > periodicity_tol)
        throw NotPeriodicError("monodromy: initial condition is not 2pi-periodic (defect " +
                               std::to_string(defect) + ")");
    return variational_flow(sh, u0, two_pi, opts).fundamental;
}

MatX equilibrium_monodromy(const RelativeEquilibrium& eq, const IntegratorOptions& opts) {
    RelativeEquilibrium n = eq.normalized();
    ScaledHamiltonian sh(std::make_shared<WholePlane>(), n.vorticities, 0.0);
    return monodromy(sh, n.z0, 1e-8, opts);
}

int equilibrium_unit_multiplicity(const RelativeEquilibrium& eq, double tol) {
    ExactMonodromy em = equilibrium_monodromy_exact(eq);
    auto clusters = cluster_eigenvalues(em.eigenvalues, tol);
    int c = cluster_containing(em.eigenvalues, clusters, Complex(1.0, 0.0), tol);
    return c >= 0 ? static_cast<int>(clusters[c].size()) : 0;
}

FloquetSpectrum equilibrium_spectrum(const RelativeEquilibrium& eq, const SpectrumOptions& opts) {
    ExactMonodromy em = equilibrium_monodromy_exact(eq);
    return spectrum_from_eigenvalues(em.monodromy, em.eigenvalues, opts);
}

MonodromyExpansionReport check_monodromy_expansion(
    const Mat2& hess_h0, double gamma_total,
    const std::vector<std::pair<double, MatX>>& samples) {
    if (samples.empty())
        throw ConfigError("monodromy expansion check: no samples");
    const double two_pi = 2.0 * 3.14159265358979323846;
    const int dim = static_cast<int>(samples.front().second.rows());
    const int n = dim / 2;

    MonodromyExpansionReport rep;
    for (const auto& s : samples) rep.r_grid.push_back(s.first);

    auto run = [&](const Vec2& a) {
        MonodromyExpansionReport::Direction d;
        d.axis = a;
        d.limit = -two_pi * gamma_total * diagonal_lift(sympl_j2() * (hess_h0 * a), n);
        VecX ahat = diagonal_lift(a, n);
        for (const auto& [r, x] : samples) {
            VecX delta = (x * ahat - ahat) / (r * r);
            d.deviation.push_back((delta - d.limit).norm());
        }
        // order estimate from the extreme grid points (deviation ~ C r^p)
        double p = 0.0;
        if (samples.size() >= 2 && d.deviation.front() > 0.0 && d.deviation.back() > 0.0)
            p = std::log(d.deviation.back() / d.deviation.front()) /
                std::log(rep.r_grid.back() / rep.r_grid.front());
        d.order_estimate = p;
        return d;
    };
    rep.e1 = run(Vec2(1.0, 0.0));
    rep.e2 = run(Vec2(0.0, 1.0));
    rep.limit_scale = rep.e1.limit.norm();
    return rep;
}

}  // namespace vortexstab
