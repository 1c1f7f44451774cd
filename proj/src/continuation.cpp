#include "vortexstab/continuation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vortexstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

// ---------------------------------------------------------------------------
// SectionChart
// ---------------------------------------------------------------------------

SectionChart SectionChart::build(const RelativeEquilibrium& eq) {
    if (std::abs(std::abs(eq.nu) - 1.0) > 1e-12)
        throw ConfigError("section chart: equilibrium must be normalized to |nu| = 1");
    SectionChart chart;
    chart.z0_ = eq.z0;
    chart.momentum_ = eq.vorticities.momentum();
    if (std::abs(chart.momentum_) < 1e-10)
        throw ConfigError("section chart: |L| too small, the section is degenerate");
    chart.grad_h0_ = whole_plane_gradient(eq.z0, eq.vorticities);
    // omega_Gamma(z0, u) = <M z0, J_N u> = (-J_N M z0) . u
    chart.normal_ = -apply_jn(eq.vorticities.mgamma().cwiseProduct(eq.z0));

    // orthonormal basis of the null space of the two functionals
    const int d = chart.dim();
    MatX constraints(2, d);
    constraints.row(0) = chart.normal_.transpose();
    constraints.row(1) = chart.grad_h0_.transpose();
    Eigen::JacobiSVD<MatX> svd(constraints, Eigen::ComputeFullV);
    chart.basis_ = svd.matrixV().rightCols(d - 2);
    return chart;
}

VecX SectionChart::chart_inverse(const VecX& w) const {
    return w + (kPi / momentum_) * grad_h0_.dot(w) * z0_;
}

double SectionChart::translation_containment_defect() const {
    const int n = dim() / 2;
    double defect = 0.0;
    for (const Vec2& a : {Vec2(1.0, 0.0), Vec2(0.0, 1.0)}) {
        VecX ahat = diagonal_lift(a, n);
        defect = std::max(defect, std::abs(normal_.dot(ahat)));
        defect = std::max(defect, std::abs(grad_h0_.dot(ahat)));
    }
    return defect;
}

// ---------------------------------------------------------------------------
// continue_family
// ---------------------------------------------------------------------------

namespace {

struct GaussNewtonOutcome {
    VecX u;
    double residual;
    int iterations;
};

// Fixed point of phi_r(2pi, .) by Gauss-Newton on the (2N+1) x 2N system
// [phi - u; <u - u_pred, udot_pred>] with the predictor phase anchor.
GaussNewtonOutcome solve_periodic_orbit(const ScaledHamiltonian& sh, const VecX& u_pred,
                                        const ContinuationOptions& opts) {
    const int d = sh.dim();
    VecX udot_pred = sh.vector_field(u_pred);
    VecX u = u_pred;

    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= opts.max_newton_iterations; ++it) {
        VariationalResult vr = variational_flow(sh, u, kTwoPi, opts.integrator);
        VecX orbit_defect = vr.state - u;
        residual = orbit_defect.norm();
        if (residual < opts.newton_tol) return {u, residual, it};

        VecX rhs(d + 1);
        rhs.head(d) = -orbit_defect;
        rhs[d] = -(u - u_pred).dot(udot_pred);
        MatX jac(d + 1, d);
        jac.topRows(d) = vr.fundamental - MatX::Identity(d, d);
        jac.row(d) = udot_pred.transpose();

        VecX step = jac.colPivHouseholderQr().solve(rhs);
        // damp if the orbit defect refuses to shrink
        double scale = 1.0;
        for (int half = 0; half < 6; ++half) {
            VecX trial = u + scale * step;
            double trial_defect;
            try {
                trial_defect = (flow_state(sh, trial, kTwoPi, opts.integrator) - trial).norm();
            } catch (const NumericalError&) {
                scale *= 0.5;
                continue;
            }
            if (trial_defect < residual || half == 5) {
                u = trial;
                break;
            }
            scale *= 0.5;
        }
    }
    throw NonConvergenceError("periodic-orbit Newton did not reach " +
                              format_double(opts.newton_tol) + " (residual " +
                              format_double(residual) + ")");
}

// Time-shift the orbit onto Sigma, taking the root nearest t = 0 whose
// crossing slope matches the one at z0 (sign of L/pi).
VecX shift_to_section(const ScaledHamiltonian& sh, const SectionChart& chart, const VecX& u,
                      const ContinuationOptions& opts) {
    if (std::abs(chart.section_value(u)) < 1e-13) return u;
    const int slope_sign = chart.momentum() > 0 ? 1 : -1;
    double t = locate_event(
        sh, u, -1.5, 1.5, [&](const VecX& y) { return chart.section_value(y); }, slope_sign,
        /*nearest_zero=*/true, opts.integrator);
    return flow_state(sh, u, t, opts.integrator);
}

void check_preconditions(const DomainModel& domain, const RelativeEquilibrium& eq) {
    if (std::abs(eq.vorticities.total()) < 1e-12)
        throw ConfigError("continuation: Gamma = 0 is algebraically degenerate");
    if (std::abs(eq.vorticities.momentum()) < 1e-12)
        throw ConfigError("continuation: L = 0 is algebraically degenerate");

    RobinEval re = domain.robin(Vec2::Zero(), 2);
    if (re.grad.norm() > 1e-10)
        throw ConfigError("continuation: the origin is not a critical point of h "
                          "(|grad h(0)| = " + format_double(re.grad.norm()) + ")");
    const double hess_scale = re.hess.cwiseAbs().maxCoeff();
    if (hess_scale > 0.0 && std::abs(re.hess.determinant()) < 1e-12 * hess_scale * hess_scale)
        throw ConfigError("continuation: degenerate Robin critical point (det hess h(0) ~ 0)");
    // hess == 0 exactly: the whole-plane null case, where the family is constant

    int mult = equilibrium_unit_multiplicity(eq, 1e-4);
    if (mult != 4)
        throw ConfigError("continuation: seed is not algebraically nondegenerate "
                          "(unit multiplier multiplicity " + std::to_string(mult) + ")");
}

}  // namespace

FamilyResult continue_family(std::shared_ptr<const DomainModel> domain,
                             const RelativeEquilibrium& eq, const std::vector<double>& r_grid,
                             const ContinuationOptions& opts) {
    if (!domain)
        throw ConfigError("continuation: null domain");
    if (r_grid.empty())
        throw ConfigError("continuation: empty r grid");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (r_grid[i] <= 0.0)
            throw ConfigError("continuation: grid values must be positive");
        if (i > 0 && r_grid[i] <= r_grid[i - 1])
            throw ConfigError("continuation: grid must increase");
    }

    FamilyResult result{eq.normalized(), {}, std::nullopt};
    check_preconditions(*domain, result.seed);
    SectionChart chart = SectionChart::build(result.seed);

    // serial warm-up: predictor chain of Gauss-Newton solves
    std::vector<VecX> orbits;
    VecX u_pred = result.seed.z0;
    for (double r : r_grid) {
        ScaledHamiltonian sh(domain, result.seed.vorticities, r);
        try {
            GaussNewtonOutcome gn = solve_periodic_orbit(sh, u_pred, opts);
            VecX u0 = shift_to_section(sh, chart, gn.u, opts);
            orbits.push_back(u0);
            u_pred = u0;
        } catch (const NumericalError& err) {
            result.diagnostic = "continuation broke at r = " + format_double(r) + ": " +
                                err.what();
            break;
        }
    }

    // per-point analysis; independent across the grid
    result.points.resize(orbits.size());
    std::vector<std::string> errors(orbits.size());
    const int jobs = std::max(1, opts.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(orbits.size()); ++i) {
        try {
            ScaledHamiltonian sh(domain, result.seed.vorticities, r_grid[i]);
            VariationalResult vr = variational_flow(sh, orbits[i], kTwoPi, opts.integrator);
            FamilyPoint& p = result.points[i];
            p.r = r_grid[i];
            p.u0 = orbits[i];
            p.energy = sh.value(orbits[i]);
            p.residual = (vr.state - orbits[i]).norm();
            p.monodromy = vr.fundamental;
            p.symplectic_defect = vr.symplectic_defect;
            p.spec = spectrum(vr.fundamental, opts.spectrum);
            if (p.residual > opts.periodicity_tol)
                throw NotPeriodicError("family point residual " + format_double(p.residual));
        } catch (const std::exception& err) {
            errors[i] = err.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) {
            result.points.resize(i);
            if (!result.diagnostic)
                result.diagnostic =
                    "family point analysis failed at r = " + format_double(r_grid[i]) + ": " +
                    errors[i];
            break;
        }
    return result;
}

double hitting_time(const ScaledHamiltonian& sh, const SectionChart& chart, const VecX& u,
                    const IntegratorOptions& opts) {
    const int slope_sign = chart.momentum() > 0 ? 1 : -1;
    return locate_event(
        sh, u, kTwoPi - 1.0, kTwoPi + 1.0, [&](const VecX& y) { return chart.section_value(y); },
        slope_sign, /*nearest_zero=*/false, opts);
}

MatX reduced_monodromy(const SectionChart& chart, const ScaledHamiltonian& sh_r,
                       const FamilyPoint& point, double* leak) {
    const VecX& z0 = chart.anchor();
    const MatX& basis = chart.tangent_basis();
    const VecX grad_hr = sh_r.gradient(point.u0);
    const VecX udot = sh_r.vector_field(point.u0);

    const double chart_denominator = grad_hr.dot(z0);   // ~ -L/pi
    const double tau_denominator = chart.section_value(udot);  // ~ L/pi
    if (std::abs(chart_denominator) < 1e-10 || std::abs(tau_denominator) < 1e-10)
        throw ConfigError("reduced monodromy: degenerate chart (|L| too small)");

    const int k = static_cast<int>(basis.cols());
    MatX reduced(k, k);
    double worst_leak = 0.0;
    for (int c = 0; c < k; ++c) {
        VecX v = basis.col(c);
        // D psi_r at the chart preimage of u_r
        double ds = -grad_hr.dot(v) / chart_denominator;
        VecX y = v + ds * z0;
        // D P_r(u_r) = X_r(2pi) + udot * D_u tau
        VecX xy = point.monodromy * y;
        double dtau = -chart.section_value(xy) / tau_denominator;
        VecX w = xy + dtau * udot;
        // D psi_r^{-1} (linear)
        VecX m = chart.chart_inverse(w);
        reduced.col(c) = basis.transpose() * m;
        worst_leak = std::max(worst_leak, (m - basis * reduced.col(c)).norm());
    }
    if (leak) *leak = worst_leak;
    return reduced;
}

// ---------------------------------------------------------------------------
// curves and fits
// ---------------------------------------------------------------------------

Mat2 robin_hessian_at_origin(const DomainModel& domain) {
    return domain.robin(Vec2::Zero(), 2).hess;
}

namespace {

// free power-law fit v ~ C r^p by log-log least squares; returns (C, p)
std::pair<double, double> fit_power_law(const std::vector<double>& r,
                                        const std::vector<double>& v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (v[i] <= 0.0) continue;
        double x = std::log(r[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return {0.0, 0.0};
    double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double logc = (sy - p * sx) / n;
    return {std::exp(logc), p};
}

}  // namespace

MultiplierCurve multiplier_curve(std::shared_ptr<const DomainModel> domain,
                                 const FamilyResult& family, const ContinuationOptions& opts) {
    if (!domain)
        throw ConfigError("multiplier curve: null domain");
    if (family.points.empty())
        throw ConfigError("multiplier curve: empty family");
    SectionChart chart = SectionChart::build(family.seed);
    Mat2 hess = robin_hessian_at_origin(*domain);
    const double gamma = family.seed.vorticities.total();

    MultiplierCurve curve;
    curve.predicted_coefficient =
        2.0 * kPi * gamma * std::sqrt(Complex(-hess.determinant(), 0.0));

    for (const FamilyPoint& p : family.points) {
        ScaledHamiltonian sh_r(domain, family.seed.vorticities, p.r);
        MatX reduced = reduced_monodromy(chart, sh_r, p);
        Eigen::EigenSolver<MatX> es(reduced);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigensolver", "multiplier curve: eigensolve failed");
        CVecX ev = es.eigenvalues();

        // eigenvalue pair nearest 1 (the trivial pair is removed by the section)
        std::vector<int> order(ev.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(ev[a] - 1.0) < std::abs(ev[b] - 1.0);
        });
        std::string flag;
        if (ev.size() > 2) {
            double second = std::abs(ev[order[1]] - 1.0);
            double third = std::abs(ev[order[2]] - 1.0);
            if (third - second < opts.spectrum.cluster_tol) flag = "ambiguous-pair";
        }
        Complex a = ev[order[0]], b = ev[order[1]];
        // lambda_+ has the larger imaginary part (extremum case) or the larger
        // real part (saddle case)
        Complex lp = a, lm = b;
        if (std::imag(a) < std::imag(b) ||
            (std::imag(a) == std::imag(b) && std::real(a) < std::real(b))) {
            lp = b;
            lm = a;
        }
        if (std::abs(lp * lm - 1.0) > 1e-6 && flag.empty()) flag = "pair-product-off";
        curve.r.push_back(p.r);
        curve.lambda_plus.push_back(lp);
        curve.lambda_minus.push_back(lm);
        curve.flags.push_back(flag);
        curve.max_pairing_defect = std::max(curve.max_pairing_defect, std::abs(lp * lm - 1.0));
    }

    // gauge-pinned least squares of (lambda_+ - 1) against C r^2 on the
    // small-r half of the grid, where the o(r^2) remainder is smallest
    Complex num = 0.0;
    double den = 0.0;
    std::vector<double> magnitudes;
    const std::size_t fit_count = std::max<std::size_t>(2, (curve.r.size() + 1) / 2);
    for (std::size_t i = 0; i < curve.r.size(); ++i) {
        if (i < fit_count) {
            double r2 = curve.r[i] * curve.r[i];
            num += (curve.lambda_plus[i] - 1.0) * r2;
            den += r2 * r2;
        }
        magnitudes.push_back(std::abs(curve.lambda_plus[i] - 1.0));
    }
    curve.fitted_coefficient = den > 0.0 ? num / den : Complex(0.0, 0.0);
    curve.fitted_exponent = fit_power_law(curve.r, magnitudes).second;
    return curve;
}

TraceCurve trace_curve(const DomainModel& domain, const FamilyResult& family) {
    if (family.points.empty())
        throw ConfigError("trace curve: empty family");
    if (family.seed.n_vortices() != 2)
        throw ConfigError("trace curve: defined for the two-vortex family only");
    Mat2 hess = robin_hessian_at_origin(domain);
    const bool trivial = hess.cwiseAbs().maxCoeff() == 0.0;
    if (!trivial && hess.determinant() <= 0.0)
        throw ConfigError("trace curve: requires the extremum case det hess h(0) > 0");

    TraceCurve curve;
    curve.predicted_c = 2.0 * kPi * family.seed.vorticities.total() *
                        std::sqrt(std::max(hess.determinant(), 0.0));
    std::vector<double> gaps;
    double num = 0.0, den = 0.0;
    const std::size_t fit_count = std::max<std::size_t>(2, (family.points.size() + 1) / 2);
    for (std::size_t i = 0; i < family.points.size(); ++i) {
        const FamilyPoint& p = family.points[i];
        double tr = p.monodromy.trace();
        curve.r.push_back(p.r);
        curve.trace.push_back(tr);
        if (i < fit_count) {
            double r4 = std::pow(p.r, 4);
            num += (4.0 - tr) * r4;
            den += r4 * r4;
        }
        gaps.push_back(std::max(4.0 - tr, 0.0));
    }
    curve.fitted_coefficient = den > 0.0 ? num / den : 0.0;
    curve.fitted_exponent = fit_power_law(curve.r, gaps).second;
    return curve;
}

std::vector<std::pair<double, MatX>> expansion_samples(const FamilyResult& family) {
    std::vector<std::pair<double, MatX>> out;
    for (const FamilyPoint& p : family.points) out.emplace_back(p.r, p.monodromy);
    return out;
}

}  // namespace vortexstab
