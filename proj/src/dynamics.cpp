#include "vortexstab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace vortexstab {

namespace {

using Solver = Dopri5<double>;

Solver::Rhs state_rhs(const ScaledHamiltonian& sh) {
    return [&sh](double, const VecX& y, VecX& dydt) { dydt = sh.vector_field(y); };
}

// extended state [u; vec(X)] for the joint variational system
Solver::Rhs joint_rhs(const ScaledHamiltonian& sh) {
    const int d = sh.dim();
    return [&sh, d](double, const VecX& y, VecX& dydt) {
        VecX u = y.head(d);
        dydt.resize(d + d * d);
        dydt.head(d) = sh.vector_field(u);
        MatX a = sh.variational_matrix(u);
        Eigen::Map<const MatX> x(y.data() + d, d, d);
        Eigen::Map<MatX>(dydt.data() + d, d, d) = a * x;
    };
}

}  // namespace

double min_pairwise_distance(const VecX& z, int n) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            best = std::min(best, (z.segment<2>(2 * j) - z.segment<2>(2 * k)).norm());
    return best;
}

Trajectory flow(const ScaledHamiltonian& sh, const VecX& u0, double T, const FlowOptions& opts) {
    sh.check_admissible(u0);
    Trajectory out;
    const double h0 = sh.value(u0);
    out.min_separation = min_pairwise_distance(u0, sh.n_vortices());

    std::vector<double> wanted;
    const int samples = std::max(opts.samples, 1);
    for (int i = 0; i <= samples; ++i) wanted.push_back(T * i / samples);

    out.times.push_back(0.0);
    out.states.push_back(u0);
    std::size_t next = 1;

    auto observer = [&](const Solver::Segment& seg) {
        const double lo = std::min(seg.t0, seg.t0 + seg.h);
        const double hi = std::max(seg.t0, seg.t0 + seg.h);
        while (next < wanted.size() && wanted[next] >= lo - 1e-14 && wanted[next] <= hi + 1e-14) {
            VecX u = seg.eval(wanted[next]);
            out.times.push_back(wanted[next]);
            out.states.push_back(u);
            ++next;
        }
    };

    VecX uf = Solver::integrate(state_rhs(sh), 0.0, T, u0, opts.integrator, observer);
    if (out.times.back() != T) {
        out.times.push_back(T);
        out.states.push_back(uf);
    } else {
        out.states.back() = uf;  // exact endpoint, not the interpolant
    }

    for (const VecX& u : out.states) {
        out.energy_drift = std::max(out.energy_drift, std::abs(sh.value(u) - h0));
        out.min_separation =
            std::min(out.min_separation, min_pairwise_distance(u, sh.n_vortices()));
    }
    out.ok = out.energy_drift <= opts.energy_tolerance;
    return out;
}

VecX flow_state(const ScaledHamiltonian& sh, const VecX& u0, double T,
                const IntegratorOptions& opts) {
    sh.check_admissible(u0);
    return Solver::integrate(state_rhs(sh), 0.0, T, u0, opts);
}

VariationalResult variational_flow(const ScaledHamiltonian& sh, const VecX& u0, double T,
                                   const IntegratorOptions& opts) {
    sh.check_admissible(u0);
    const int d = sh.dim();
    VecX y0(d + d * d);
    y0.head(d) = u0;
    Eigen::Map<MatX>(y0.data() + d, d, d) = MatX::Identity(d, d);

    const double h0 = sh.value(u0);
    VariationalResult out;
    out.min_separation = min_pairwise_distance(u0, sh.n_vortices());

    VecX yf = Solver::integrate(joint_rhs(sh), 0.0, T, y0, opts);
    out.state = yf.head(d);
    out.fundamental = Eigen::Map<const MatX>(yf.data() + d, d, d);
    out.energy_drift = std::abs(sh.value(out.state) - h0);
    out.min_separation =
        std::min(out.min_separation, min_pairwise_distance(out.state, sh.n_vortices()));

    const VecX mg = sh.vorticities().mgamma();
    MatX mj(d, d);  // M_Gamma J_N
    mj.setZero();
    for (int j = 0; j < sh.n_vortices(); ++j) {
        mj(2 * j, 2 * j + 1) = mg[2 * j];
        mj(2 * j + 1, 2 * j) = -mg[2 * j];
    }
    out.symplectic_defect =
        (out.fundamental.transpose() * mj * out.fundamental - mj).cwiseAbs().maxCoeff();
    return out;
}

double locate_event(const ScaledHamiltonian& sh, const VecX& u0, double t_lo, double t_hi,
                    const std::function<double(const VecX&)>& event, int slope_sign,
                    bool nearest_zero, const IntegratorOptions& opts) {
    sh.check_admissible(u0);
    if (t_hi <= t_lo)
        throw ConfigError("locate_event: empty window");

    std::vector<double> roots;
    std::vector<Solver::Segment> segs;
    auto observer = [&](const Solver::Segment& seg) { segs.push_back(seg); };

    // pad the sweeps so a crossing at the window edge sits inside a segment
    const double pad = 0.05 * (t_hi - t_lo) + 1e-6;
    if (t_hi > 0.0)
        Solver::integrate(state_rhs(sh), 0.0, t_hi + pad, u0, opts, observer);
    if (t_lo < 0.0)
        Solver::integrate(state_rhs(sh), 0.0, t_lo - pad, u0, opts, observer);

    const int subdiv = 8;
    for (const auto& seg : segs) {
        const double a = seg.t0, b = seg.t0 + seg.h;
        double prev_t = a;
        double prev_v = event(seg.eval(a));
        for (int i = 1; i <= subdiv; ++i) {
            double t = a + (b - a) * i / subdiv;
            double v = event(seg.eval(t));
            if (prev_v == 0.0 || prev_v * v < 0.0) {
                // bisection to ~1e-13 on the interpolant (time-ordered bracket)
                double lo = prev_t, hi = t, flo = prev_v;
                if (lo > hi) {
                    std::swap(lo, hi);
                    flo = v;
                }
                for (int it = 0; it < 100; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double fm = event(seg.eval(mid));
                    if (flo * fm <= 0.0)
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                    if (hi - lo < 1e-14 * std::max(1.0, std::abs(mid))) break;
                }
                double root = 0.5 * (lo + hi);
                if (root >= t_lo - 1e-12 && root <= t_hi + 1e-12) {
                    if (slope_sign != 0) {
                        const double seg_lo = std::min(a, b), seg_hi = std::max(a, b);
                        double eps = std::max(1e-7, 1e-7 * std::abs(root));
                        double tp = std::min(root + eps, seg_hi);
                        double tm = std::max(root - eps, seg_lo);
                        double slope = (event(seg.eval(tp)) - event(seg.eval(tm))) / (tp - tm);
                        if (slope * slope_sign <= 0.0) {
                            prev_t = t;
                            prev_v = v;
                            continue;
                        }
                    }
                    roots.push_back(root);
                }
            }
            prev_t = t;
            prev_v = v;
        }
    }
    if (roots.empty())
        throw SectionMissError("locate_event: no admissible crossing in the window");
    double best;
    if (nearest_zero)
        best = *std::min_element(roots.begin(), roots.end(),
                                 [](double a, double b) { return std::abs(a) < std::abs(b); });
    else
        best = *std::min_element(roots.begin(), roots.end());

    // The interpolant root inherits the trajectory's interpolation error
    // (~1e-10 at default tolerances).  A secant pass on the true flow at a
    // tightened tolerance brings the root to ~1e-12 in time.
    if (best != 0.0) {
        IntegratorOptions tight = opts;
        tight.atol = std::min(opts.atol, 1e-13);
        tight.rtol = std::min(opts.rtol, 1e-13);
        auto f = [&](double t) {
            return event(Solver::integrate(state_rhs(sh), 0.0, t, u0, tight));
        };
        double ta = best - 1e-7, tb = best + 1e-7;
        double fa = f(ta), fb = f(tb);
        for (int it = 0; it < 10 && fa != fb; ++it) {
            double tc = tb - fb * (tb - ta) / (fb - fa);
            if (!std::isfinite(tc)) break;
            ta = tb;
            fa = fb;
            tb = tc;
            fb = f(tb);
            if (std::abs(tb - ta) < 1e-13 * std::max(1.0, std::abs(tb))) break;
        }
        best = tb;
    }
    return best;
}

}  // namespace vortexstab
