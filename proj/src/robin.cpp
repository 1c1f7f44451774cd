#include "vortexstab/robin.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace vortexstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(CriticalPointClass c) {
    switch (c) {
        case CriticalPointClass::minimum: return "min";
        case CriticalPointClass::maximum: return "max";
        default: return "saddle";
    }
}

Complex CriticalPoint::prediction_coefficient(double gamma_total) const {
    return 2.0 * kPi * gamma_total * std::sqrt(Complex(-hessian.determinant(), 0.0));
}

namespace {

struct SeedOutcome {
    bool converged = false;
    CriticalPoint point;
    std::string reason;
};

SeedOutcome newton_from_seed(const DomainModel& domain, Vec2 x, const RobinSearchOptions& opts) {
    SeedOutcome out;
    double grad_norm = std::numeric_limits<double>::infinity();
    try {
        for (int it = 0; it < opts.max_iterations; ++it) {
            RobinEval re = domain.robin(x, 2);
            grad_norm = re.grad.norm();
            // iterate to the bottom of the basin, not just to the accept level,
            // so one extra Newton step moves by < 1e-12
            if (grad_norm < 1e-3 * opts.gradient_tol) break;
            if (std::abs(re.hess.determinant()) < 1e-14 * (1.0 + re.hess.squaredNorm())) {
                if (grad_norm < opts.gradient_tol) break;  // flat case (h constant)
                out.reason = "singular Hessian";
                return out;
            }
            Vec2 step = re.hess.inverse() * (-re.grad);  // 2x2 adjugate solve
            // damping on the gradient norm
            double scale = 1.0;
            Vec2 next = x + step;
            for (int half = 0; half < 8; ++half) {
                try {
                    if (domain.robin(next, 1).grad.norm() < grad_norm) break;
                } catch (const NumericalError&) {
                    // fell out of the domain: shrink
                }
                scale *= 0.5;
                next = x + scale * step;
            }
            x = next;
        }
        RobinEval re = domain.robin(x, 2);
        grad_norm = re.grad.norm();
        if (grad_norm >= opts.gradient_tol) {
            out.reason = "did not reach the gradient tolerance";
            return out;
        }
        // fixed point of one more Newton step
        Vec2 extra = Vec2::Zero();
        if (std::abs(re.hess.determinant()) >= 1e-14 * (1.0 + re.hess.squaredNorm()))
            extra = re.hess.inverse() * (-re.grad);
        out.converged = true;
        out.point.location = x;
        out.point.h_value = re.h;
        out.point.hessian = re.hess;
        out.point.gradient_norm = grad_norm;
        out.point.newton_step = extra.norm();
        Eigen::SelfAdjointEigenSolver<Mat2> es(re.hess);
        double l0 = es.eigenvalues()[0], l1 = es.eigenvalues()[1];
        if (l0 > 0.0 && l1 > 0.0)
            out.point.classification = CriticalPointClass::minimum;
        else if (l0 < 0.0 && l1 < 0.0)
            out.point.classification = CriticalPointClass::maximum;
        else
            out.point.classification = CriticalPointClass::saddle;
        double det = re.hess.determinant();
        out.point.nondegenerate =
            det != 0.0 && std::abs(det) >= opts.degenerate_tol * re.hess.squaredNorm();
    } catch (const NumericalError& err) {
        out.converged = false;
        out.reason = err.what();
    }
    return out;
}

}  // namespace

RobinSearchResult find_critical_points(const DomainModel& domain, const std::vector<Vec2>& seeds,
                                       const RobinSearchOptions& opts) {
    std::vector<SeedOutcome> outcomes(seeds.size());
    const int jobs = std::max(1, opts.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seeds.size()); ++i)
        outcomes[i] = newton_from_seed(domain, seeds[i], opts);

    RobinSearchResult result;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const SeedOutcome& o = outcomes[i];
        if (!o.converged) {
            result.unconverged.push_back({seeds[i], o.reason});
            continue;
        }
        bool duplicate = false;
        for (const CriticalPoint& p : result.points)
            if ((p.location - o.point.location).norm() < opts.dedupe_radius) duplicate = true;
        if (!duplicate) result.points.push_back(o.point);
    }
    std::sort(result.points.begin(), result.points.end(), [](const auto& a, const auto& b) {
        if (a.location[0] != b.location[0]) return a.location[0] < b.location[0];
        return a.location[1] < b.location[1];
    });
    return result;
}

std::vector<Vec2> default_seed_grid(const DomainModel& domain, int per_axis) {
    std::vector<Vec2> seeds;
    const auto* conf = dynamic_cast<const ConformalImage*>(&domain);
    const bool disc_like = dynamic_cast<const UnitDisc*>(&domain) != nullptr || conf != nullptr;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            double a = -0.9 + 1.8 * i / (per_axis - 1);
            double b = -0.9 + 1.8 * j / (per_axis - 1);
            if (disc_like) {
                if (a * a + b * b >= 0.81) continue;  // |w| < 0.9 in disc coordinates
                if (conf) {
                    Complex img = conf->map(Complex(a, b));
                    seeds.emplace_back(img.real(), img.imag());
                } else {
                    seeds.emplace_back(a, b);
                }
            } else {
                seeds.emplace_back(a, b);
            }
        }
    return seeds;
}

}  // namespace vortexstab
