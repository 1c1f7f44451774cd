#pragma once

#include "vortexstab/domain.hpp"

namespace vortexstab {

enum class CriticalPointClass { minimum, maximum, saddle };
std::string to_string(CriticalPointClass c);

/// A critical point of the Robin function h with its classification and the
/// stability-prediction coefficient 2 pi Gamma sqrt(-det hess h(a0)).
struct CriticalPoint {
    Vec2 location = Vec2::Zero();
    double h_value = 0.0;
    Mat2 hessian = Mat2::Zero();
    CriticalPointClass classification = CriticalPointClass::minimum;
    bool nondegenerate = true;
    double gradient_norm = 0.0;
    double newton_step = 0.0;  ///< displacement of one extra Newton step

    Complex prediction_coefficient(double gamma_total) const;
};

/// One seed that failed to converge (reported, not fatal).
struct UnconvergedSeed {
    Vec2 seed;
    std::string reason;
};

struct RobinSearchResult {
    std::vector<CriticalPoint> points;
    std::vector<UnconvergedSeed> unconverged;
};

struct RobinSearchOptions {
    double gradient_tol = 1e-10;
    double dedupe_radius = 1e-8;
    int max_iterations = 60;
    /// |det| below this times |hess|^2 marks the point degenerate.
    double degenerate_tol = 1e-8;
    int jobs = 1;
};

/// Newton iteration on grad h from each seed, deduplicated and classified.
RobinSearchResult find_critical_points(const DomainModel& domain,
                                       const std::vector<Vec2>& seeds,
                                       const RobinSearchOptions& opts = {});

/// Regular seed grid over a conservative interior subset of the domain
/// (|w| < 0.9 in disc coordinates for disc-like domains, [-1,1]^2 otherwise).
std::vector<Vec2> default_seed_grid(const DomainModel& domain, int per_axis = 7);

}  // namespace vortexstab
