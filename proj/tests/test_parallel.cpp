#include "vortexstab/continuation.hpp"
#include "vortexstab/robin.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace vortexstab;

// The OpenMP lanes must be bit-identical to the serial reference: each grid
// point's computation is independent and internally sequential, so only the
// scheduling differs.

TEST_CASE("continuation: jobs = 4 reproduces the serial sweep bit for bit") {
    auto disc = std::make_shared<UnitDisc>();
    std::vector<double> grid = {0.05, 0.1, 0.15, 0.2};

    ContinuationOptions serial;
    serial.jobs = 1;
    ContinuationOptions parallel;
    parallel.jobs = 4;

    FamilyResult a = continue_family(disc, make_vortex_pair(1.0, 1.0, 1.0), grid, serial);
    FamilyResult b = continue_family(disc, make_vortex_pair(1.0, 1.0, 1.0), grid, parallel);

    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].u0 == b.points[i].u0);
        CHECK(a.points[i].monodromy == b.points[i].monodromy);
        CHECK(a.points[i].energy == b.points[i].energy);
        CHECK(a.points[i].residual == b.points[i].residual);
    }
}

TEST_CASE("robin scan: parallel seeds match the serial reference") {
    Mat2 s;
    s << 1.0, 0.3, 0.3, -0.8;
    SyntheticQuadratic quad(s);
    std::vector<Vec2> seeds = default_seed_grid(quad, 9);

    RobinSearchOptions serial;
    serial.jobs = 1;
    RobinSearchOptions parallel;
    parallel.jobs = 4;

    RobinSearchResult a = find_critical_points(quad, seeds, serial);
    RobinSearchResult b = find_critical_points(quad, seeds, parallel);

    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].location == b.points[i].location);
        CHECK(a.points[i].hessian == b.points[i].hessian);
    }
    CHECK(a.unconverged.size() == b.unconverged.size());
}
