#include "vortexstab/vorticity.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace vortexstab;

TEST_CASE("totals of simple strength lists") {
    auto [g1, l1] = totals({1.0, 1.0});
    CHECK(g1 == doctest::Approx(2.0));
    CHECK(l1 == doctest::Approx(1.0));

    // the L = 0 example configuration
    auto [g2, l2] = totals({1.0, 1.0, -0.5});
    CHECK(g2 == doctest::Approx(1.5));
    CHECK(l2 == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rhombus strengths at y^2 = 3 + sqrt(8) have zero total vorticity") {
    const double y2 = 3.0 + std::sqrt(8.0);
    const double kappa = (3.0 * y2 - y2 * y2) / (3.0 * y2 - 1.0);
    CHECK(kappa == doctest::Approx(-1.0).epsilon(1e-14));
    auto [gamma, momentum] = totals({1.0, 1.0, kappa, kappa});
    CHECK(std::abs(gamma) < 1e-13);
    (void)momentum;
}

TEST_CASE("Gamma^2 = 2L + sum of squares holds for random strengths") {
    testing::Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + trial % 5;
        Vorticities v(rng.strengths(n));
        double lhs = v.total() * v.total();
        double rhs = 2.0 * v.momentum() + v.sum_of_squares();
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("zero strengths are rejected") {
    CHECK_THROWS_AS(Vorticities({1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(Vorticities({}), ConfigError);
    CHECK_THROWS_AS(totals({0.0}), ConfigError);
}
