#include "vortexstab/robin.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace vortexstab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("unit disc: Newton from an interior seed lands on the centre") {
    UnitDisc disc;
    RobinSearchResult res = find_critical_points(disc, {Vec2(0.3, 0.1)});
    REQUIRE(res.points.size() == 1);
    const CriticalPoint& p = res.points.front();
    CHECK(p.location.norm() < 1e-10);
    CHECK(p.classification == CriticalPointClass::minimum);
    CHECK((p.hessian - Mat2::Identity() / kPi).norm() < 1e-10);
    CHECK(p.nondegenerate);
    CHECK(p.gradient_norm < 1e-10);
    CHECK(p.newton_step < 1e-12);
}

TEST_CASE("unit disc: every interior seed finds only the centre") {
    UnitDisc disc;
    RobinSearchResult res = find_critical_points(disc, default_seed_grid(disc));
    REQUIRE(res.points.size() == 1);
    CHECK(res.points.front().location.norm() < 1e-9);
}

TEST_CASE("synthetic quadratic saddle") {
    Mat2 s;
    s << 1.0, 0.0, 0.0, -1.0;
    SyntheticQuadratic quad(s);
    RobinSearchResult res = find_critical_points(quad, {Vec2(0.4, -0.2), Vec2(-0.7, 0.3)});
    REQUIRE(res.points.size() == 1);  // deduplicated
    const CriticalPoint& p = res.points.front();
    CHECK(p.location.norm() < 1e-12);
    CHECK(p.classification == CriticalPointClass::saddle);
    CHECK(p.hessian.determinant() == doctest::Approx(-4.0));

    // saddle: prediction coefficient real and nonzero
    Complex coeff = p.prediction_coefficient(2.0);
    CHECK(std::abs(std::imag(coeff)) < 1e-12);
    CHECK(std::abs(coeff - Complex(8.0 * kPi, 0.0)) < 1e-10);
}

TEST_CASE("prediction coefficient is imaginary exactly for extrema") {
    // minimum (disc-like Hessian) -> purely imaginary
    UnitDisc disc;
    CriticalPoint cp = find_critical_points(disc, {Vec2(0.2, 0.2)}).points.front();
    Complex c = cp.prediction_coefficient(2.0);
    CHECK(std::abs(std::real(c)) < 1e-12);
    CHECK(std::abs(c - Complex(0.0, 4.0)) < 1e-10);

    // maximum: flipped quadratic
    Mat2 s;
    s << -1.0, 0.0, 0.0, -2.0;
    SyntheticQuadratic quad(s);
    CriticalPoint mx = find_critical_points(quad, {Vec2(0.1, 0.1)}).points.front();
    CHECK(mx.classification == CriticalPointClass::maximum);
    Complex cm = mx.prediction_coefficient(1.0);
    CHECK(std::abs(std::real(cm)) < 1e-12);
    CHECK(std::abs(std::imag(cm)) > 0.0);
}

TEST_CASE("conformal image psi(w) = w + 0.1 w^2: shifted minimum") {
    ConformalImage dom(std::vector<Complex>{1.0, 0.1});
    RobinSearchResult res = find_critical_points(dom, default_seed_grid(dom, 5));
    REQUIRE(res.points.size() >= 1);
    const CriticalPoint& p = res.points.front();
    CHECK(p.classification == CriticalPointClass::minimum);
    CHECK(p.nondegenerate);

    // independent oracle: minimize the lifted expression
    // h(psi(w)) = -log((1-|w|^2)|psi'(w)|)/(2pi) over a fine grid + refinement
    double best_val = 1e9;
    Vec2 best_w = Vec2::Zero();
    for (int i = -60; i <= 60; ++i)
        for (int j = -60; j <= 60; ++j) {
            Vec2 w(i / 75.0, j / 75.0);
            if (w.norm() > 0.8) continue;
            double val = -std::log((1.0 - w.squaredNorm()) * std::abs(dom.map_derivative(
                                                                 Complex(w[0], w[1])))) /
                         (2.0 * kPi);
            if (val < best_val) {
                best_val = val;
                best_w = w;
            }
        }
    // local quadratic refinement of the grid winner
    for (int iter = 0; iter < 40; ++iter) {
        double step = 0.5 / 75.0 / (1 << std::min(iter / 2, 20));
        Vec2 improved = best_w;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                Vec2 w = best_w + step * Vec2(di, dj);
                if (w.norm() > 0.95) continue;
                double val =
                    -std::log((1.0 - w.squaredNorm()) *
                              std::abs(dom.map_derivative(Complex(w[0], w[1])))) /
                    (2.0 * kPi);
                if (val < best_val) {
                    best_val = val;
                    improved = w;
                }
            }
        best_w = improved;
    }
    Complex img = dom.map(Complex(best_w[0], best_w[1]));
    CHECK((p.location - Vec2(img.real(), img.imag())).norm() < 1e-4);
    CHECK(p.h_value == doctest::Approx(best_val).epsilon(1e-6));
}

TEST_CASE("whole plane reports no critical structure") {
    // h == 0: the gradient norm converges instantly but the Hessian is singular,
    // so the point is flagged degenerate
    WholePlane plane;
    RobinSearchResult res = find_critical_points(plane, {Vec2(0.1, 0.2)});
    REQUIRE(res.points.size() == 1);
    CHECK_FALSE(res.points.front().nondegenerate);
}

TEST_CASE("divergent seeds are reported, not fatal") {
    UnitDisc disc;
    // a seed essentially on the rim diverges outward or falls out of the domain
    RobinSearchResult res = find_critical_points(disc, {Vec2(0.9999, 0.0), Vec2(0.2, 0.1)});
    CHECK(res.points.size() == 1);  // the good seed still converges
    CHECK(res.unconverged.size() <= 1);
}
