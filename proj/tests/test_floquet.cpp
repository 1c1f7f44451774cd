#include "vortexstab/floquet.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace vortexstab;

namespace {
constexpr double kPi = 3.14159265358979323846;

MatX closed_form_pair_monodromy(const RelativeEquilibrium& eq) {
    // assembled from the known action on the basis {e1^, e2^, J z0, z0}
    const int d = 4;
    MatX basis(d, d), image(d, d);
    basis.col(0) = diagonal_lift(Vec2(1, 0), 2);
    basis.col(1) = diagonal_lift(Vec2(0, 1), 2);
    basis.col(2) = apply_jn(eq.z0);
    basis.col(3) = eq.z0;
    image.col(0) = basis.col(0);
    image.col(1) = basis.col(1);
    image.col(2) = basis.col(2);
    image.col(3) = eq.z0 + 4.0 * kPi * eq.nu * apply_jn(eq.z0);
    return image * basis.inverse();
}
}  // namespace

TEST_CASE("pair monodromy equals the closed form on the Floquet basis") {
    RelativeEquilibrium eq = make_vortex_pair(1.0, 1.0, 1.0).normalized();
    MatX x = equilibrium_monodromy(eq);
    MatX expected = closed_form_pair_monodromy(eq);
    CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("corotating closed form agrees with the integrated monodromy") {
    for (const auto& eq :
         {make_vortex_pair(1.0, 1.0, 1.0), make_vortex_pair(1.0, 3.0, 0.7),
          make_equilateral_triangle(1.0, 2.0, 3.0), make_rhombus(1.1)}) {
        MatX integrated = equilibrium_monodromy(eq);
        MatX closed = equilibrium_monodromy_corotating(eq);
        CHECK((integrated - closed).cwiseAbs().maxCoeff() < 1e-9);
        // and the extended-precision lane rounds to the same matrix
        ExactMonodromy exact = equilibrium_monodromy_exact(eq);
        CHECK((closed - exact.monodromy).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("monodromy requires a periodic initial condition") {
    RelativeEquilibrium eq = make_vortex_pair(1.0, 1.0, 1.0);  // nu = 2/pi, not 2pi-periodic
    ScaledHamiltonian sh(std::make_shared<WholePlane>(), eq.vorticities, 0.0);
    CHECK_THROWS_AS(monodromy(sh, eq.z0), NotPeriodicError);
}

TEST_CASE("triangle (1,2,3) eigenvalues match the closed-form multipliers") {
    RelativeEquilibrium eq = make_equilateral_triangle(1.0, 2.0, 3.0);
    FloquetSpectrum spec = spectrum(equilibrium_monodromy(eq));
    auto predicted = *predicted_multipliers(eq);
    for (Complex p : predicted) {
        double best = 1e9;
        for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
            best = std::min(best, std::abs(spec.eigenvalues[i] - p));
        CHECK(best < 1e-6);
    }
    CHECK(spec.labels.spectrally_stable);
    CHECK(std::abs(spec.determinant - 1.0) < 1e-8);
    CHECK(spec.pairing_defect < 1e-6);

    // cluster structure through the exact lane: the integrated route splits
    // the defective unit pair by ~sqrt(integration error) ~ 2e-5
    FloquetSpectrum exact = equilibrium_spectrum(eq);
    CHECK(exact.unit_multiplier_multiplicity == 4);
    CHECK(exact.labels.algebraic_nondegenerate);
    CHECK(exact.estimated_geometric_multiplicity == 3);
}

TEST_CASE("multipliers over one period are invariant under rescaling") {
    RelativeEquilibrium eq = make_equilateral_triangle(1.0, 2.0, 3.0);
    CVecX ev1 = spectrum(equilibrium_monodromy(eq)).eigenvalues;
    CVecX ev2 = spectrum(equilibrium_monodromy(eq.rescaled(1.7))).eigenvalues;
    for (Eigen::Index i = 0; i < ev1.size(); ++i) {
        double best = 1e9;
        for (Eigen::Index j = 0; j < ev2.size(); ++j)
            best = std::min(best, std::abs(ev1[i] - ev2[j]));
        CHECK(best < 1e-7);
    }
}

TEST_CASE("rhombus y = 1.1: all four nontrivial multipliers match the formulas") {
    RelativeEquilibrium eq = make_rhombus(1.1);
    FloquetSpectrum spec = spectrum(equilibrium_monodromy(eq));
    auto predicted = *predicted_multipliers(eq);
    for (Complex p : predicted) {
        double best = 1e9;
        for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
            best = std::min(best, std::abs(spec.eigenvalues[i] - p));
        CHECK(best < 1e-6);
    }
    CHECK(equilibrium_spectrum(eq).unit_multiplier_multiplicity == 4);
}

TEST_CASE("collinear three-vortex row: nondegenerate but spectrally unstable") {
    // equal strengths on a line at (-d, 0, d) rotate with nu = 3/(2 pi d^2)
    Vorticities vort({1.0, 1.0, 1.0});
    VecX z(6);
    z << -1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
    double nu = 3.0 / (2.0 * kPi);
    CHECK(equilibrium_residual(z, nu, vort) < 1e-12);
    RelativeEquilibrium eq{z, nu, vort, EquilibriumKind::custom, 0.0};
    FloquetSpectrum spec = spectrum(equilibrium_monodromy(eq));
    CHECK(spec.labels.spectrally_unstable);
    double largest = 0.0;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
        largest = std::max(largest, std::abs(spec.eigenvalues[i]));
    CHECK(largest > 10.0);  // a violently real pair e^{+-c}
    CHECK(equilibrium_unit_multiplicity(eq) == 4);
}

TEST_CASE("spectrally unstable triangle: L < 0 gives a real pair off the circle") {
    RelativeEquilibrium eq = make_equilateral_triangle(1.0, 1.0, -0.6);
    FloquetSpectrum spec = spectrum(equilibrium_monodromy(eq));
    CHECK(spec.labels.spectrally_unstable);
    int off_circle = 0;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
        if (std::abs(std::abs(spec.eigenvalues[i]) - 1.0) > 0.1) {
            ++off_circle;
            CHECK(std::abs(std::imag(spec.eigenvalues[i])) < 1e-6);
        }
    CHECK(off_circle == 2);
}

TEST_CASE("clustering groups and labels synthetic spectra") {
    // identity: one cluster of size 4
    FloquetSpectrum id4 = spectrum(MatX::Identity(4, 4));
    CHECK(id4.clusters.size() == 1);
    CHECK(id4.unit_multiplier_multiplicity == 4);

    // diag(2, 1/2, 1, 1): clusters {2}, {1/2}, {1,1}; unstable
    VecX d(4);
    d << 2.0, 0.5, 1.0, 1.0;
    FloquetSpectrum dd = spectrum(MatX(d.asDiagonal()));
    CHECK(dd.clusters.size() == 3);
    CHECK(dd.unit_multiplier_multiplicity == 2);
    CHECK(dd.labels.spectrally_unstable);
    CHECK_FALSE(dd.labels.l_stable);
    CHECK(dd.pairing_defect < 1e-12);  // 2 and 1/2 pair up

    // -1 in the spectrum blocks the L-stable label even on the circle
    VecX dm(4);
    dm << 1.0, 1.0, -1.0, -1.0;
    FloquetSpectrum dmspec = spectrum(MatX(dm.asDiagonal()));
    CHECK(dmspec.labels.spectrally_stable);
    CHECK_FALSE(dmspec.labels.l_stable);
}

TEST_CASE("classification is invariant under vortex relabeling") {
    RelativeEquilibrium eq = make_equilateral_triangle(1.0, 2.0, 3.0);
    MatX x = equilibrium_monodromy(eq);
    // conjugate by the block permutation swapping vortices 1 and 3
    MatX p = MatX::Zero(6, 6);
    p.block<2, 2>(0, 4) = Mat2::Identity();
    p.block<2, 2>(2, 2) = Mat2::Identity();
    p.block<2, 2>(4, 0) = Mat2::Identity();
    FloquetSpectrum a = spectrum(x), b = spectrum(p * x * p.transpose());
    CHECK(a.unit_multiplier_multiplicity == b.unit_multiplier_multiplicity);
    CHECK(a.labels.spectrally_stable == b.labels.spectrally_stable);
    CHECK(a.labels.l_stable == b.labels.l_stable);
    for (Eigen::Index i = 0; i < a.eigenvalues.size(); ++i) {
        double best = 1e9;
        for (Eigen::Index j = 0; j < b.eigenvalues.size(); ++j)
            best = std::min(best, std::abs(a.eigenvalues[i] - b.eigenvalues[j]));
        CHECK(best < 1e-9);
    }
}

TEST_CASE("degeneracy detection at cluster tolerance 1e-4") {
    // pair: multiplicity exactly 4
    CHECK(equilibrium_unit_multiplicity(make_vortex_pair(1.0, 1.0, 1.0)) == 4);
    // L = 0 triangle: all six multipliers collapse to 1
    CHECK(equilibrium_unit_multiplicity(make_equilateral_triangle(1.0, 1.0, -0.5)) >= 6);
    // Gamma = 0 rotor: again >= 6
    CHECK(equilibrium_unit_multiplicity(make_collinear_rotor(1.0)) >= 6);
    // nondegenerate triangle stays at 4
    CHECK(equilibrium_unit_multiplicity(make_equilateral_triangle(1.0, 2.0, 3.0)) == 4);
    // rhombus at y = 1: lambda_2 = 1 joins the trivial block
    CHECK(equilibrium_unit_multiplicity(make_rhombus(1.0)) >= 6);
    // and just off the 4-gon the degeneracy resolves
    CHECK(equilibrium_unit_multiplicity(make_rhombus(1.1)) == 4);
}

TEST_CASE("double-precision QR splits the defective L = 0 multiplier beyond 1e-4") {
    // the hazard the extended lane exists for
    RelativeEquilibrium eq = make_equilateral_triangle(1.0, 1.0, -0.5);
    MatX x = equilibrium_monodromy_corotating(eq);
    CHECK(unit_multiplier_multiplicity(x, 1e-4) < 6);
}

TEST_CASE("eigenvalue pairing holds for every catalog monodromy") {
    for (const auto& eq :
         {make_vortex_pair(1.0, 1.0, 1.0), make_vortex_pair(1.0, 3.0, 0.7),
          make_equilateral_triangle(1.0, 2.0, 3.0), make_equilateral_triangle(1.0, 1.0, -0.6),
          make_rhombus(1.1), make_rhombus(0.9)}) {
        FloquetSpectrum spec = spectrum(equilibrium_monodromy(eq));
        CHECK(spec.pairing_defect < 1e-6);
        CHECK(std::abs(spec.determinant - 1.0) < 1e-8);
        CHECK(equilibrium_spectrum(eq).unit_multiplier_multiplicity >= 4);
    }
}

TEST_CASE("Example 4.3 matrix at r = 0.3 has eigenvalues e^{+-0.09i}") {
    // direct matrix assembly, no integration involved
    double r = 0.3, r2 = r * r;
    MatX m(2, 2);
    m << std::cos(r2) + std::sin(r2), -2.0 * r, std::sin(r2) * std::sin(r2) / r,
        std::cos(r2) - std::sin(r2);
    FloquetSpectrum spec = spectrum(m);
    Complex expected = std::exp(Complex(0.0, r2));
    double d1 = 1e9, d2 = 1e9;
    for (Eigen::Index i = 0; i < 2; ++i) {
        d1 = std::min(d1, std::abs(spec.eigenvalues[i] - expected));
        d2 = std::min(d2, std::abs(spec.eigenvalues[i] - std::conj(expected)));
    }
    CHECK(d1 < 1e-10);
    CHECK(d2 < 1e-10);
}

TEST_CASE("monodromy expansion check: synthetic samples converge to the limit") {
    // X_r a^ = a^ - 2 pi Gamma r^2 (J H a)^ + r^4 * noise, manufactured directly
    Mat2 hess;
    hess << 2.0, 0.0, 0.0, -2.0;
    const double gamma = 2.0;
    std::vector<std::pair<double, MatX>> samples;
    for (double r : {0.05, 0.1, 0.2}) {
        MatX x = MatX::Identity(4, 4);
        for (int c = 0; c < 2; ++c) {
            Vec2 a = Vec2::Zero();
            a[c] = 1.0;
            VecX target = -2.0 * kPi * gamma * r * r * diagonal_lift(sympl_j2() * (hess * a), 2);
            VecX quartic = r * r * r * r * diagonal_lift(Vec2(0.3, -0.1), 2);
            // e_c^ = unit column c plus unit column c+2
            x.col(c) += 0.5 * (target + quartic);
            x.col(c + 2) += 0.5 * (target + quartic);
        }
        samples.emplace_back(r, x);
    }
    MonodromyExpansionReport rep = check_monodromy_expansion(hess, gamma, samples);
    // deviations shrink toward r -> 0 and the limit is the stated vector
    CHECK(rep.e1.deviation.front() < rep.e1.deviation.back());
    CHECK(rep.e1.limit.isApprox(
        -2.0 * kPi * gamma * diagonal_lift(sympl_j2() * (hess * Vec2(1, 0)), 2)));
    CHECK(rep.e1.order_estimate > 1.0);

    // whole plane: hess = 0 makes the limit zero and every deviation tiny
    std::vector<std::pair<double, MatX>> trivial;
    for (double r : {0.05, 0.1}) trivial.emplace_back(r, MatX::Identity(4, 4));
    MonodromyExpansionReport flat = check_monodromy_expansion(Mat2::Zero(), gamma, trivial);
    CHECK(flat.e1.limit.norm() == 0.0);
    CHECK(flat.e1.deviation.back() == 0.0);
}
