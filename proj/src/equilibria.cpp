#include "vortexstab/equilibria.hpp"

#include <cmath>

namespace vortexstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::pair: return "pair";
        case EquilibriumKind::triangle: return "triangle";
        case EquilibriumKind::rhombus: return "rhombus";
        default: return "custom";
    }
}

EquilibriumKind equilibrium_kind_from_string(const std::string& s) {
    if (s == "pair") return EquilibriumKind::pair;
    if (s == "triangle") return EquilibriumKind::triangle;
    if (s == "rhombus") return EquilibriumKind::rhombus;
    if (s == "custom") return EquilibriumKind::custom;
    throw ConfigError("unknown equilibrium kind '" + s + "'");
}

RelativeEquilibrium RelativeEquilibrium::rescaled(double s) const {
    if (s <= 0.0)
        throw ConfigError("rescale factor must be positive");
    RelativeEquilibrium out = *this;
    out.z0 = s * z0;
    out.nu = nu / (s * s);
    return out;
}

double equilibrium_residual(const VecX& z0, double nu, const Vorticities& vort) {
    VecX g = whole_plane_gradient(z0, vort);
    return (g + nu * vort.mgamma().cwiseProduct(z0)).norm();
}

double equilibrium_residual(const RelativeEquilibrium& eq) {
    return equilibrium_residual(eq.z0, eq.nu, eq.vorticities);
}

double extract_frequency(const VecX& z0, const Vorticities& vort) {
    VecX mz = vort.mgamma().cwiseProduct(z0);
    double denom = mz.squaredNorm();
    if (denom == 0.0)
        throw ConfigError("frequency extraction: M_Gamma z0 = 0");
    return -whole_plane_gradient(z0, vort).dot(mz) / denom;
}

Vec2 center_of_vorticity(const VecX& z0, const Vorticities& vort) {
    Vec2 c = Vec2::Zero();
    for (int j = 0; j < vort.count(); ++j) c += vort.gamma(j) * z0.segment<2>(2 * j);
    return c;
}

RelativeEquilibrium make_vortex_pair(double gamma1, double gamma2, double separation) {
    Vorticities vort({gamma1, gamma2});
    if (vort.total() == 0.0)
        throw ConfigError("vortex pair with Gamma = 0 translates instead of rotating");
    if (separation <= 0.0)
        throw ConfigError("vortex pair separation must be positive");
    // zero centre of vorticity on the x-axis with |z1 - z2| = D
    VecX z(4);
    z << gamma2 * separation / vort.total(), 0.0, -gamma1 * separation / vort.total(), 0.0;
    RelativeEquilibrium eq{z, vort.total() / (kPi * separation * separation), vort,
                           EquilibriumKind::pair, separation};
    return eq;
}

RelativeEquilibrium make_equilateral_triangle(double g1, double g2, double g3) {
    Vorticities vort({g1, g2, g3});
    if (vort.total() == 0.0)
        throw ConfigError("equilateral triangle with Gamma = 0 has no rotation frequency");
    // side sqrt(3/pi) makes nu = Gamma/(pi s^2) = Gamma/3
    const double s = std::sqrt(3.0 / kPi);
    double px[3] = {0.0, s, s / 2.0};
    double py[3] = {0.0, 0.0, s * std::sqrt(3.0) / 2.0};
    Vec2 c = Vec2::Zero();
    for (int j = 0; j < 3; ++j) c += vort.gamma(j) * Vec2(px[j], py[j]);
    c /= vort.total();
    VecX z(6);
    for (int j = 0; j < 3; ++j) {
        z[2 * j] = px[j] - c[0];
        z[2 * j + 1] = py[j] - c[1];
    }
    return {z, vort.total() / 3.0, vort, EquilibriumKind::triangle, 0.0};
}

RhombusParams rhombus_params(double y) {
    if (!(y > 1.0 / std::sqrt(3.0)))
        throw ConfigError("rhombus: shape parameter must exceed 1/sqrt(3)");
    RhombusParams p;
    p.y = y;
    const double y2 = y * y;
    p.kappa = (3.0 * y2 - y2 * y2) / (3.0 * y2 - 1.0);
    p.nu = 0.5 + 2.0 * p.kappa / (y2 + 1.0);
    p.mu1 = (7.0 * y2 * y2 - 18.0 * y2 + 7.0) / (2.0 * (y2 + 1.0) * (3.0 * y2 - 1.0));
    p.mu2 = 2.0 * (y2 - 1.0) * (y2 + 2.0 * y - 1.0) * (y2 - 2.0 * y - 1.0) /
            ((y2 + 1.0) * (y2 + 1.0) * (3.0 * y2 - 1.0));
    return p;
}

RelativeEquilibrium make_rhombus(double y) {
    RhombusParams p = rhombus_params(y);
    if (p.kappa == 0.0)
        throw ConfigError("rhombus: kappa(y) = 0 leaves two vortices without strength");
    Vorticities vort({1.0, 1.0, p.kappa, p.kappa});
    const double s = 1.0 / std::sqrt(kPi);
    VecX z(8);
    z << -s, 0.0, s, 0.0, 0.0, -s * y, 0.0, s * y;
    return {z, p.nu, vort, EquilibriumKind::rhombus, y};
}

RelativeEquilibrium make_collinear_rotor(double rho) {
    if (rho <= 0.0)
        throw ConfigError("collinear rotor: rho must be positive");
    Vorticities vort({1.0, -0.5, -0.5});
    VecX z(6);
    z << 0.0, 0.0, rho, 0.0, -rho, 0.0;
    return {z, 3.0 / (4.0 * kPi * rho * rho), vort, EquilibriumKind::custom, rho};
}

EquilibriumFlags screen_equilibrium(const RelativeEquilibrium& eq) {
    EquilibriumFlags flags;
    const Vorticities& v = eq.vorticities;
    const double tol = 1e-12 * std::max(1.0, v.sum_of_squares());

    if (std::abs(v.total()) < tol) {
        flags.algebraic_degenerate = true;
        flags.note = "Gamma = 0";
        return flags;
    }
    if (std::abs(v.momentum()) < tol) {
        flags.algebraic_degenerate = true;
        flags.note = "L = 0";
        return flags;
    }
    if (eq.kind == EquilibriumKind::triangle) {
        // L = sum G_j^2 holds exactly when all three strengths coincide
        if (std::abs(v.momentum() - v.sum_of_squares()) < tol) {
            flags.algebraic_degenerate = true;
            flags.note = "all vorticities equal";
            return flags;
        }
        flags.lre_stable_screen = v.momentum() > 0.0 &&
                                  std::abs(10.0 * v.momentum() - v.sum_of_squares()) > tol;
        if (!flags.lre_stable_screen && v.momentum() > 0.0) flags.note = "10L = sum of squares";
        if (v.momentum() < 0.0) flags.note = "L < 0: spectrally unstable";
    }
    if (eq.kind == EquilibriumKind::rhombus) {
        RhombusParams p = rhombus_params(eq.shape_parameter);
        if (std::abs(p.y - 1.0) < 1e-12) {
            flags.algebraic_degenerate = true;
            flags.note = "regular 4-gon (lambda_2 = 1)";
        } else {
            flags.lre_stable_screen = std::abs(p.y - 1.0) < 0.25;  // stable window around the square
        }
    }
    if (eq.kind == EquilibriumKind::pair) flags.lre_stable_screen = true;
    return flags;
}

std::optional<std::vector<Complex>> predicted_multipliers(const RelativeEquilibrium& eq) {
    switch (eq.kind) {
        case EquilibriumKind::pair:
            return std::vector<Complex>{};  // the full monodromy is known; no nontrivial ones
        case EquilibriumKind::triangle: {
            // lambda_pm = exp(±(2pi/nu) sqrt(-L/3)) in the nu = Gamma/3 scaling;
            // complex sqrt lets L of either sign flow through one path.
            const double nu = eq.vorticities.total() / 3.0;
            Complex root = std::sqrt(Complex(-eq.vorticities.momentum() / 3.0, 0.0));
            Complex expo = (2.0 * kPi / nu) * root;
            return std::vector<Complex>{std::exp(expo), std::exp(-expo)};
        }
        case EquilibriumKind::rhombus: {
            RhombusParams p = rhombus_params(eq.shape_parameter);
            std::vector<Complex> out;
            for (double mu : {p.mu1, p.mu2}) {
                Complex root = std::sqrt(Complex(p.nu * p.nu - mu * mu, 0.0));
                Complex expo = Complex(0.0, 2.0 * kPi / p.nu) * root;
                out.push_back(std::exp(expo));
                out.push_back(std::exp(-expo));
            }
            return out;
        }
        default:
            return std::nullopt;
    }
}

Config equilibrium_to_config(const RelativeEquilibrium& eq) {
    Config cfg;
    cfg.set("equilibrium", to_string(eq.kind));
    cfg.set("gamma", eq.vorticities.gamma());
    std::vector<double> pos(eq.z0.data(), eq.z0.data() + eq.z0.size());
    cfg.set("positions", pos);
    cfg.set("nu", eq.nu);
    if (eq.shape_parameter != 0.0) cfg.set("shape_parameter", eq.shape_parameter);
    return cfg;
}

RelativeEquilibrium equilibrium_from_config(const Config& cfg) {
    EquilibriumKind kind = equilibrium_kind_from_string(cfg.get_string("equilibrium"));
    Vorticities vort(cfg.get_double_list("gamma"));
    std::vector<double> pos = cfg.get_double_list("positions");
    if (pos.size() != static_cast<std::size_t>(2 * vort.count()))
        throw ConfigError("equilibrium config: positions must hold 2N numbers");
    VecX z(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) z[i] = pos[i];
    RelativeEquilibrium eq{z, cfg.get_double("nu"), vort, kind,
                           cfg.get_double_or("shape_parameter", 0.0)};
    return eq;
}

}  // namespace vortexstab
