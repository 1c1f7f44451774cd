#pragma once

#include "vortexstab/hamiltonian.hpp"

#include <optional>

namespace vortexstab {

enum class EquilibriumKind { pair, triangle, rhombus, custom };

std::string to_string(EquilibriumKind k);
EquilibriumKind equilibrium_kind_from_string(const std::string& s);

/// A rigidly rotating configuration Z(t) = e^{-nu J_N t} z0 of the
/// whole-plane system, i.e. grad H_0(z0) + nu M_Gamma z0 = 0.
struct RelativeEquilibrium {
    VecX z0;
    double nu = 0.0;
    Vorticities vorticities;
    EquilibriumKind kind = EquilibriumKind::custom;
    double shape_parameter = 0.0;  ///< rhombus y; pair separation; 0 otherwise

    int n_vortices() const { return vorticities.count(); }
    double period() const { return 2.0 * 3.14159265358979323846 / std::abs(nu); }

    /// Radial rescaling z -> s z (nu scales as s^-2); multipliers over one
    /// period are invariant under it.
    RelativeEquilibrium rescaled(double s) const;
    /// Rescaled so |nu| = 1 and the orbit is 2 pi periodic.
    RelativeEquilibrium normalized() const { return rescaled(std::sqrt(std::abs(nu))); }
};

/// ||grad H_0(z0) + nu M_Gamma z0||; zero iff z0 rotates rigidly with
/// frequency nu.
double equilibrium_residual(const VecX& z0, double nu, const Vorticities& vort);
double equilibrium_residual(const RelativeEquilibrium& eq);

/// Least-squares frequency nu = -<grad H_0(z0), M z0> / |M z0|^2 (exact for a
/// true relative equilibrium).
double extract_frequency(const VecX& z0, const Vorticities& vort);

/// sum_j Gamma_j z0_j (must vanish for the catalog equilibria).
Vec2 center_of_vorticity(const VecX& z0, const Vorticities& vort);

/// Two vortices at distance D on the x-axis, zero centre of vorticity,
/// nu = Gamma / (pi D^2).  Gamma = 0 (a translating pair) is rejected.
RelativeEquilibrium make_vortex_pair(double gamma1, double gamma2, double separation);

/// Equilateral triangle scaled so nu = Gamma/3 (side sqrt(3/pi)); Gamma = 0
/// is rejected.
RelativeEquilibrium make_equilateral_triangle(double g1, double g2, double g3);

/// Rhombus of Example c): strengths (1, 1, kappa(y), kappa(y)) at
/// pi^{-1/2}(±1, 0), pi^{-1/2}(0, ±y) rotating with nu(y); needs y > 1/sqrt(3).
RelativeEquilibrium make_rhombus(double y);

/// Collinear rotor with Gamma = 0: strengths (1, -1/2, -1/2) at
/// 0, (±rho, 0); frequency 3/(4 pi rho^2).
RelativeEquilibrium make_collinear_rotor(double rho = 1.0);

struct RhombusParams {
    double y;
    double kappa;
    double nu;
    double mu1;
    double mu2;
};
RhombusParams rhombus_params(double y);

/// Degeneracy / stability pre-screen from the closed-form criteria.
struct EquilibriumFlags {
    bool algebraic_degenerate = false;  ///< L = 0, Gamma = 0, or a known degenerate shape
    bool lre_stable_screen = false;     ///< triangle screen: L > 0, not all equal, 10L != sum G^2
    std::string note;
};
EquilibriumFlags screen_equilibrium(const RelativeEquilibrium& eq);

/// Closed-form nontrivial Floquet multipliers where the catalog provides them:
/// pair -> empty set (the monodromy is known entirely, no nontrivial
/// multipliers), triangle -> e^{±(2pi/nu) sqrt(-L/3)} at nu = Gamma/3,
/// rhombus -> the four lambda_j^±(y).  nullopt for custom shapes.
std::optional<std::vector<Complex>> predicted_multipliers(const RelativeEquilibrium& eq);

Config equilibrium_to_config(const RelativeEquilibrium& eq);
RelativeEquilibrium equilibrium_from_config(const Config& cfg);

}  // namespace vortexstab
