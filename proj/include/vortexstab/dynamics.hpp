#pragma once

#include "vortexstab/hamiltonian.hpp"
#include "vortexstab/integrator.hpp"

namespace vortexstab {

/// Time integration of M_Gamma du/dt = J_N grad H_r(u).
struct Trajectory {
    std::vector<double> times;
    std::vector<VecX> states;     ///< u(t) at the sample times
    double energy_drift = 0.0;    ///< max |H_r(u(t)) - H_r(u(0))| over samples
    double min_separation = 0.0;  ///< smallest pairwise distance seen at samples
    bool ok = true;               ///< false when the drift exceeded the configured bound

    const VecX& final_state() const { return states.back(); }
};

struct VariationalResult {
    VecX state;                    ///< u(T)
    MatX fundamental;              ///< X(T), X(0) = id
    double energy_drift = 0.0;
    double min_separation = 0.0;
    double symplectic_defect = 0.0;  ///< |X^T M J X - M J| at T
};

struct FlowOptions {
    IntegratorOptions integrator;
    double energy_tolerance = 1e-9;  ///< drift above this marks the trajectory failed
    int samples = 0;                 ///< extra interior samples (0: endpoints only)
};

/// phi_r(T, u0) with energy monitoring; samples are equispaced in time.
Trajectory flow(const ScaledHamiltonian& sh, const VecX& u0, double T,
                const FlowOptions& opts = {});

/// Convenience: final state only.
VecX flow_state(const ScaledHamiltonian& sh, const VecX& u0, double T,
                const IntegratorOptions& opts = {});

/// Joint integration of the state and the fundamental matrix of
/// dv/dt = M^{-1} J_N hess H_r(u(t)) v over one step sequence.
VariationalResult variational_flow(const ScaledHamiltonian& sh, const VecX& u0, double T,
                                   const IntegratorOptions& opts = {});

/// First root of t -> event(u(t)) in the window [t_lo, t_hi] selected by
/// `pick`: integrates once, then locates the root on the dense interpolant to
/// ~1e-13 absolute in t.  `slope_sign`: if nonzero, only crossings whose
/// d(event)/dt has this sign count.  Throws SectionMissError when no crossing
/// lies in the window.
double locate_event(const ScaledHamiltonian& sh, const VecX& u0, double t_lo, double t_hi,
                    const std::function<double(const VecX&)>& event, int slope_sign = 0,
                    bool nearest_zero = false, const IntegratorOptions& opts = {});

/// Smallest pairwise distance of a configuration.
double min_pairwise_distance(const VecX& z, int n_vortices);

}  // namespace vortexstab
