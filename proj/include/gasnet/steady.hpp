// Steady operating state at t = 0, used as the simulation initial value.

#ifndef GASNET_STEADY_HPP
#define GASNET_STEADY_HPP

#include <vector>

#include "gasnet/network.hpp"

namespace gasnet {

struct StepState;

/// Isothermal steady pressure along a pipeline:
///   p(x) = sqrt(p_in^2 - slope * x),  slope = lambda v^2 q0^2 / (d S^2).
class SteadyProfile {
public:
  SteadyProfile() = default;
  SteadyProfile(double p_in, double slope) : p_in_(p_in), slope_(slope) {}

  double operator()(double x) const;
  double inlet_pressure() const { return p_in_; }
  double slope() const { return slope_; }

private:
  double p_in_ = 0.0;
  double slope_ = 0.0;
};

/// Throws SteadyStateError if the pressure would vanish anywhere on [0, L]
/// or if p_in <= 0 or q0 < 0.
SteadyProfile steady_pressure_profile(const PipelineSpec& pipe,
                                      const GasConstants& gas, double p_in,
                                      double q0);

/// Per-pipeline mass flow (positive from inlet to outlet) balancing the node
/// signals at time t0. Requires a tree with exactly one supply node; throws
/// SteadyStateError otherwise. Flows against the pipeline direction are
/// returned as negative numbers, not rejected here.
std::vector<double> steady_flows(const GasNetwork& net, double t0 = 0.0);

struct SteadyState {
  std::vector<double> flows;           // per pipeline [kg/s]
  std::vector<double> node_pressures;  // per node [Pa]
  std::vector<SteadyProfile> profiles; // per pipeline, x measured from inlet
};

/// Flows plus pressures propagated from the supply through the tree.
/// Throws SteadyStateError on negative flows or infeasible profiles.
SteadyState solve_steady(const GasNetwork& net, double t0 = 0.0);

/// Normalized per-cell initial profiles on the network's SAS grid:
/// P_ini(dx) = p((I + dx) dL) / p_b and Q_ini = q0 / q_b for cell I.
/// Include gasnet/step_state.hpp to use the result.
StepState build_initial_state(const GasNetwork& net, const SteadyState& steady);

}  // namespace gasnet

#endif  // GASNET_STEADY_HPP
