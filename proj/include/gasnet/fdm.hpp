// Cell-centered implicit finite differences on nodal values. Each cell
// contributes a continuity and a momentum row built from its four corners;
// friction is linearized around the previous time level.

#ifndef GASNET_FDM_HPP
#define GASNET_FDM_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

#include "gasnet/linear_solver.hpp"
#include "gasnet/network.hpp"
#include "gasnet/sas.hpp"
#include "gasnet/steady.hpp"

namespace gasnet {

/// Normalized nodal values of one pipeline, N + 1 entries each.
struct FdmPipeState {
  Eigen::VectorXd p;
  Eigen::VectorXd q;
};

struct FdmState {
  std::vector<FdmPipeState> pipes;
  long step = 0;
};

/// Fixed data of an FDM run: the grid is the pipeline's own dL divided by
/// `refine_x`. Unknowns are (p_i, q_i) interleaved per node, pipelines in
/// order.
struct FdmContext {
  FdmContext(const GasNetwork& net, double dT, int refine_x = 1);

  const GasNetwork* net;
  double dT;
  int refine_x;
  std::vector<int> cells;      // per pipeline
  std::vector<double> dL;      // per pipeline [m]
  std::vector<int> offsets;    // first column per pipeline
  std::vector<NormalizedPipeConstants<double>> constants;
  std::vector<NodeAttachments> attach;
  int size = 0;

  int column(int pipe, int node, Field field) const {
    return offsets[pipe] + 2 * node + (field == Field::Flow ? 1 : 0);
  }
};

FdmState fdm_initial_state(const FdmContext& ctx, const SteadyState& steady);

struct FdmSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
};

/// System for the step from t to t + dT. Rows: two per cell in pipeline
/// order, then node rows (supply pressure, demand flow, junction pressure
/// equalities and mass balance) in node order. Throws DivergenceError on a
/// nonpositive pressure sum in the friction linearization.
FdmSystem fdm_assemble_step(const FdmContext& ctx, const FdmState& state, double t);

/// Solves the step system and returns the state at the new time level.
FdmState fdm_step(const FdmContext& ctx, const FdmSystem& system, SparseLuSolver& solver,
                  long next_step);

}  // namespace gasnet

#endif  // GASNET_FDM_HPP
