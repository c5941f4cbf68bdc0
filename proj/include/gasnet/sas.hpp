// Semi-analytical solution engine. Each cell carries bivariate polynomials in
// the normalized cell coordinates (dx, dt) in [0,1]^2, expanded in powers of
// the friction embedding parameter s. Coefficients are fixed by matching the
// PDE term by term and by collocating initial, seam and node constraints.

#ifndef GASNET_SAS_HPP
#define GASNET_SAS_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gasnet/linear_solver.hpp"
#include "gasnet/network.hpp"
#include "gasnet/polynomial.hpp"
#include "gasnet/step_state.hpp"

namespace gasnet {

/// Per-pipeline constants of the normalized PDE
///   dp/dt + C1 dq/dx = 0,   dq/dt + C2 dp/dx + C3 q|q|/p = 0
/// on a dL x dT cell.
template <typename Scalar>
struct NormalizedPipeConstants {
  Scalar C1{};
  Scalar C2{};
  Scalar C3{};
};

template <typename Scalar = double>
NormalizedPipeConstants<Scalar> compute_constants(const PipelineSpec& pipe,
                                                  const GasConstants& gas,
                                                  Scalar dT, Scalar dL) {
  const Scalar v(gas.v), p_b(gas.p_b), q_b(gas.q_b);
  const Scalar S(pipe.S), d(pipe.d), lambda(pipe.lambda);
  NormalizedPipeConstants<Scalar> c;
  c.C1 = v * v * q_b * dT / (S * p_b * dL);
  c.C2 = S * p_b * dT / (q_b * dL);
  c.C3 = lambda * v * v * q_b * dT / (Scalar(2) * d * S * p_b);
  return c;
}

/// Constants on the pipeline's own cell length.
template <typename Scalar = double>
NormalizedPipeConstants<Scalar> compute_constants(const PipelineSpec& pipe,
                                                  const GasConstants& gas,
                                                  Scalar dT) {
  return compute_constants<Scalar>(pipe, gas, dT, Scalar(pipe.dL));
}

/// Uniform collocation abscissae: dx_k = k / Mx (initial values) and
/// dt_k = k / K with K = M - Mx (node and seam constraints).
struct CollocationLayout {
  int M = 0;
  int Mx = 0;
  int K = 0;
  std::vector<double> dx;
  std::vector<double> dt;
};

/// Throws ConfigError unless 0 < M - Mx < M.
CollocationLayout layout_collocation(int M, int Mx);

/// Column numbering of the per-layer unknowns: pipelines in order, cells in
/// order, then all p coefficients followed by all q coefficients, each by
/// basis index 1..size-1 (the constant term is fixed by the initial state).
class UnknownIndexMap {
public:
  UnknownIndexMap(std::vector<int> cells_per_pipe, int M);

  int order() const { return M_; }
  int per_cell() const { return 2 * (basis_size_ - 1); }  // M (M + 3)
  int size() const { return total_; }
  int pipes() const { return static_cast<int>(cells_.size()); }
  int cells(int pipe) const { return cells_[pipe]; }

  /// Column of basis coefficient k >= 1 of the given field.
  int column(int pipe, int cell, Field field, int k) const {
    return offsets_[pipe] + cell * per_cell() +
           (field == Field::Flow ? basis_size_ - 1 : 0) + (k - 1);
  }

private:
  int M_;
  int basis_size_;
  std::vector<int> cells_;
  std::vector<int> offsets_;
  int total_ = 0;
};

UnknownIndexMap count_and_index(const GasNetwork& net, int M);

/// Polynomial coefficients of one cell: rows follow MonomialBasis, column r
/// holds the s^r layer.
struct CellCoeffTensor {
  Eigen::MatrixXd p;
  Eigen::MatrixXd q;
};

using NetworkTensors = std::vector<std::vector<CellCoeffTensor>>;  // [pipe][cell]

enum class RowKind { Continuity, Momentum, Initial, Seam, Supply, Demand, Junction };

const char* to_string(RowKind kind);

/// Origin of one assembled row. For cell rows `entity` is the pipeline and
/// `cell` the cell; for node rows `entity` is the node and `cell` is -1.
/// `point` is the collocation point (or monomial ordinal for PDE rows).
struct RowTag {
  RowKind kind;
  int entity;
  int cell;
  int point;
};

enum class SasScheme { SAS1, SAS2 };

/// Everything about a network that stays fixed during a run.
struct AssemblyContext {
  AssemblyContext(const GasNetwork& net, int M, int Mx, double dT);

  const GasNetwork* net;
  MonomialBasis basis;
  CollocationLayout layout;
  UnknownIndexMap index;
  std::vector<NormalizedPipeConstants<double>> constants;
  std::vector<NodeAttachments> attach;
  double dT;
};

/// Dense square system A c = b with row provenance.
struct AssembledSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<RowTag> rows;
};

/// Sequential row emitter. With `A == nullptr` only the right-hand side is
/// produced, which is how layers reuse a factored matrix.
class RowWriter {
public:
  RowWriter(Eigen::MatrixXd* A, Eigen::VectorXd& b, std::vector<RowTag>* tags)
      : A_(A), b_(b), tags_(tags) {}

  void open(RowTag tag) {
    ++row_;
    if (tags_) tags_->push_back(tag);
  }
  void coeff(int col, double value) {
    if (A_) (*A_)(row_, col) += value;
  }
  void rhs(double value) { b_(row_) += value; }
  bool has_matrix() const { return A_ != nullptr; }
  int rows_written() const { return row_ + 1; }

private:
  Eigen::MatrixXd* A_;
  Eigen::VectorXd& b_;
  std::vector<RowTag>* tags_;
  int row_ = -1;
};

/// Layer-0 data a cell needs while rows are generated.
struct CellFixed {
  double p00 = 0.0;  // P_ini(0)
  double q00 = 0.0;  // Q_ini(0)
};

/// Frictionless PDE rows, also the continuity rows of every scheme:
/// for 1 <= m <= M, 0 <= n < m, a continuity then a momentum row.
void assemble_pde_rows_s0(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell);

/// SAS-1 rows for layer r >= 1. The momentum rows match the s^r coefficient
/// of p dq/dt + C2 p dp/dx + s C3 q^2 = 0; `layers` holds layers 0..r-1 of
/// the cell (columns beyond r-1 are ignored).
void assemble_pde_rows_sas1(RowWriter& w, const AssemblyContext& ctx, int pipe,
                            int cell, int r, const CellCoeffTensor& layers);

/// SAS-2 rows for layer r >= 0: linear momentum with right-hand side
/// -C3 C4 q_{r-1} (zero at r = 0).
void assemble_pde_rows_sas2(RowWriter& w, const AssemblyContext& ctx, int pipe,
                            int cell, double C4, int r, const CellCoeffTensor* layers);

/// |q(0) + q(1)| / (p(0) + p(1)) over the cell's initial profiles, so the
/// linearized friction opposes the flow in either direction. Throws
/// DivergenceError when the pressure sum is not positive.
double compute_C4(const CellState& cell);

void assemble_initial_rows(RowWriter& w, const AssemblyContext& ctx, int pipe,
                           int cell, const CellState& ini, int r);

void assemble_seam_rows(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell,
                        const CellFixed& left, const CellFixed& right, int r);

/// Rows of a supply or demand node: one per attached pipeline end and
/// collocation instant. `t` is the step start time [s].
void assemble_supply_demand_rows(RowWriter& w, const AssemblyContext& ctx, int node,
                                 const std::vector<std::vector<CellFixed>>& fixed,
                                 double t, int r);

/// Per collocation instant: pressure equalities against an anchor end (the
/// first inlet, else the first attached end) and one mass-balance row.
void assemble_junction_rows(RowWriter& w, const AssemblyContext& ctx, int node,
                            const std::vector<std::vector<CellFixed>>& fixed,
                            double t, int r);

/// Full system for one layer. The PDE block uses the s^0 rows when
/// `sas1_layers` is null, otherwise the SAS-1 rows for layer r against
/// those lower layers. With SAS-2 pass `c4` to get the friction RHS.
/// Row order: PDE rows per cell, initial rows, seam rows, node rows.
struct LayerInputs {
  SasScheme scheme = SasScheme::SAS2;
  int r = 0;
  const StepState* state = nullptr;
  const NetworkTensors* lower = nullptr;          // layers 0..r-1, or null at r = 0
  const std::vector<std::vector<double>>* c4 = nullptr;  // SAS-2 only
  double t = 0.0;
};

void assemble_layer(RowWriter& w, const AssemblyContext& ctx, const LayerInputs& in);

AssembledSystem assemble_system(const AssemblyContext& ctx, const LayerInputs& in);

/// Writes A and b as text: a header line `rows cols nnz`, then one
/// `row col value` line per nonzero of A, then one `row cols value` line per
/// nonzero of b (b is stored as the extra column `cols`). Indices are 0-based.
void write_system_dump(std::ostream& os, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

struct LayerStats {
  int layers_solved = 0;              // including layer 0
  std::vector<double> rhs_norms;      // ||b^(r)||_inf for r = 1..; the last may trigger the stop
  std::vector<double> layer_norms;    // ||c^(r)||_inf per solved layer
};

struct SasOptions {
  SasScheme scheme = SasScheme::SAS2;
  int R_order = 10;
  double eps_b = 1e-12;
};

/// Holds the factorizations across layers and steps. SAS-2 factors its one
/// matrix on first use; SAS-1 factors the layer-0 matrix and the layer-1
/// matrix on every step, reusing the latter for r > 1.
class LayerSolver {
public:
  LayerSolver(const AssemblyContext& ctx, SasOptions opts,
              FactorizationCounter* counter);

  /// Solves layers 0..R for one step starting at time t.
  NetworkTensors solve_layers(const StepState& state, double t,
                              LayerStats* stats = nullptr);

  double condition_estimate() const { return condition_; }
  const SasOptions& options() const { return opts_; }

private:
  Eigen::VectorXd rhs(const LayerInputs& in) const;

  const AssemblyContext& ctx_;
  SasOptions opts_;
  DenseLuSolver lu0_;
  DenseLuSolver lu1_;
  double condition_ = 0.0;
};

/// Sum over layers with weights s^r, then nested evaluation at (dx, dt).
struct PQ {
  double p;
  double q;
};
PQ evaluate_solution(const MonomialBasis& basis, const CellCoeffTensor& c, double dx,
                     double dt, double s = 1.0);

/// Initial profiles for the next step: the solution at dt = 1, s = 1, as
/// univariate polynomials of degree <= M in dx.
CellState advance_initial_profile(const MonomialBasis& basis, const CellCoeffTensor& c);

StepState advance_state(const MonomialBasis& basis, const NetworkTensors& tensors);

}  // namespace gasnet

#endif  // GASNET_SAS_HPP
