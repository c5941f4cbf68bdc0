#include "gasnet/sas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "gasnet/error.hpp"

namespace gasnet {

CollocationLayout layout_collocation(int M, int Mx) {
  if (!(M - Mx > 0 && M - Mx < M)) {
    std::ostringstream os;
    os << "balance condition 0 < M - Mx < M violated (M = " << M << ", Mx = " << Mx << ")";
    throw ConfigError("sim.Mx", os.str());
  }
  CollocationLayout out;
  out.M = M;
  out.Mx = Mx;
  out.K = M - Mx;
  for (int k = 1; k <= Mx; ++k) out.dx.push_back(static_cast<double>(k) / Mx);
  for (int k = 1; k <= out.K; ++k) out.dt.push_back(static_cast<double>(k) / out.K);
  return out;
}

UnknownIndexMap::UnknownIndexMap(std::vector<int> cells_per_pipe, int M)
    : M_(M), basis_size_((M + 1) * (M + 2) / 2), cells_(std::move(cells_per_pipe)) {
  offsets_.reserve(cells_.size());
  for (int n : cells_) {
    offsets_.push_back(total_);
    total_ += n * per_cell();
  }
}

UnknownIndexMap count_and_index(const GasNetwork& net, int M) {
  std::vector<int> cells;
  cells.reserve(net.pipelines.size());
  for (const auto& pipe : net.pipelines) cells.push_back(pipe.cells());
  return UnknownIndexMap(std::move(cells), M);
}

const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::Continuity: return "continuity";
    case RowKind::Momentum: return "momentum";
    case RowKind::Initial: return "initial";
    case RowKind::Seam: return "seam";
    case RowKind::Supply: return "supply";
    case RowKind::Demand: return "demand";
    case RowKind::Junction: return "junction";
  }
  return "?";
}

AssemblyContext::AssemblyContext(const GasNetwork& network, int M, int Mx, double step)
    : net(&network),
      basis(M),
      layout(layout_collocation(M, Mx)),
      index(count_and_index(network, M)),
      attach(attachments(network)),
      dT(step) {
  constants.reserve(network.pipelines.size());
  for (const auto& pipe : network.pipelines)
    constants.push_back(compute_constants<double>(pipe, network.constants, dT));
}

namespace {

// Adds sign * (value of `field` of the cell at (dx, dt)) to the current row.
// The fixed constant term moves to the right-hand side on layer 0.
void add_eval(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell,
              Field field, double dx, double dt, double sign, double fixed00, int r) {
  if (w.has_matrix()) {
    const auto& basis = ctx.basis;
    for (int k = 1; k < basis.size(); ++k) {
      const double mono =
          std::pow(dx, basis.x_power(k)) * std::pow(dt, basis.t_power(k));
      if (mono != 0.0) w.coeff(ctx.index.column(pipe, cell, field, k), sign * mono);
    }
  }
  if (r == 0) w.rhs(-sign * fixed00);
}

double fixed_of(const CellFixed& f, Field field) {
  return field == Field::Pressure ? f.p00 : f.q00;
}

// Shared shape of every PDE block: continuity and momentum row per (m, n).
// `momentum_rhs(a, b)` gives the right-hand side at monomial dx^a dt^b.
template <typename MomentumCoeffs, typename MomentumRhs>
void pde_rows(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell,
              MomentumCoeffs&& momentum_coeffs, MomentumRhs&& momentum_rhs) {
  const auto& basis = ctx.basis;
  const auto& C = ctx.constants[pipe];
  const int M = basis.order();
  int ordinal = 0;
  for (int m = 1; m <= M; ++m) {
    for (int n = 0; n < m; ++n, ++ordinal) {
      w.open({RowKind::Continuity, pipe, cell, ordinal});
      if (w.has_matrix()) {
        w.coeff(ctx.index.column(pipe, cell, Field::Pressure, basis.index(n, m - n)), m - n);
        w.coeff(ctx.index.column(pipe, cell, Field::Flow, basis.index(n + 1, m - n - 1)),
                (n + 1) * C.C1);
      }
      w.open({RowKind::Momentum, pipe, cell, ordinal});
      if (w.has_matrix()) momentum_coeffs(n, m - n - 1);
      w.rhs(momentum_rhs(n, m - n - 1));
    }
  }
}

void linear_momentum(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell,
                     int a, int b) {
  const auto& basis = ctx.basis;
  const auto& C = ctx.constants[pipe];
  w.coeff(ctx.index.column(pipe, cell, Field::Flow, basis.index(a, b + 1)), b + 1);
  w.coeff(ctx.index.column(pipe, cell, Field::Pressure, basis.index(a + 1, b)),
          (a + 1) * C.C2);
}

}  // namespace

void assemble_pde_rows_s0(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell) {
  pde_rows(
      w, ctx, pipe, cell,
      [&](int a, int b) { linear_momentum(w, ctx, pipe, cell, a, b); },
      [](int, int) { return 0.0; });
}

void assemble_pde_rows_sas2(RowWriter& w, const AssemblyContext& ctx, int pipe,
                            int cell, double C4, int r, const CellCoeffTensor* layers) {
  const double k = ctx.constants[pipe].C3 * C4;
  const auto& basis = ctx.basis;
  pde_rows(
      w, ctx, pipe, cell,
      [&](int a, int b) { linear_momentum(w, ctx, pipe, cell, a, b); },
      [&](int a, int b) {
        if (r == 0 || layers == nullptr) return 0.0;
        return -k * layers->q(basis.index(a, b), r - 1);
      });
}

void assemble_pde_rows_sas1(RowWriter& w, const AssemblyContext& ctx, int pipe,
                            int cell, int r, const CellCoeffTensor& layers) {
  const auto& basis = ctx.basis;
  const auto& C = ctx.constants[pipe];
  const int M = basis.order();
  const Eigen::VectorXd p0 = layers.p.col(0);
  const Eigen::VectorXd q0 = layers.q.col(0);

  Eigen::VectorXd g0;
  if (w.has_matrix())
    g0 = derivative_t(basis, q0) + C.C2 * derivative_x(basis, p0);

  // Known part of the s^r coefficient: cross terms between layers 1..r-1
  // and the friction convolution at r-1.
  Eigen::VectorXd known = Eigen::VectorXd::Zero(basis.size());
  for (int k = 1; k <= r - 1; ++k) {
    const Eigen::VectorXd pk = layers.p.col(k);
    const Eigen::VectorXd dq = derivative_t(basis, Eigen::VectorXd(layers.q.col(r - k))) +
                               C.C2 * derivative_x(basis, Eigen::VectorXd(layers.p.col(r - k)));
    known += multiply_truncated(basis, pk, dq, M - 1);
  }
  for (int k = 0; k <= r - 1; ++k) {
    known += C.C3 * multiply_truncated(basis, Eigen::VectorXd(layers.q.col(k)),
                                       Eigen::VectorXd(layers.q.col(r - 1 - k)), M - 1);
  }

  auto coeff_at = [&](const Eigen::VectorXd& c, int n, int j) {
    return (n < 0 || j < 0 || n + j > M) ? 0.0 : c(basis.index(n, j));
  };

  pde_rows(
      w, ctx, pipe, cell,
      [&](int a, int b) {
        for (int k = 1; k < basis.size(); ++k) {
          const int nk = basis.x_power(k), jk = basis.t_power(k);
          // p0 * d/dt of q_r
          if (jk >= 1) {
            const double v = jk * coeff_at(p0, a - nk, b - jk + 1);
            if (v != 0.0) w.coeff(ctx.index.column(pipe, cell, Field::Flow, k), v);
          }
          // C2 p0 * d/dx of p_r, plus p_r * (dq0/dt + C2 dp0/dx)
          double v = coeff_at(g0, a - nk, b - jk);
          if (nk >= 1) v += C.C2 * nk * coeff_at(p0, a - nk + 1, b - jk);
          if (v != 0.0) w.coeff(ctx.index.column(pipe, cell, Field::Pressure, k), v);
        }
      },
      [&](int a, int b) { return -known(basis.index(a, b)); });
}

double compute_C4(const CellState& cell) {
  const double psum = cell.p(0.0) + cell.p(1.0);
  if (!(psum > 0.0))
    throw DivergenceError("degenerate cell state: nonpositive pressure sum");
  return std::abs(cell.q(0.0) + cell.q(1.0)) / psum;
}

void assemble_initial_rows(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell,
                           const CellState& ini, int r) {
  const CellFixed fixed{ini.p(0.0), ini.q(0.0)};
  const auto& dx = ctx.layout.dx;
  for (int k = 0; k < static_cast<int>(dx.size()); ++k) {
    for (Field field : {Field::Pressure, Field::Flow}) {
      w.open({RowKind::Initial, pipe, cell, k});
      add_eval(w, ctx, pipe, cell, field, dx[k], 0.0, 1.0, fixed_of(fixed, field), r);
      if (r == 0) w.rhs(field == Field::Pressure ? ini.p(dx[k]) : ini.q(dx[k]));
    }
  }
}

void assemble_seam_rows(RowWriter& w, const AssemblyContext& ctx, int pipe, int cell,
                        const CellFixed& left, const CellFixed& right, int r) {
  const auto& dt = ctx.layout.dt;
  for (int k = 0; k < static_cast<int>(dt.size()); ++k) {
    for (Field field : {Field::Pressure, Field::Flow}) {
      w.open({RowKind::Seam, pipe, cell, k});
      add_eval(w, ctx, pipe, cell, field, 1.0, dt[k], 1.0, fixed_of(left, field), r);
      add_eval(w, ctx, pipe, cell + 1, field, 0.0, dt[k], -1.0, fixed_of(right, field), r);
    }
  }
}

void assemble_supply_demand_rows(RowWriter& w, const AssemblyContext& ctx, int node,
                                 const std::vector<std::vector<CellFixed>>& fixed,
                                 double t, int r) {
  const auto& net = *ctx.net;
  const auto& spec = net.nodes[node];
  const auto& att = ctx.attach[node];
  const auto& dt = ctx.layout.dt;
  const bool supply = spec.kind == NodeKind::Supply;
  const auto& ends = supply ? att.inlets : att.outlets;
  const double base = supply ? net.constants.p_b : net.constants.q_b;
  for (int k = 0; k < static_cast<int>(dt.size()); ++k) {
    const double target = r == 0 ? signal_eval(spec.signal, t + dt[k] * ctx.dT) / base : 0.0;
    for (int e : ends) {
      w.open({supply ? RowKind::Supply : RowKind::Demand, node, -1, k});
      if (supply) {
        add_eval(w, ctx, e, 0, Field::Pressure, 0.0, dt[k], 1.0, fixed[e][0].p00, r);
      } else {
        const int last = ctx.index.cells(e) - 1;
        add_eval(w, ctx, e, last, Field::Flow, 1.0, dt[k], 1.0, fixed[e][last].q00, r);
      }
      w.rhs(target);
    }
  }
}

void assemble_junction_rows(RowWriter& w, const AssemblyContext& ctx, int node,
                            const std::vector<std::vector<CellFixed>>& fixed,
                            double t, int r) {
  const auto& net = *ctx.net;
  const auto& att = ctx.attach[node];
  if (att.count() < 2)
    throw ConfigError("node[" + net.nodes[node].id + "]",
                      "junction must attach at least 2 pipeline ends");
  struct End {
    int pipe;
    int cell;
    double dx;
    double sign;  // +1 when flow through this end enters the node
  };
  std::vector<End> ends;
  for (int e : att.inlets) ends.push_back({e, 0, 0.0, -1.0});
  for (int e : att.outlets) ends.push_back({e, ctx.index.cells(e) - 1, 1.0, 1.0});
  const End& anchor = ends.front();

  const auto& dt = ctx.layout.dt;
  for (int k = 0; k < static_cast<int>(dt.size()); ++k) {
    for (std::size_t i = 1; i < ends.size(); ++i) {
      const End& other = ends[i];
      w.open({RowKind::Junction, node, -1, k});
      add_eval(w, ctx, anchor.pipe, anchor.cell, Field::Pressure, anchor.dx, dt[k], 1.0,
               fixed[anchor.pipe][anchor.cell].p00, r);
      add_eval(w, ctx, other.pipe, other.cell, Field::Pressure, other.dx, dt[k], -1.0,
               fixed[other.pipe][other.cell].p00, r);
    }
    // Outlet ends deliver gas into the node, inlet ends draw it out.
    w.open({RowKind::Junction, node, -1, k});
    for (const End& end : ends)
      add_eval(w, ctx, end.pipe, end.cell, Field::Flow, end.dx, dt[k], end.sign,
               fixed[end.pipe][end.cell].q00, r);
    if (r == 0)
      w.rhs(signal_eval(net.nodes[node].signal, t + dt[k] * ctx.dT) / net.constants.q_b);
  }
}

namespace {

std::vector<std::vector<CellFixed>> fixed_values(const StepState& state) {
  std::vector<std::vector<CellFixed>> out(state.pipes.size());
  for (std::size_t e = 0; e < state.pipes.size(); ++e) {
    out[e].reserve(state.pipes[e].size());
    for (const auto& cell : state.pipes[e]) out[e].push_back({cell.p(0.0), cell.q(0.0)});
  }
  return out;
}

}  // namespace

void assemble_layer(RowWriter& w, const AssemblyContext& ctx, const LayerInputs& in) {
  const auto& state = *in.state;
  const auto fixed = fixed_values(state);
  const int pipes = ctx.index.pipes();

  for (int e = 0; e < pipes; ++e) {
    for (int i = 0; i < ctx.index.cells(e); ++i) {
      const CellCoeffTensor* lower = in.lower ? &(*in.lower)[e][i] : nullptr;
      if (in.scheme == SasScheme::SAS2) {
        const double c4 = in.c4 ? (*in.c4)[e][i] : 0.0;
        assemble_pde_rows_sas2(w, ctx, e, i, c4, in.r, lower);
      } else if (in.r == 0) {
        assemble_pde_rows_s0(w, ctx, e, i);
      } else {
        assemble_pde_rows_sas1(w, ctx, e, i, in.r, *lower);
      }
    }
  }
  for (int e = 0; e < pipes; ++e)
    for (int i = 0; i < ctx.index.cells(e); ++i)
      assemble_initial_rows(w, ctx, e, i, state.pipes[e][i], in.r);
  for (int e = 0; e < pipes; ++e)
    for (int i = 0; i + 1 < ctx.index.cells(e); ++i)
      assemble_seam_rows(w, ctx, e, i, fixed[e][i], fixed[e][i + 1], in.r);
  for (int v = 0; v < static_cast<int>(ctx.net->nodes.size()); ++v) {
    if (ctx.net->nodes[v].kind == NodeKind::Junction)
      assemble_junction_rows(w, ctx, v, fixed, in.t, in.r);
    else
      assemble_supply_demand_rows(w, ctx, v, fixed, in.t, in.r);
  }
}

AssembledSystem assemble_system(const AssemblyContext& ctx, const LayerInputs& in) {
  const int n = ctx.index.size();
  AssembledSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.b = Eigen::VectorXd::Zero(n);
  sys.rows.reserve(n);
  RowWriter w(&sys.A, sys.b, &sys.rows);
  assemble_layer(w, ctx, in);
  if (w.rows_written() != n) {
    std::ostringstream os;
    os << "assembled " << w.rows_written() << " rows for " << n << " unknowns";
    throw ConfigError("network", os.str());
  }
  return sys;
}

void write_system_dump(std::ostream& os, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  long nnz = 0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) ++nnz;
  os << A.rows() << ' ' << A.cols() << ' ' << nnz << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
        os << i << ' ' << j << ' ' << buf << '\n';
      }
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b(i) != 0.0) {
      std::snprintf(buf, sizeof buf, "%.17g", b(i));
      os << i << ' ' << A.cols() << ' ' << buf << '\n';
    }
}

LayerSolver::LayerSolver(const AssemblyContext& ctx, SasOptions opts,
                         FactorizationCounter* counter)
    : ctx_(ctx), opts_(opts), lu0_(counter), lu1_(counter) {}

Eigen::VectorXd LayerSolver::rhs(const LayerInputs& in) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ctx_.index.size());
  RowWriter w(nullptr, b, nullptr);
  assemble_layer(w, ctx_, in);
  return b;
}

NetworkTensors LayerSolver::solve_layers(const StepState& state, double t,
                                         LayerStats* stats) {
  const auto& basis = ctx_.basis;
  const auto& index = ctx_.index;
  const int R = opts_.R_order;

  NetworkTensors T(index.pipes());
  std::vector<std::vector<double>> c4(index.pipes());
  for (int e = 0; e < index.pipes(); ++e) {
    T[e].resize(index.cells(e));
    for (int i = 0; i < index.cells(e); ++i) {
      auto& c = T[e][i];
      c.p = Eigen::MatrixXd::Zero(basis.size(), R + 1);
      c.q = Eigen::MatrixXd::Zero(basis.size(), R + 1);
      c.p(0, 0) = state.pipes[e][i].p(0.0);
      c.q(0, 0) = state.pipes[e][i].q(0.0);
      if (opts_.scheme == SasScheme::SAS2) c4[e].push_back(compute_C4(state.pipes[e][i]));
    }
  }

  auto scatter = [&](const Eigen::VectorXd& c, int r) {
    if (!c.allFinite()) throw DivergenceError("non-finite layer solution");
    for (int e = 0; e < index.pipes(); ++e)
      for (int i = 0; i < index.cells(e); ++i)
        for (int k = 1; k < basis.size(); ++k) {
          T[e][i].p(k, r) = c(index.column(e, i, Field::Pressure, k));
          T[e][i].q(k, r) = c(index.column(e, i, Field::Flow, k));
        }
    if (stats) stats->layer_norms.push_back(c.lpNorm<Eigen::Infinity>());
  };

  LayerInputs in;
  in.scheme = opts_.scheme;
  in.state = &state;
  in.c4 = opts_.scheme == SasScheme::SAS2 ? &c4 : nullptr;
  in.t = t;

  Eigen::VectorXd b;
  if (opts_.scheme == SasScheme::SAS1 || !lu0_.ready()) {
    AssembledSystem sys = assemble_system(ctx_, in);
    lu0_.factorize(sys.A);
    condition_ = std::max(condition_, lu0_.condition_estimate());
    b = std::move(sys.b);
  } else {
    b = rhs(in);
  }
  if (!b.allFinite()) throw DivergenceError("non-finite right-hand side at layer 0");
  scatter(lu0_.solve(b), 0);
  if (stats) stats->layers_solved = 1;

  in.lower = &T;
  for (int r = 1; r <= R; ++r) {
    in.r = r;
    b = rhs(in);
    const double norm = b.lpNorm<Eigen::Infinity>();
    if (stats) stats->rhs_norms.push_back(norm);
    if (!std::isfinite(norm))
      throw DivergenceError("non-finite right-hand side at layer " + std::to_string(r));
    if (norm < opts_.eps_b) break;

    const DenseLuSolver* lu = &lu0_;
    if (opts_.scheme == SasScheme::SAS1) {
      if (r == 1) {
        AssembledSystem sys = assemble_system(ctx_, in);
        lu1_.factorize(sys.A);
        condition_ = std::max(condition_, lu1_.condition_estimate());
      }
      lu = &lu1_;
    }
    scatter(lu->solve(b), r);
    if (stats) stats->layers_solved = r + 1;
  }
  return T;
}

PQ evaluate_solution(const MonomialBasis& basis, const CellCoeffTensor& c, double dx,
                     double dt, double s) {
  Eigen::VectorXd cp = Eigen::VectorXd::Zero(basis.size());
  Eigen::VectorXd cq = Eigen::VectorXd::Zero(basis.size());
  for (Eigen::Index r = c.p.cols() - 1; r >= 0; --r) {
    cp = cp * s + c.p.col(r);
    cq = cq * s + c.q.col(r);
  }
  return {evaluate(basis, cp, dx, dt), evaluate(basis, cq, dx, dt)};
}

CellState advance_initial_profile(const MonomialBasis& basis, const CellCoeffTensor& c) {
  const int M = basis.order();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(M + 1);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(M + 1);
  const Eigen::VectorXd sp = c.p.rowwise().sum();
  const Eigen::VectorXd sq = c.q.rowwise().sum();
  for (int n = 0; n <= M; ++n)
    for (int j = 0; n + j <= M; ++j) {
      p(n) += sp(basis.index(n, j));
      q(n) += sq(basis.index(n, j));
    }
  return {CellProfile::polynomial(std::move(p)), CellProfile::polynomial(std::move(q))};
}

StepState advance_state(const MonomialBasis& basis, const NetworkTensors& tensors) {
  StepState next;
  next.pipes.resize(tensors.size());
  for (std::size_t e = 0; e < tensors.size(); ++e) {
    next.pipes[e].reserve(tensors[e].size());
    for (const auto& c : tensors[e]) next.pipes[e].push_back(advance_initial_profile(basis, c));
  }
  return next;
}

}  // namespace gasnet
