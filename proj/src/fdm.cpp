#include "gasnet/fdm.hpp"

#include <cmath>

#include "gasnet/error.hpp"

namespace gasnet {

FdmContext::FdmContext(const GasNetwork& network, double step, int refine)
    : net(&network), dT(step), refine_x(refine), attach(attachments(network)) {
  for (const auto& pipe : network.pipelines) {
    const int n = pipe.cells() * refine_x;
    const double h = pipe.L / n;
    cells.push_back(n);
    dL.push_back(h);
    offsets.push_back(size);
    size += 2 * (n + 1);
    constants.push_back(compute_constants<double>(pipe, network.constants, dT, h));
  }
}

FdmState fdm_initial_state(const FdmContext& ctx, const SteadyState& steady) {
  const auto& gas = ctx.net->constants;
  FdmState state;
  state.pipes.resize(ctx.cells.size());
  for (std::size_t e = 0; e < ctx.cells.size(); ++e) {
    const int n = ctx.cells[e];
    auto& s = state.pipes[e];
    s.p.resize(n + 1);
    s.q.setConstant(n + 1, steady.flows[e] / gas.q_b);
    for (int i = 0; i <= n; ++i) s.p(i) = steady.profiles[e](i * ctx.dL[e]) / gas.p_b;
  }
  return state;
}

FdmSystem fdm_assemble_step(const FdmContext& ctx, const FdmState& state, double t) {
  const auto& net = *ctx.net;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(ctx.size) * 4);
  FdmSystem sys;
  sys.b = Eigen::VectorXd::Zero(ctx.size);
  int row = 0;

  for (std::size_t e = 0; e < ctx.cells.size(); ++e) {
    const auto& C = ctx.constants[e];
    const auto& s = state.pipes[e];
    const int pe = static_cast<int>(e);
    for (int i = 0; i < ctx.cells[e]; ++i) {
      const int pi = ctx.column(pe, i, Field::Pressure), pj = ctx.column(pe, i + 1, Field::Pressure);
      const int qi = ctx.column(pe, i, Field::Flow), qj = ctx.column(pe, i + 1, Field::Flow);

      trip.emplace_back(row, pi, 0.5);
      trip.emplace_back(row, pj, 0.5);
      trip.emplace_back(row, qi, -C.C1);
      trip.emplace_back(row, qj, C.C1);
      sys.b(row) = 0.5 * (s.p(i + 1) + s.p(i));
      ++row;

      const double psum = s.p(i + 1) + s.p(i);
      if (!(psum > 0.0))
        throw DivergenceError("degenerate state: nonpositive pressure sum in friction term");
      const double qsum = s.q(i + 1) + s.q(i);
      const double w = C.C3 * std::abs(qsum) / psum;
      trip.emplace_back(row, qi, 0.5 + w);
      trip.emplace_back(row, qj, 0.5 + w);
      trip.emplace_back(row, pi, -C.C2);
      trip.emplace_back(row, pj, C.C2);
      sys.b(row) = 0.5 * qsum + w * 0.5 * qsum;
      ++row;
    }
  }

  const double t1 = t + ctx.dT;
  for (std::size_t v = 0; v < net.nodes.size(); ++v) {
    const auto& node = net.nodes[v];
    const auto& att = ctx.attach[v];
    switch (node.kind) {
      case NodeKind::Supply: {
        const double target = signal_eval(node.signal, t1) / net.constants.p_b;
        for (int e : att.inlets) {
          trip.emplace_back(row, ctx.column(e, 0, Field::Pressure), 1.0);
          sys.b(row++) = target;
        }
        break;
      }
      case NodeKind::Demand: {
        const double target = signal_eval(node.signal, t1) / net.constants.q_b;
        for (int e : att.outlets) {
          trip.emplace_back(row, ctx.column(e, ctx.cells[e], Field::Flow), 1.0);
          sys.b(row++) = target;
        }
        break;
      }
      case NodeKind::Junction: {
        struct End {
          int pipe;
          int node;
          double sign;
        };
        std::vector<End> ends;
        for (int e : att.inlets) ends.push_back({e, 0, -1.0});
        for (int e : att.outlets) ends.push_back({e, ctx.cells[e], 1.0});
        const End& anchor = ends.front();
        for (std::size_t k = 1; k < ends.size(); ++k) {
          trip.emplace_back(row, ctx.column(anchor.pipe, anchor.node, Field::Pressure), 1.0);
          trip.emplace_back(row, ctx.column(ends[k].pipe, ends[k].node, Field::Pressure), -1.0);
          ++row;
        }
        for (const End& end : ends)
          trip.emplace_back(row, ctx.column(end.pipe, end.node, Field::Flow), end.sign);
        sys.b(row++) = signal_eval(node.signal, t1) / net.constants.q_b;
        break;
      }
    }
  }
  if (row != ctx.size)
    throw ConfigError("network", "finite-difference system is not square");

  sys.A.resize(ctx.size, ctx.size);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

FdmState fdm_step(const FdmContext& ctx, const FdmSystem& system, SparseLuSolver& solver,
                  long next_step) {
  solver.factorize(system.A);
  const Eigen::VectorXd x = solver.solve(system.b);
  if (!x.allFinite()) throw DivergenceError("non-finite finite-difference solution", next_step);
  FdmState out;
  out.step = next_step;
  out.pipes.resize(ctx.cells.size());
  for (std::size_t e = 0; e < ctx.cells.size(); ++e) {
    const int n = ctx.cells[e];
    auto& s = out.pipes[e];
    s.p.resize(n + 1);
    s.q.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      s.p(i) = x(ctx.column(static_cast<int>(e), i, Field::Pressure));
      s.q(i) = x(ctx.column(static_cast<int>(e), i, Field::Flow));
    }
  }
  return out;
}

}  // namespace gasnet
