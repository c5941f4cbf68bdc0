#include "gasnet/steady.hpp"

#include <cmath>
#include <queue>
#include <sstream>

#include "gasnet/error.hpp"
#include "gasnet/step_state.hpp"

namespace gasnet {

double SteadyProfile::operator()(double x) const {
  return std::sqrt(p_in_ * p_in_ - slope_ * x);
}

SteadyProfile steady_pressure_profile(const PipelineSpec& pipe,
                                      const GasConstants& gas, double p_in,
                                      double q0) {
  if (!(p_in > 0))
    throw SteadyStateError("pipeline " + pipe.id + ": inlet pressure must be > 0");
  if (q0 < 0)
    throw SteadyStateError("pipeline " + pipe.id + ": reverse steady flow");
  const double slope =
      pipe.lambda * gas.v * gas.v * q0 * q0 / (pipe.d * pipe.S * pipe.S);
  if (p_in * p_in - slope * pipe.L <= 0) {
    std::ostringstream os;
    os << "pipeline " << pipe.id << ": infeasible steady state, pressure vanishes"
       << " before x = L (p_in = " << p_in << " Pa, q0 = " << q0 << " kg/s)";
    throw SteadyStateError(os.str());
  }
  return SteadyProfile(p_in, slope);
}

namespace {

struct Tree {
  int root = -1;
  std::vector<int> order;        // BFS order of nodes from the root
  std::vector<int> parent_edge;  // pipeline leading to the parent, -1 at root
  std::vector<int> parent;
};

Tree root_tree(const GasNetwork& net) {
  if (!is_tree(net))
    throw SteadyStateError("network contains a cycle; steady flow is only "
                           "supported on tree networks");
  Tree tree;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (net.nodes[i].kind != NodeKind::Supply) continue;
    if (tree.root >= 0)
      throw SteadyStateError("steady flow needs exactly one supply node");
    tree.root = static_cast<int>(i);
  }
  if (tree.root < 0) throw SteadyStateError("network has no supply node");

  const std::size_t n = net.nodes.size();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbour, edge)
  for (std::size_t e = 0; e < net.pipelines.size(); ++e) {
    const int a = net.node_index(net.pipelines[e].from_node);
    const int b = net.node_index(net.pipelines[e].to_node);
    if (a < 0 || b < 0)
      throw SteadyStateError("pipeline " + net.pipelines[e].id +
                             " references an unknown node");
    adj[a].push_back({b, static_cast<int>(e)});
    adj[b].push_back({a, static_cast<int>(e)});
  }
  tree.parent.assign(n, -1);
  tree.parent_edge.assign(n, -1);
  std::vector<bool> seen(n, false);
  std::queue<int> queue;
  queue.push(tree.root);
  seen[tree.root] = true;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    tree.order.push_back(u);
    for (const auto& [w, e] : adj[u]) {
      if (seen[w]) continue;
      seen[w] = true;
      tree.parent[w] = u;
      tree.parent_edge[w] = e;
      queue.push(w);
    }
  }
  if (tree.order.size() != n)
    throw SteadyStateError("network is not connected");
  return tree;
}

}  // namespace

std::vector<double> steady_flows(const GasNetwork& net, double t0) {
  const Tree tree = root_tree(net);
  // Gas leaving the network at each node; the supply covers the total.
  std::vector<double> subtree(net.nodes.size(), 0.0);
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    if (net.nodes[i].kind != NodeKind::Supply)
      subtree[i] = signal_eval(net.nodes[i].signal, t0);

  std::vector<double> flows(net.pipelines.size(), 0.0);
  for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
    const int w = *it;
    if (w == tree.root) continue;
    const int e = tree.parent_edge[w];
    const bool along = net.node_index(net.pipelines[e].to_node) == w;
    flows[e] = along ? subtree[w] : -subtree[w];
    subtree[tree.parent[w]] += subtree[w];
  }
  return flows;
}

SteadyState solve_steady(const GasNetwork& net, double t0) {
  const Tree tree = root_tree(net);
  SteadyState state;
  state.flows = steady_flows(net, t0);
  const double q_tol = 1e-12 * net.constants.q_b;
  for (std::size_t e = 0; e < state.flows.size(); ++e) {
    if (state.flows[e] < -q_tol) {
      std::ostringstream os;
      os << "pipeline " << net.pipelines[e].id << ": steady flow "
         << state.flows[e] << " kg/s runs from outlet to inlet";
      throw SteadyStateError(os.str());
    }
    if (state.flows[e] < 0) state.flows[e] = 0.0;
  }

  state.node_pressures.assign(net.nodes.size(), 0.0);
  state.profiles.assign(net.pipelines.size(), SteadyProfile{});
  state.node_pressures[tree.root] = signal_eval(net.nodes[tree.root].signal, t0);
  for (const int w : tree.order) {
    if (w == tree.root) continue;
    const int e = tree.parent_edge[w];
    const auto& pipe = net.pipelines[e];
    const double q = state.flows[e];
    const double p_parent = state.node_pressures[tree.parent[w]];
    if (net.node_index(pipe.to_node) == w) {
      state.profiles[e] = steady_pressure_profile(pipe, net.constants, p_parent, q);
      state.node_pressures[w] = state.profiles[e](pipe.L);
    } else {
      // Pipeline oriented toward the supply: the parent sits at its outlet,
      // so the inlet pressure is recovered upstream.
      const double slope = pipe.lambda * net.constants.v * net.constants.v * q *
                           q / (pipe.d * pipe.S * pipe.S);
      const double p_in = std::sqrt(p_parent * p_parent + slope * pipe.L);
      state.profiles[e] = steady_pressure_profile(pipe, net.constants, p_in, q);
      state.node_pressures[w] = p_in;
    }
  }
  return state;
}

StepState build_initial_state(const GasNetwork& net, const SteadyState& steady) {
  StepState state;
  const auto& gas = net.constants;
  state.pipes.resize(net.pipelines.size());
  for (std::size_t e = 0; e < net.pipelines.size(); ++e) {
    const auto& pipe = net.pipelines[e];
    const int cells = pipe.cells();
    auto& out = state.pipes[e];
    out.reserve(cells);
    for (int i = 0; i < cells; ++i) {
      CellState cell;
      cell.p = CellProfile::steady({steady.profiles[e], static_cast<double>(i), pipe.dL, gas.p_b});
      cell.q = CellProfile::constant(steady.flows[e] / gas.q_b);
      out.push_back(std::move(cell));
    }
  }
  return state;
}

}  // namespace gasnet
