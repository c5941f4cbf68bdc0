// Shared test networks and helpers.

#ifndef GASNET_TEST_FIXTURES_HPP
#define GASNET_TEST_FIXTURES_HPP

#include <cmath>
#include <random>
#include <string>

#include "gasnet/driver.hpp"
#include "gasnet/scenario.hpp"

namespace fixtures {

inline std::string scenario_path(const std::string& name) {
  return std::string(GASNET_SCENARIO_DIR) + "/" + name;
}

inline gasnet::ScenarioConfig single_pipeline() {
  return gasnet::load_scenario(scenario_path("single_pipeline.toml"));
}

inline gasnet::ScenarioConfig six_node() {
  return gasnet::load_scenario(scenario_path("six_node.toml"));
}

/// One pipeline from `in` (supply) to `out` (demand) with constant signals.
inline gasnet::GasNetwork straight_pipe(double L, double dL, double lambda, double p_in,
                                        double q, double p_b = 1e6, double q_b = 2000) {
  using namespace gasnet;
  GasNetwork net;
  net.constants.v = 380;
  net.constants.p_b = p_b;
  net.constants.q_b = q_b;
  net.nodes.push_back({"in", NodeKind::Supply, BoundarySignal::constant(p_in)});
  net.nodes.push_back({"out", NodeKind::Demand, BoundarySignal::constant(q)});
  PipelineSpec pipe;
  pipe.id = "p";
  pipe.from_node = "in";
  pipe.to_node = "out";
  pipe.L = L;
  pipe.d = 1.016;
  pipe.S = 0.8107;
  pipe.lambda = lambda;
  pipe.dL = dL;
  net.pipelines.push_back(pipe);
  return net;
}

/// Random tree rooted at one supply. Every non-root node is reached by one
/// pipeline from an earlier node; leaves are demands, inner nodes junctions.
inline gasnet::GasNetwork random_tree(std::mt19937& rng, int max_nodes = 8) {
  using namespace gasnet;
  std::uniform_int_distribution<int> count(2, max_nodes);
  std::uniform_int_distribution<int> cells(1, 4);
  std::uniform_real_distribution<double> flow(10.0, 200.0);
  std::uniform_real_distribution<double> diameter(0.5, 1.2);
  const int n = count(rng);
  std::vector<int> parent(n, -1);
  std::vector<int> children(n, 0);
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    // The supply feeds exactly one pipeline.
    do parent[v] = pick(rng);
    while (parent[v] == 0 && children[0] > 0);
    ++children[parent[v]];
  }
  GasNetwork net;
  net.constants = {380, 6e6, 2000, {}, {}};
  for (int v = 0; v < n; ++v) {
    NodeSpec node;
    node.id = "n" + std::to_string(v);
    if (v == 0) {
      node.kind = NodeKind::Supply;
      node.signal = BoundarySignal::constant(6.5e6);
    } else if (children[v] == 0) {
      node.kind = NodeKind::Demand;
      node.signal = BoundarySignal::constant(flow(rng));
    } else {
      node.kind = NodeKind::Junction;
      node.signal = BoundarySignal::constant(0.0);
    }
    net.nodes.push_back(node);
  }
  for (int v = 1; v < n; ++v) {
    PipelineSpec pipe;
    pipe.id = "e" + std::to_string(v);
    pipe.from_node = "n" + std::to_string(parent[v]);
    pipe.to_node = "n" + std::to_string(v);
    pipe.dL = 250;
    pipe.L = pipe.dL * cells(rng);
    pipe.d = diameter(rng);
    pipe.S = 0.25 * M_PI * pipe.d * pipe.d;
    pipe.lambda = 0.008;
    net.pipelines.push_back(pipe);
  }
  return net;
}

}  // namespace fixtures

#endif  // GASNET_TEST_FIXTURES_HPP
