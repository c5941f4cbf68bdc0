#include "gasnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "gasnet/error.hpp"

namespace gasnet {

int PipelineSpec::cells() const {
  return static_cast<int>(std::llround(L / dL));
}

BoundarySignal::BoundarySignal() : repr_(Cosines{}) {}

BoundarySignal BoundarySignal::constant(double value) {
  return cosines(value, {});
}

BoundarySignal BoundarySignal::cosines(double offset,
                                       std::vector<CosineTerm> terms) {
  BoundarySignal s;
  s.repr_ = Cosines{offset, std::move(terms)};
  return s;
}

BoundarySignal BoundarySignal::table(std::vector<double> times,
                                     std::vector<double> values) {
  BoundarySignal s;
  s.repr_ = Table{std::move(times), std::move(values)};
  return s;
}

double signal_eval(const BoundarySignal& sig, double t) {
  if (const auto* c = sig.as_cosines()) {
    double value = c->offset;
    for (const auto& term : c->terms)
      value += term.amplitude * std::cos(term.omega * t + term.phase);
    return value;
  }
  const auto& tab = *sig.as_table();
  if (tab.times.empty())
    throw ConfigError("signal.times", "empty signal table");
  // Small slack so that k*dT rounding at the last step does not trip the check.
  const double slack = 1e-9 * std::max(1.0, std::abs(tab.times.back()));
  if (t < tab.times.front() - slack || t > tab.times.back() + slack) {
    std::ostringstream os;
    os << "t = " << t << " outside table range [" << tab.times.front() << ", "
       << tab.times.back() << "]";
    throw ConfigError("signal.times", os.str());
  }
  if (t <= tab.times.front()) return tab.values.front();
  if (t >= tab.times.back()) return tab.values.back();
  const auto hi = std::upper_bound(tab.times.begin(), tab.times.end(), t);
  const auto i = static_cast<std::size_t>(hi - tab.times.begin());
  const double t0 = tab.times[i - 1], t1 = tab.times[i];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * tab.values[i - 1] + w * tab.values[i];
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Supply: return "supply";
    case NodeKind::Demand: return "demand";
    case NodeKind::Junction: return "junction";
  }
  return "?";
}

int GasNetwork::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

int GasNetwork::pipeline_index(const std::string& id) const {
  for (std::size_t i = 0; i < pipelines.size(); ++i)
    if (pipelines[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<NodeAttachments> attachments(const GasNetwork& net) {
  std::vector<NodeAttachments> out(net.nodes.size());
  for (std::size_t e = 0; e < net.pipelines.size(); ++e) {
    const auto& pipe = net.pipelines[e];
    const int from = net.node_index(pipe.from_node);
    const int to = net.node_index(pipe.to_node);
    if (from >= 0) out[from].inlets.push_back(static_cast<int>(e));
    if (to >= 0) out[to].outlets.push_back(static_cast<int>(e));
  }
  return out;
}

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

void check_signal(const BoundarySignal& sig, const std::string& entity,
                  std::vector<Violation>& out) {
  if (const auto* tab = sig.as_table()) {
    if (tab->times.empty() || tab->times.size() != tab->values.size())
      out.push_back({entity, "signal table needs equally sized non-empty times/values"});
    for (std::size_t i = 1; i < tab->times.size(); ++i)
      if (!(tab->times[i] > tab->times[i - 1])) {
        out.push_back({entity, "signal table times must be strictly increasing"});
        break;
      }
  } else {
    for (const auto& term : sig.as_cosines()->terms)
      if (!std::isfinite(term.amplitude) || !std::isfinite(term.omega) ||
          !std::isfinite(term.phase)) {
        out.push_back({entity, "signal terms must be finite"});
        break;
      }
  }
}

}  // namespace

bool is_tree(const GasNetwork& net) {
  DisjointSet ds(net.nodes.size());
  for (const auto& pipe : net.pipelines) {
    const int a = net.node_index(pipe.from_node);
    const int b = net.node_index(pipe.to_node);
    if (a < 0 || b < 0) continue;
    if (!ds.unite(a, b)) return false;
  }
  return true;
}

std::vector<Violation> validate_network(const GasNetwork& net) {
  std::vector<Violation> out;
  const auto& c = net.constants;

  if (!(c.v > 0)) out.push_back({"gas.v", "sound speed must be > 0"});
  if (!(c.p_b > 0)) out.push_back({"gas.p_b", "pressure base must be > 0"});
  if (!(c.q_b > 0)) out.push_back({"gas.q_b", "mass-flow base must be > 0"});
  if (c.T0 && c.R_gas && c.v > 0) {
    const double v_iso = std::sqrt(*c.R_gas * *c.T0);
    if (std::abs(v_iso - c.v) > 1e-9 * c.v)
      out.push_back({"gas.v", "v must equal sqrt(R_gas*T0)"});
  }

  std::set<std::string> ids;
  for (const auto& node : net.nodes) {
    if (!ids.insert(node.id).second)
      out.push_back({"node " + node.id, "duplicate node id"});
    check_signal(node.signal, "node " + node.id, out);
  }
  ids.clear();
  for (const auto& pipe : net.pipelines) {
    const std::string entity = "pipeline " + pipe.id;
    if (!ids.insert(pipe.id).second) out.push_back({entity, "duplicate pipeline id"});
    if (!(pipe.L > 0)) out.push_back({entity, "L must be > 0"});
    if (!(pipe.d > 0)) out.push_back({entity, "d must be > 0"});
    if (!(pipe.S > 0)) out.push_back({entity, "S must be > 0"});
    if (!(pipe.lambda >= 0)) out.push_back({entity, "lambda must be >= 0"});
    if (!(pipe.dL > 0)) {
      out.push_back({entity, "dL must be > 0"});
    } else if (pipe.L > 0) {
      const double ratio = pipe.L / pipe.dL;
      if (ratio < 0.5 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        out.push_back({entity, "L/dL not integer"});
    }
    if (net.node_index(pipe.from_node) < 0)
      out.push_back({entity, "unknown from node '" + pipe.from_node + "'"});
    if (net.node_index(pipe.to_node) < 0)
      out.push_back({entity, "unknown to node '" + pipe.to_node + "'"});
    if (pipe.from_node == pipe.to_node)
      out.push_back({entity, "pipeline must connect two distinct nodes"});
  }

  const auto att = attachments(net);
  int supplies = 0;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& node = net.nodes[i];
    const std::string entity = "node " + node.id;
    const auto& a = att[i];
    switch (node.kind) {
      case NodeKind::Supply:
        ++supplies;
        if (!a.outlets.empty())
          out.push_back({entity, "supply must attach to inlet"});
        if (a.count() == 0) out.push_back({entity, "node has no pipeline attached"});
        break;
      case NodeKind::Demand:
        if (!a.inlets.empty())
          out.push_back({entity, "demand must attach to outlet"});
        if (a.count() != 1)
          out.push_back({entity, "demand must attach to exactly one pipeline end"});
        break;
      case NodeKind::Junction:
        if (a.count() < 2)
          out.push_back({entity, "junction must attach at least 2 pipeline ends"});
        break;
    }
  }
  if (supplies == 0) out.push_back({"network", "at least one supply node required"});

  if (!net.nodes.empty()) {
    DisjointSet ds(net.nodes.size());
    for (const auto& pipe : net.pipelines) {
      const int a = net.node_index(pipe.from_node);
      const int b = net.node_index(pipe.to_node);
      if (a >= 0 && b >= 0) ds.unite(a, b);
    }
    const int root = ds.find(0);
    for (std::size_t i = 1; i < net.nodes.size(); ++i)
      if (ds.find(static_cast<int>(i)) != root) {
        out.push_back({"network", "graph is not connected"});
        break;
      }
  } else {
    out.push_back({"network", "no nodes"});
  }
  return out;
}

}  // namespace gasnet
