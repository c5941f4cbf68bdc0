// Gas network domain model: constants, pipelines, typed nodes and boundary
// signals.

#ifndef GASNET_NETWORK_HPP
#define GASNET_NETWORK_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gasnet {

struct GasConstants {
  double v = 0.0;    // sound speed [m/s]
  double p_b = 0.0;  // pressure base [Pa]
  double q_b = 0.0;  // mass-flow base [kg/s]
  std::optional<double> T0;     // [K]
  std::optional<double> R_gas;  // [J/(kg K)]
};

struct PipelineSpec {
  std::string id;
  std::string from_node;  // inlet, x = 0
  std::string to_node;    // outlet, x = L
  double L = 0.0;
  double d = 0.0;
  double S = 0.0;  // taken as given, never derived from d
  double lambda = 0.0;
  double dL = 0.0;

  /// Number of cells L/dL; only meaningful for a validated pipeline.
  int cells() const;
};

/// One term `amplitude * cos(omega * t + phase)`.
struct CosineTerm {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// offset + sum of cosine terms, or a sampled table with linear
/// interpolation.
class BoundarySignal {
public:
  struct Cosines {
    double offset = 0.0;
    std::vector<CosineTerm> terms;
  };
  struct Table {
    std::vector<double> times;
    std::vector<double> values;
  };

  BoundarySignal();
  static BoundarySignal constant(double value);
  static BoundarySignal cosines(double offset, std::vector<CosineTerm> terms);
  static BoundarySignal table(std::vector<double> times,
                              std::vector<double> values);

  bool is_table() const { return std::holds_alternative<Table>(repr_); }
  const Cosines* as_cosines() const { return std::get_if<Cosines>(&repr_); }
  const Table* as_table() const { return std::get_if<Table>(&repr_); }

private:
  std::variant<Cosines, Table> repr_;
};

/// Evaluates a signal at time t >= 0. Tables throw ConfigError outside their
/// time range.
double signal_eval(const BoundarySignal& sig, double t);

enum class PipeEnd { Inlet, Outlet };
enum class Field { Pressure, Flow };

enum class NodeKind { Supply, Demand, Junction };

const char* to_string(NodeKind kind);

/// Supply signals are pressures [Pa]; demand and junction signals are
/// extracted mass flows [kg/s].
struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::Junction;
  BoundarySignal signal;
};

struct GasNetwork {
  GasConstants constants;
  std::vector<PipelineSpec> pipelines;
  std::vector<NodeSpec> nodes;

  int node_index(const std::string& id) const;      // -1 when absent
  int pipeline_index(const std::string& id) const;  // -1 when absent
};

/// Pipeline ends attached to a node, split by which end touches it.
struct NodeAttachments {
  std::vector<int> inlets;   // pipelines whose x = 0 end is at the node
  std::vector<int> outlets;  // pipelines whose x = L end is at the node
  int count() const { return static_cast<int>(inlets.size() + outlets.size()); }
};

/// Attachments per node, indexed like `net.nodes`. Pipelines referencing
/// unknown nodes are skipped.
std::vector<NodeAttachments> attachments(const GasNetwork& net);

struct Violation {
  std::string entity;
  std::string rule;
};

/// Checks every structural invariant of the network. Returns an empty list
/// iff the network is valid; never throws.
std::vector<Violation> validate_network(const GasNetwork& net);

/// True when the pipeline graph (ignoring direction) has no cycle.
bool is_tree(const GasNetwork& net);

}  // namespace gasnet

#endif  // GASNET_NETWORK_HPP
