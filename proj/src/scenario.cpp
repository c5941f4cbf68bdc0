#include "gasnet/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gasnet/error.hpp"
#include "gasnet/steady.hpp"
#include "gasnet/toml_lite.hpp"
#include "config_reader.hpp"

namespace gasnet {

const char* to_string(Method m) {
  switch (m) {
    case Method::SAS1: return "sas1";
    case Method::SAS2: return "sas2";
    case Method::FDM: return "fdm";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != '-' && c != '_') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "sas1") return Method::SAS1;
  if (s == "sas2") return Method::SAS2;
  if (s == "fdm") return Method::FDM;
  return std::nullopt;
}

std::string to_string(const Probe& probe) {
  return probe.pipeline + ":" + (probe.end == PipeEnd::Inlet ? "inlet" : "outlet") +
         ":" + (probe.field == Field::Flow ? "q" : "p");
}

namespace {

std::optional<PipeEnd> parse_end(std::string_view s) {
  if (s == "inlet") return PipeEnd::Inlet;
  if (s == "outlet") return PipeEnd::Outlet;
  return std::nullopt;
}

std::optional<Field> parse_field(std::string_view s) {
  if (s == "q") return Field::Flow;
  if (s == "p") return Field::Pressure;
  return std::nullopt;
}

}  // namespace

Probe parse_probe(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos)
    throw ConfigError("probe", "expected pipeline:end:field, got '" + std::string(text) + "'");
  Probe p;
  p.pipeline = std::string(text.substr(0, a));
  const auto end = parse_end(text.substr(a + 1, b - a - 1));
  const auto field = parse_field(text.substr(b + 1));
  if (p.pipeline.empty()) throw ConfigError("probe", "empty pipeline id");
  if (!end) throw ConfigError("probe", "end must be inlet or outlet");
  if (!field) throw ConfigError("probe", "field must be p or q");
  p.end = *end;
  p.field = *field;
  return p;
}

long ScenarioConfig::steps() const { return std::lround(duration / dT); }

namespace {

using toml::Table;
using toml::Value;
using detail::Reader;
using detail::table_at;
using detail::tables_at;
using detail::number_array;

BoundarySignal parse_signal(const Value& v, const std::string& path) {
  if (!v.is_table()) throw ConfigError(path, "expected inline table");
  const auto& t = std::get<Table>(v.data);
  const Reader r(t, path);
  if (t.contains("times") || t.contains("values")) {
    r.reject_unknown({"times", "values"});
    auto times = number_array(r.require("times"), r.field("times"));
    auto values = number_array(r.require("values"), r.field("values"));
    if (times.size() != values.size())
      throw ConfigError(r.field("values"), "times and values differ in length");
    return BoundarySignal::table(std::move(times), std::move(values));
  }
  r.reject_unknown({"offset", "terms"});
  const double offset = r.number("offset");
  std::vector<CosineTerm> terms;
  if (const Value* tv = t.find("terms")) {
    if (!tv->is_array()) throw ConfigError(r.field("terms"), "expected array");
    const auto& arr = std::get<toml::Array>(tv->data);
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string tp = r.field("terms") + "[" + std::to_string(k) + "]";
      if (!arr[k].is_table()) throw ConfigError(tp, "expected inline table");
      const Reader tr(std::get<Table>(arr[k].data), tp);
      tr.reject_unknown({"amplitude", "omega", "phase"});
      terms.push_back({tr.number("amplitude"), tr.number("omega"),
                       tr.opt_number("phase").value_or(0.0)});
    }
  }
  return BoundarySignal::cosines(offset, std::move(terms));
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Shortest text that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, bool validate) {
  const Table root = toml::parse(text);
  {
    const Reader r(root, "");
    r.reject_unknown({"gas", "node", "pipeline", "sim", "probe"});
  }
  ScenarioConfig cfg;

  const Reader gas(table_at(root, "gas"), "gas");
  gas.reject_unknown({"v", "p_b", "q_b", "T0", "R_gas"});
  cfg.network.constants.v = gas.number("v");
  cfg.network.constants.p_b = gas.number("p_b");
  cfg.network.constants.q_b = gas.number("q_b");
  cfg.network.constants.T0 = gas.opt_number("T0");
  cfg.network.constants.R_gas = gas.opt_number("R_gas");

  const auto nodes = tables_at(root, "node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Reader r(*nodes[i], "node[" + std::to_string(i) + "]");
    r.reject_unknown({"id", "kind", "signal"});
    NodeSpec node;
    node.id = r.string("id");
    const std::string kind = r.string("kind");
    if (kind == "supply") node.kind = NodeKind::Supply;
    else if (kind == "demand") node.kind = NodeKind::Demand;
    else if (kind == "junction") node.kind = NodeKind::Junction;
    else throw ConfigError(r.field("kind"), "expected supply|demand|junction, got '" + kind + "'");
    if (const Value* sig = nodes[i]->find("signal"))
      node.signal = parse_signal(*sig, r.field("signal"));
    else if (node.kind == NodeKind::Junction)
      node.signal = BoundarySignal::constant(0.0);
    else
      throw ConfigError(r.field("signal"), "required field missing");
    cfg.network.nodes.push_back(std::move(node));
  }

  const auto pipes = tables_at(root, "pipeline");
  for (std::size_t i = 0; i < pipes.size(); ++i) {
    const Reader r(*pipes[i], "pipeline[" + std::to_string(i) + "]");
    r.reject_unknown({"id", "from", "to", "L", "d", "S", "lambda", "dL"});
    PipelineSpec p;
    p.id = r.string("id");
    p.from_node = r.string("from");
    p.to_node = r.string("to");
    p.L = r.number("L");
    p.d = r.number("d");
    p.S = r.number("S");
    p.lambda = r.number("lambda");
    p.dL = r.number("dL");
    cfg.network.pipelines.push_back(std::move(p));
  }

  const Reader sim(table_at(root, "sim"), "sim");
  sim.reject_unknown({"duration", "dT", "method", "M", "Mx", "R_order", "eps_b",
                      "refine_x", "output"});
  cfg.duration = sim.number("duration");
  cfg.dT = sim.number("dT");
  const std::string method = sim.string("method");
  const auto m = parse_method(method);
  if (!m) throw ConfigError("sim.method", "expected sas1|sas2|fdm, got '" + method + "'");
  cfg.method = *m;
  const bool sas = cfg.method != Method::FDM;
  if (sas) {
    cfg.M = sim.integer("M");
    cfg.Mx = sim.integer("Mx");
  } else {
    cfg.M = sim.opt_integer("M").value_or(cfg.M);
    cfg.Mx = sim.opt_integer("Mx").value_or(cfg.Mx);
  }
  cfg.R_order = sim.opt_integer("R_order").value_or(kDefaultROrder);
  cfg.eps_b = sim.opt_number("eps_b").value_or(kDefaultEpsB);
  cfg.refine_x = sim.opt_integer("refine_x").value_or(1);
  cfg.output = sim.opt_string("output").value_or("");

  const auto probes = tables_at(root, "probe");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Reader r(*probes[i], "probe[" + std::to_string(i) + "]");
    r.reject_unknown({"pipeline", "end", "field"});
    Probe p;
    p.pipeline = r.string("pipeline");
    const auto end = parse_end(r.string("end"));
    if (!end) throw ConfigError(r.field("end"), "expected inlet|outlet");
    const auto field = parse_field(r.string("field"));
    if (!field) throw ConfigError(r.field("field"), "expected p|q");
    p.end = *end;
    p.field = *field;
    cfg.probes.push_back(std::move(p));
  }

  if (!validate) return cfg;
  const auto violations = validate_scenario(cfg);
  if (!violations.empty()) {
    std::string msg = violations.front().rule;
    for (std::size_t i = 1; i < violations.size(); ++i)
      msg += "; " + violations[i].entity + ": " + violations[i].rule;
    throw ConfigError(violations.front().entity, msg);
  }
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::ios_base::failure("cannot read " + path.string());
  return ss.str();
}

ScenarioConfig load_scenario(const std::filesystem::path& path, bool validate) {
  return parse_scenario(read_text_file(path), validate);
}

std::string emit_scenario(const ScenarioConfig& cfg) {
  std::ostringstream os;
  const auto& c = cfg.network.constants;
  os << "[gas]\n"
     << "v = " << fmt_double(c.v) << "\n"
     << "p_b = " << fmt_double(c.p_b) << "\n"
     << "q_b = " << fmt_double(c.q_b) << "\n";
  if (c.T0) os << "T0 = " << fmt_double(*c.T0) << "\n";
  if (c.R_gas) os << "R_gas = " << fmt_double(*c.R_gas) << "\n";

  for (const auto& node : cfg.network.nodes) {
    os << "\n[[node]]\n"
       << "id = " << quote(node.id) << "\n"
       << "kind = \"" << to_string(node.kind) << "\"\n"
       << "signal = {";
    if (const auto* cs = node.signal.as_cosines()) {
      os << "offset = " << fmt_double(cs->offset) << ", terms = [";
      for (std::size_t k = 0; k < cs->terms.size(); ++k) {
        const auto& t = cs->terms[k];
        os << (k ? ", " : "") << "{amplitude = " << fmt_double(t.amplitude)
           << ", omega = " << fmt_double(t.omega) << ", phase = " << fmt_double(t.phase)
           << "}";
      }
      os << "]";
    } else {
      const auto& tab = *node.signal.as_table();
      os << "times = [";
      for (std::size_t k = 0; k < tab.times.size(); ++k)
        os << (k ? ", " : "") << fmt_double(tab.times[k]);
      os << "], values = [";
      for (std::size_t k = 0; k < tab.values.size(); ++k)
        os << (k ? ", " : "") << fmt_double(tab.values[k]);
      os << "]";
    }
    os << "}\n";
  }

  for (const auto& p : cfg.network.pipelines) {
    os << "\n[[pipeline]]\n"
       << "id = " << quote(p.id) << "\n"
       << "from = " << quote(p.from_node) << "\n"
       << "to = " << quote(p.to_node) << "\n"
       << "L = " << fmt_double(p.L) << "\n"
       << "d = " << fmt_double(p.d) << "\n"
       << "S = " << fmt_double(p.S) << "\n"
       << "lambda = " << fmt_double(p.lambda) << "\n"
       << "dL = " << fmt_double(p.dL) << "\n";
  }

  os << "\n[sim]\n"
     << "duration = " << fmt_double(cfg.duration) << "\n"
     << "dT = " << fmt_double(cfg.dT) << "\n"
     << "method = \"" << to_string(cfg.method) << "\"\n"
     << "M = " << cfg.M << "\n"
     << "Mx = " << cfg.Mx << "\n"
     << "R_order = " << cfg.R_order << "\n"
     << "eps_b = " << fmt_double(cfg.eps_b) << "\n"
     << "refine_x = " << cfg.refine_x << "\n";
  if (!cfg.output.empty()) os << "output = " << quote(cfg.output) << "\n";

  for (const auto& p : cfg.probes) {
    os << "\n[[probe]]\n"
       << "pipeline = " << quote(p.pipeline) << "\n"
       << "end = \"" << (p.end == PipeEnd::Inlet ? "inlet" : "outlet") << "\"\n"
       << "field = \"" << (p.field == Field::Flow ? "q" : "p") << "\"\n";
  }
  return os.str();
}

std::vector<Violation> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<Violation> out = validate_network(cfg.network);
  const bool network_ok = out.empty();

  if (!(cfg.dT > 0)) out.push_back({"sim.dT", "time step must be > 0"});
  if (!(cfg.duration > 0)) out.push_back({"sim.duration", "duration must be > 0"});
  if (cfg.dT > 0 && cfg.duration > 0) {
    const double ratio = cfg.duration / cfg.dT;
    if (ratio < 0.5 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      out.push_back({"sim.dT", "duration/dT must be a positive integer"});
  }
  if (cfg.method != Method::FDM) {
    if (!(cfg.M - cfg.Mx > 0 && cfg.M - cfg.Mx < cfg.M))
      out.push_back({"sim.Mx", "balance condition 0 < M - Mx < M violated (M = " +
                                   std::to_string(cfg.M) + ", Mx = " +
                                   std::to_string(cfg.Mx) + ")"});
    if (cfg.R_order < 1) out.push_back({"sim.R_order", "R_order must be >= 1"});
    if (!(cfg.eps_b > 0)) out.push_back({"sim.eps_b", "eps_b must be > 0"});
  }
  if (cfg.refine_x < 1) out.push_back({"sim.refine_x", "refine_x must be >= 1"});

  for (std::size_t i = 0; i < cfg.probes.size(); ++i)
    if (cfg.network.pipeline_index(cfg.probes[i].pipeline) < 0)
      out.push_back({"probe[" + std::to_string(i) + "].pipeline",
                     "unknown pipeline '" + cfg.probes[i].pipeline + "'"});

  if (network_ok) {
    try {
      const auto flows = steady_flows(cfg.network, 0.0);
      bool reverse = false;
      for (std::size_t e = 0; e < flows.size(); ++e)
        if (flows[e] < -1e-12 * cfg.network.constants.q_b) {
          reverse = true;
          out.push_back({"pipeline " + cfg.network.pipelines[e].id,
                         "steady flow would run from outlet to inlet"});
        }
      if (!reverse) solve_steady(cfg.network, 0.0);
    } catch (const Error& e) {
      out.push_back({"network", std::string("no steady initial state: ") + e.what()});
    }
  }
  return out;
}

}  // namespace gasnet
