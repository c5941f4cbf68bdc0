// gasnet command-line front end.
//
// Exit codes:
//   0   success
//   1   invalid scenario, sweep spec or override
//   2   file could not be read or written
//   3   solver failure or divergent simulation
//   4   compare failed (probe missing or series not aligned)
//   64  usage error

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gasnet/driver.hpp"
#include "gasnet/error.hpp"
#include "gasnet/scenario.hpp"
#include "gasnet/steady.hpp"

namespace {

using namespace gasnet;

enum Exit { kOk = 0, kInvalid = 1, kIo = 2, kSolver = 3, kCompare = 4, kUsage = 64 };

struct Overrides {
  std::optional<std::string> method;
  std::optional<int> M, Mx, R;
  std::optional<double> dT, eps_b;
  std::optional<int> refine_x;
  std::vector<std::string> probes;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--method", o.method, "sas1, sas2 or fdm");
  cmd->add_option("--M", o.M, "polynomial order");
  cmd->add_option("--Mx", o.Mx, "initial-value collocation points");
  cmd->add_option("--R", o.R, "maximum embedding order");
  cmd->add_option("--dT", o.dT, "time step [s]");
  cmd->add_option("--eps-b", o.eps_b, "layer early-stop threshold");
  cmd->add_option("--refine-x", o.refine_x, "finite-difference cells per SAS cell");
}

void apply(ScenarioConfig& cfg, const Overrides& o) {
  if (o.method) {
    const auto m = parse_method(*o.method);
    if (!m) throw ConfigError("--method", "expected sas1, sas2 or fdm");
    cfg.method = *m;
  }
  if (o.M) cfg.M = *o.M;
  if (o.Mx) cfg.Mx = *o.Mx;
  if (o.R) cfg.R_order = *o.R;
  if (o.dT) cfg.dT = *o.dT;
  if (o.eps_b) cfg.eps_b = *o.eps_b;
  if (o.refine_x) cfg.refine_x = *o.refine_x;
  if (!o.probes.empty()) {
    cfg.probes.clear();
    for (const auto& p : o.probes) cfg.probes.push_back(parse_probe(p));
  }
}

int report_violations(const std::vector<Violation>& v) {
  for (const auto& x : v) std::cerr << x.entity << ": " << x.rule << "\n";
  return v.empty() ? kOk : kInvalid;
}

// Loads, overrides and validates. Returns an exit code on failure.
std::optional<int> prepare(const std::string& path, const Overrides& o, ScenarioConfig& cfg) {
  cfg = load_scenario(path, false);
  apply(cfg, o);
  const auto v = validate_scenario(cfg);
  if (!v.empty()) return report_violations(v);
  return std::nullopt;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Writes through a temporary stream so a failed open maps to the I/O code.
template <typename Fn>
void write_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  fn(out);
  out.close();
  if (!out) throw std::ios_base::failure("cannot write " + path);
}

int cmd_validate(const std::string& path) {
  const ScenarioConfig cfg = load_scenario(path, false);
  const int rc = report_violations(validate_scenario(cfg));
  if (rc == kOk) std::cout << path << ": ok\n";
  return rc;
}

int cmd_steady(const std::string& path, const std::string& out) {
  const ScenarioConfig cfg = load_scenario(path);
  const SteadyState s = solve_steady(cfg.network, 0.0);
  write_output(out, [&](std::ostream& os) {
    os << "entity,kind,value_si\n";
    for (std::size_t i = 0; i < cfg.network.nodes.size(); ++i)
      os << cfg.network.nodes[i].id << ",pressure," << fmt("%.15g", s.node_pressures[i])
         << "\n";
    for (std::size_t e = 0; e < cfg.network.pipelines.size(); ++e)
      os << cfg.network.pipelines[e].id << ",flow," << fmt("%.15g", s.flows[e]) << "\n";
  });
  return kOk;
}

int cmd_run(const std::string& path, const Overrides& o, std::string out) {
  ScenarioConfig cfg;
  if (auto rc = prepare(path, o, cfg)) return *rc;
  if (out.empty()) out = cfg.output;
  const TimeSeries ts = run_simulation(cfg);
  write_output(out, [&](std::ostream& os) { write_timeseries_csv(os, ts); });
  std::ostream& log = (out.empty() || out == "-") ? std::cerr : std::cout;
  const auto& m = ts.meta;
  log << "method=" << to_string(m.method) << " steps=" << m.steps
      << " wall_s=" << fmt("%.3f", m.wall_s) << " factorizations=" << m.factorizations;
  if (m.method != Method::FDM)
    log << " M=" << m.M << " Mx=" << m.Mx << " max_layers=" << m.max_layers
        << " condition=" << fmt("%.3g", m.condition_estimate);
  log << "\n";
  return kOk;
}

ProbeSeries load_probe(const std::string& path, const Probe& probe) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return probe_from_samples(read_timeseries_csv(in), probe);
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& probe_text,
                std::optional<double> base, const std::string& scenario) {
  const Probe probe = parse_probe(probe_text);
  double denom = 0.0;
  if (base) {
    denom = *base;
  } else if (!scenario.empty()) {
    denom = probe_base(load_scenario(scenario, false).network.constants, probe);
  } else {
    std::cerr << "compare: --base or --scenario is required\n";
    return kUsage;
  }
  if (!(denom > 0)) {
    std::cerr << "compare: base value must be > 0\n";
    return kUsage;
  }
  const ProbeSeries sim = load_probe(a, probe);
  const ProbeSeries ref = load_probe(b, probe);
  const double err = compute_err(sim, ref, denom);
  std::cout << "probe=" << to_string(probe) << " ERR=" << fmt("%.6e", err)
            << " log10_ERR=" << fmt("%.4f", std::log10(err)) << "\n";
  return kOk;
}

int cmd_sweep(const std::string& path, int jobs, const std::string& out) {
  const SweepSpec spec = load_sweep(path);
  const auto rows = run_sweep(spec, jobs);
  write_output(out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  for (const auto& r : rows)
    if (r.status != "ok")
      std::cerr << to_string(r.entry.method) << " M=" << r.entry.M << " dT=" << r.entry.dT
                << ": " << r.status << ": " << r.message << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transient gas network simulation"};
  app.require_subcommand(1);

  std::string scenario, out, probe;
  Overrides overrides;
  int jobs = 1;
  std::optional<double> base;
  std::vector<std::string> files;

  auto* validate = app.add_subcommand("validate", "check a scenario");
  validate->add_option("--scenario,scenario", scenario, "scenario file")->required();

  auto* steady = app.add_subcommand("steady", "steady initial state as CSV");
  steady->add_option("--scenario,scenario", scenario, "scenario file")->required();
  steady->add_option("--out", out, "output CSV (default stdout)");

  auto* run = app.add_subcommand("run", "simulate and write the time series CSV");
  run->add_option("--scenario,scenario", scenario, "scenario file")->required();
  run->add_option("--out", out, "output CSV (default: sim.output, else stdout)");
  run->add_option("--probe", overrides.probes, "pipeline:end:field (repeatable)");
  add_overrides(run, overrides);

  auto* compare = app.add_subcommand("compare", "ERR between two time series CSVs");
  compare->add_option("files", files, "simulated CSV, reference CSV")->required()->expected(2);
  compare->add_option("--probe", probe, "pipeline:end:field")->required();
  compare->add_option("--base", base, "normalization base (q_b or p_b)");
  compare->add_option("--scenario", scenario, "take the base from this scenario");

  auto* sweep = app.add_subcommand("sweep", "run a sweep spec and write its table");
  sweep->add_option("--spec,spec", scenario, "sweep file")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(scenario);
    if (*steady) return cmd_steady(scenario, out);
    if (*run) return cmd_run(scenario, overrides, out);
    if (*compare) return cmd_compare(files[0], files[1], probe, base, scenario);
    if (*sweep) return cmd_sweep(scenario, jobs, out);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const AlignmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCompare;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return *compare ? kCompare : kInvalid;
  } catch (const SteadyStateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  return kUsage;
}
