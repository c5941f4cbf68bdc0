#include "gasnet/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "config_reader.hpp"
#include "gasnet/error.hpp"
#include "gasnet/fdm.hpp"
#include "gasnet/sas.hpp"
#include "gasnet/steady.hpp"
#include "gasnet/toml_lite.hpp"

namespace gasnet {

namespace {

constexpr double kAlignTol = 1e-9;     // [s]
constexpr double kPressureLimit = 1e3;  // normalized
constexpr double kReverseFlowTol = 1e-9;

struct ResolvedProbe {
  int pipe;
  bool inlet;
  bool flow;
};

// Border values of every pipeline at the end of one step, normalized.
struct Borders {
  std::vector<std::vector<double>> p, q, x;
};

// Reverse flow is fatal only where the friction term assumes q >= 0, which
// is SAS-1 (q^2 in place of q|q|).
void check_borders(const Borders& b, const GasNetwork& net, bool forbid_reverse) {
  for (std::size_t e = 0; e < b.p.size(); ++e) {
    for (std::size_t i = 0; i < b.p[e].size(); ++i) {
      const double p = b.p[e][i], q = b.q[e][i];
      if (!std::isfinite(p) || !std::isfinite(q) || std::abs(p) > kPressureLimit) {
        std::ostringstream os;
        os << "divergent state at pipeline " << net.pipelines[e].id << ", x = " << b.x[e][i]
           << " m";
        throw DivergenceError(os.str());
      }
      if (forbid_reverse && q < -kReverseFlowTol) {
        std::ostringstream os;
        os << "reverse flow at pipeline " << net.pipelines[e].id << ", x = " << b.x[e][i]
           << " m (q = " << q * net.constants.q_b << " kg/s)";
        throw DivergenceError(os.str());
      }
    }
  }
}

class Recorder {
public:
  Recorder(const ScenarioConfig& config, const RunOptions& options, TimeSeries& out)
      : net_(config.network),
        record_fields_(options.record_fields),
        forbid_reverse_(config.method == Method::SAS1),
        out_(out) {
    for (const auto& pipe : net_.pipelines) out_.pipelines.push_back(pipe.id);
    auto add = [&](const Probe& probe) {
      for (const auto& existing : out_.probes)
        if (existing.probe == probe) return;
      const int e = net_.pipeline_index(probe.pipeline);
      if (e < 0) throw ConfigError("probe", "unknown pipeline '" + probe.pipeline + "'");
      out_.probes.push_back({probe, {}, {}});
      resolved_.push_back({e, probe.end == PipeEnd::Inlet, probe.field == Field::Flow});
    };
    for (const auto& probe : config.probes) add(probe);
    for (const auto& probe : options.extra_probes) add(probe);
    const long steps = config.steps();
    for (auto& probe : out_.probes) {
      probe.t.reserve(steps);
      probe.value.reserve(steps);
    }
  }

  void record(double t, const Borders& b) {
    check_borders(b, net_, forbid_reverse_);
    const double p_b = net_.constants.p_b, q_b = net_.constants.q_b;
    for (std::size_t k = 0; k < resolved_.size(); ++k) {
      const auto& r = resolved_[k];
      const std::size_t i = r.inlet ? 0 : b.p[r.pipe].size() - 1;
      out_.probes[k].t.push_back(t);
      out_.probes[k].value.push_back(r.flow ? b.q[r.pipe][i] * q_b : b.p[r.pipe][i] * p_b);
    }
    if (!record_fields_) return;
    for (std::size_t e = 0; e < b.p.size(); ++e)
      for (std::size_t i = 0; i < b.p[e].size(); ++i)
        out_.samples.push_back({t, static_cast<int>(e), b.x[e][i], b.p[e][i] * p_b,
                                b.q[e][i] * q_b});
  }

private:
  const GasNetwork& net_;
  bool record_fields_;
  bool forbid_reverse_;
  TimeSeries& out_;
  std::vector<ResolvedProbe> resolved_;
};

void run_sas(const ScenarioConfig& config, const SteadyState& steady, Recorder& rec,
             RunTelemetry& meta, long& step) {
  const auto& net = config.network;
  AssemblyContext ctx(net, config.M, config.Mx, config.dT);
  FactorizationCounter counter;
  SasOptions opts;
  opts.scheme = config.method == Method::SAS1 ? SasScheme::SAS1 : SasScheme::SAS2;
  opts.R_order = config.R_order;
  opts.eps_b = config.eps_b;
  LayerSolver solver(ctx, opts, &counter);
  StepState state = build_initial_state(net, steady);

  Borders b;
  const std::size_t pipes = net.pipelines.size();
  b.p.resize(pipes);
  b.q.resize(pipes);
  b.x.resize(pipes);
  for (std::size_t e = 0; e < pipes; ++e) {
    const int n = net.pipelines[e].cells();
    b.p[e].resize(n + 1);
    b.q[e].resize(n + 1);
    for (int i = 0; i <= n; ++i) b.x[e].push_back(i * net.pipelines[e].dL);
  }

  const long steps = config.steps();
  for (step = 1; step <= steps; ++step) {
    LayerStats stats;
    const auto tensors = solver.solve_layers(state, (step - 1) * config.dT, &stats);
    state = advance_state(ctx.basis, tensors);
    meta.layers_solved += stats.layers_solved;
    meta.max_layers = std::max(meta.max_layers, stats.layers_solved);
    for (std::size_t e = 0; e < pipes; ++e) {
      const auto& cells = state.pipes[e];
      const std::size_t n = cells.size();
      for (std::size_t i = 0; i < n; ++i) {
        b.p[e][i] = cells[i].p(0.0);
        b.q[e][i] = cells[i].q(0.0);
      }
      b.p[e][n] = cells[n - 1].p(1.0);
      b.q[e][n] = cells[n - 1].q(1.0);
    }
    rec.record(step * config.dT, b);
  }
  meta.factorizations = counter.value();
  meta.condition_estimate = solver.condition_estimate();
}

void run_fdm(const ScenarioConfig& config, const SteadyState& steady, Recorder& rec,
             RunTelemetry& meta, long& step) {
  FdmContext ctx(config.network, config.dT, config.refine_x);
  FactorizationCounter counter;
  SparseLuSolver solver(&counter);
  FdmState state = fdm_initial_state(ctx, steady);

  Borders b;
  const std::size_t pipes = ctx.cells.size();
  b.x.resize(pipes);
  for (std::size_t e = 0; e < pipes; ++e)
    for (int i = 0; i <= ctx.cells[e]; ++i) b.x[e].push_back(i * ctx.dL[e]);

  const long steps = config.steps();
  for (step = 1; step <= steps; ++step) {
    const FdmSystem sys = fdm_assemble_step(ctx, state, (step - 1) * config.dT);
    state = fdm_step(ctx, sys, solver, step);
    b.p.clear();
    b.q.clear();
    for (const auto& s : state.pipes) {
      b.p.emplace_back(s.p.data(), s.p.data() + s.p.size());
      b.q.emplace_back(s.q.data(), s.q.data() + s.q.size());
    }
    rec.record(step * config.dT, b);
  }
  meta.factorizations = counter.value();
}

}  // namespace

TimeSeries run_simulation(const ScenarioConfig& config, const RunOptions& options) {
  const auto violations = validate_scenario(config);
  if (!violations.empty())
    throw ConfigError(violations.front().entity, violations.front().rule);

  const auto start = std::chrono::steady_clock::now();
  TimeSeries ts;
  auto& meta = ts.meta;
  meta.method = config.method;
  meta.dT = config.dT;
  meta.steps = config.steps();
  if (config.method != Method::FDM) {
    meta.M = config.M;
    meta.Mx = config.Mx;
    meta.R_order = config.R_order;
  }

  const SteadyState steady = solve_steady(config.network, 0.0);
  Recorder rec(config, options, ts);
  if (options.record_fields) {
    std::size_t borders = 0;
    for (const auto& pipe : config.network.pipelines)
      borders += pipe.cells() * (config.method == Method::FDM ? config.refine_x : 1) + 1;
    ts.samples.reserve(borders * meta.steps);
  }

  long step = 0;
  const std::string tag = to_string(config.method);
  try {
    if (config.method == Method::FDM)
      run_fdm(config, steady, rec, meta, step);
    else
      run_sas(config, steady, rec, meta, step);
  } catch (const DivergenceError& e) {
    throw DivergenceError(tag + " step " + std::to_string(step) + ": " + e.what(), step);
  } catch (const SolverError& e) {
    throw SolverError(tag + " step " + std::to_string(step) + ": " + e.what(),
                      e.condition_estimate());
  }
  meta.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ts;
}

const ProbeSeries& find_probe(const TimeSeries& ts, const Probe& probe) {
  for (const auto& p : ts.probes)
    if (p.probe == probe) return p;
  throw ConfigError("probe", "probe " + to_string(probe) + " was not recorded");
}

double probe_base(const GasConstants& gas, const Probe& probe) {
  return probe.field == Field::Flow ? gas.q_b : gas.p_b;
}

double compute_err(const ProbeSeries& sim, const ProbeSeries& ref, double base) {
  if (sim.t.size() != sim.value.size() || ref.t.size() != ref.value.size())
    throw AlignmentError("probe series with mismatched time and value lengths");
  if (sim.t.empty()) throw AlignmentError("simulated series is empty");
  double err = 0.0;
  for (std::size_t k = 0; k < sim.t.size(); ++k) {
    const double t = sim.t[k];
    const auto it = std::lower_bound(ref.t.begin(), ref.t.end(), t - kAlignTol);
    if (it == ref.t.end() || std::abs(*it - t) > kAlignTol) {
      std::ostringstream os;
      os << "no reference sample within " << kAlignTol << " s of t = " << t << " s";
      throw AlignmentError(os.str());
    }
    const double r = ref.value[static_cast<std::size_t>(it - ref.t.begin())];
    err = std::max(err, std::abs(sim.value[k] - r) / base);
  }
  return err;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_timeseries_csv(std::ostream& os, const TimeSeries& ts) {
  os << "t_s,pipeline,x_m,p_pa,q_kg_s\n";
  for (const auto& s : ts.samples) {
    os << fmt("%.15g", s.t) << ',' << ts.pipelines[s.pipeline] << ',' << fmt("%.15g", s.x)
       << ',' << fmt("%.15g", s.p) << ',' << fmt("%.15g", s.q) << '\n';
  }
}

TimeSeries read_timeseries_csv(std::istream& is) {
  TimeSeries ts;
  std::string line;
  int lineno = 0;
  if (!std::getline(is, line)) throw ParseError(1, "empty time series file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,pipeline,x_m,p_pa,q_kg_s")
    throw ParseError(1, "unexpected header '" + line + "'");
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 5) throw ParseError(lineno, "expected 5 columns");
    double v[4];
    const int idx[4] = {0, 2, 3, 4};
    for (int k = 0; k < 4; ++k) {
      const std::string& c = cols[idx[k]];
      char* end = nullptr;
      v[k] = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size())
        throw ParseError(lineno, "malformed number '" + c + "'");
    }
    auto it = std::find(ts.pipelines.begin(), ts.pipelines.end(), cols[1]);
    if (it == ts.pipelines.end()) {
      ts.pipelines.push_back(cols[1]);
      it = ts.pipelines.end() - 1;
    }
    ts.samples.push_back(
        {v[0], static_cast<int>(it - ts.pipelines.begin()), v[1], v[2], v[3]});
  }
  return ts;
}

ProbeSeries probe_from_samples(const TimeSeries& ts, const Probe& probe) {
  const auto it = std::find(ts.pipelines.begin(), ts.pipelines.end(), probe.pipeline);
  if (it == ts.pipelines.end())
    throw ConfigError("probe", "pipeline '" + probe.pipeline + "' not present in series");
  const int e = static_cast<int>(it - ts.pipelines.begin());
  double target = probe.end == PipeEnd::Inlet ? 0.0 : -1.0;
  if (probe.end == PipeEnd::Outlet)
    for (const auto& s : ts.samples)
      if (s.pipeline == e) target = std::max(target, s.x);
  ProbeSeries out;
  out.probe = probe;
  for (const auto& s : ts.samples) {
    if (s.pipeline != e || s.x != target) continue;
    out.t.push_back(s.t);
    out.value.push_back(probe.field == Field::Flow ? s.q : s.p);
  }
  if (out.t.empty())
    throw ConfigError("probe", "no samples for " + to_string(probe) + " in series");
  return out;
}

namespace {

using detail::Reader;
using toml::Table;
using toml::Value;

template <typename T, typename Conv>
std::vector<T> scalar_or_array(const Table& t, std::string_view key, const std::string& path,
                               Conv conv, std::vector<T> fallback) {
  const Value* v = t.find(key);
  const std::string f = path + "." + std::string(key);
  if (!v) {
    if (fallback.empty()) throw ConfigError(f, "required field missing");
    return fallback;
  }
  std::vector<T> out;
  if (v->is_array()) {
    for (const auto& item : std::get<toml::Array>(v->data)) out.push_back(conv(item, f));
    if (out.empty()) throw ConfigError(f, "empty array");
  } else {
    out.push_back(conv(*v, f));
  }
  return out;
}

Method method_of(const Value& v, const std::string& f) {
  const auto m = parse_method(Reader::as_string(v, f));
  if (!m) throw ConfigError(f, "method must be sas1, sas2 or fdm");
  return *m;
}

SweepEntry parse_reference(const Table& t) {
  const Reader r(t, "reference");
  r.reject_unknown({"method", "dT", "M", "Mx", "refine_x"});
  SweepEntry ref;
  ref.method = method_of(r.require("method"), r.field("method"));
  ref.dT = r.number("dT");
  ref.M = r.opt_integer("M").value_or(ref.M);
  ref.Mx = r.opt_integer("Mx").value_or(ref.Mx);
  ref.refine_x = r.opt_integer("refine_x").value_or(1);
  return ref;
}

}  // namespace

SweepSpec parse_sweep(std::string_view text, const std::filesystem::path& base_dir) {
  const Table root = toml::parse(text);
  const Reader r(root, "");
  r.reject_unknown({"scenario", "probe", "reference", "grid"});
  SweepSpec spec;
  const auto grids = detail::tables_at(root, "grid");
  for (std::size_t g = 0; g < grids.size(); ++g) {
    const Table& t = *grids[g];
    const std::string path = "grid[" + std::to_string(g) + "]";
    Reader(t, path).reject_unknown({"method", "M", "Mx", "dT", "refine_x"});
    const auto methods = scalar_or_array<Method>(t, "method", path, method_of, {});
    const auto Ms = scalar_or_array<int>(t, "M", path, Reader::as_integer, {2});
    const auto Mxs = scalar_or_array<int>(t, "Mx", path, Reader::as_integer, {1});
    const auto dTs = scalar_or_array<double>(t, "dT", path, Reader::as_number, {});
    const auto refines = scalar_or_array<int>(t, "refine_x", path, Reader::as_integer, {1});
    for (Method m : methods) {
      const bool fdm = m == Method::FDM;
      for (int M : fdm ? std::vector<int>{0} : Ms)
        for (int Mx : fdm ? std::vector<int>{0} : Mxs)
          for (double dT : dTs)
            for (int rx : refines) spec.entries.push_back({m, M, Mx, dT, rx});
    }
  }
  if (spec.entries.empty()) return spec;

  std::filesystem::path scenario = r.string("scenario");
  spec.scenario = scenario.is_absolute() ? scenario : base_dir / scenario;
  spec.probe = parse_probe(r.string("probe"));
  spec.reference = parse_reference(detail::table_at(root, "reference"));
  return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  return parse_sweep(read_text_file(path), path.parent_path());
}

ScenarioConfig sweep_config(const ScenarioConfig& base, const SweepEntry& entry) {
  ScenarioConfig c = base;
  c.method = entry.method;
  c.dT = entry.dT;
  c.refine_x = entry.refine_x;
  if (entry.method != Method::FDM) {
    c.M = entry.M;
    c.Mx = entry.Mx;
  }
  return c;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs) {
  std::vector<SweepRow> rows(spec.entries.size());
  if (spec.entries.empty()) return rows;

  const ScenarioConfig base = load_scenario(spec.scenario);
  RunOptions opts;
  opts.record_fields = false;
  opts.extra_probes = {spec.probe};
  const TimeSeries ref = run_simulation(sweep_config(base, spec.reference), opts);
  const ProbeSeries& ref_probe = find_probe(ref, spec.probe);
  const double base_value = probe_base(base.network.constants, spec.probe);

  auto run_one = [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.entry = spec.entries[k];
    const ScenarioConfig cfg = sweep_config(base, row.entry);
    const auto violations = validate_scenario(cfg);
    if (!violations.empty()) {
      row.status = "invalid-config";
      row.message = violations.front().entity + ": " + violations.front().rule;
      return;
    }
    try {
      const TimeSeries ts = run_simulation(cfg, opts);
      const double err = compute_err(find_probe(ts, spec.probe), ref_probe, base_value);
      row.log10_err = std::log10(err);
      row.wall_s = ts.meta.wall_s;
      row.factorizations = ts.meta.factorizations;
      row.status = "ok";
    } catch (const DivergenceError& e) {
      row.status = "divergent";
      row.message = e.what();
    } catch (const SolverError& e) {
      row.status = "divergent";
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = "error";
      row.message = e.what();
    }
  };

  const std::size_t n = rows.size();
  const std::size_t workers = std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, n);
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) run_one(k);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) run_one(k);
    });
  for (auto& th : pool) th.join();
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "method,M,Mx,dT_s,log10_err,wall_s,factorizations,status\n";
  for (const auto& r : rows) {
    const bool fdm = r.entry.method == Method::FDM;
    os << to_string(r.entry.method) << ',' << (fdm ? "" : std::to_string(r.entry.M)) << ','
       << (fdm ? "" : std::to_string(r.entry.Mx)) << ',' << fmt("%.15g", r.entry.dT) << ','
       << (r.log10_err ? fmt("%.6f", *r.log10_err) : "") << ','
       << (r.status == "ok" ? fmt("%.6f", r.wall_s) : "") << ','
       << (r.status == "ok" ? std::to_string(r.factorizations) : "") << ',' << r.status
       << '\n';
  }
}

}  // namespace gasnet
