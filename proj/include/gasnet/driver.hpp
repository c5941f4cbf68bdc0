// Time stepping for every method, probe extraction, the ERR metric, sweeps
// and the CSV artifacts.

#ifndef GASNET_DRIVER_HPP
#define GASNET_DRIVER_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gasnet/scenario.hpp"

namespace gasnet {

/// State at one pipeline border point, in SI units.
struct Sample {
  double t;
  int pipeline;  // index into TimeSeries::pipelines
  double x;
  double p;
  double q;
};

struct ProbeSeries {
  Probe probe;
  std::vector<double> t;
  std::vector<double> value;
};

struct RunTelemetry {
  Method method = Method::SAS2;
  int M = 0;
  int Mx = 0;
  int R_order = 0;
  double dT = 0.0;
  long steps = 0;
  double wall_s = 0.0;
  long factorizations = 0;
  long layers_solved = 0;  // summed over steps, SAS only
  int max_layers = 0;      // per step, SAS only
  double condition_estimate = 0.0;
};

struct TimeSeries {
  std::vector<std::string> pipelines;
  std::vector<Sample> samples;  // ordered by (t, pipeline, x)
  std::vector<ProbeSeries> probes;
  RunTelemetry meta;
};

struct RunOptions {
  /// Keep every border sample. Probes are always recorded.
  bool record_fields = true;
  /// Probes recorded in addition to the scenario's own.
  std::vector<Probe> extra_probes;
};

/// Steady initialization followed by duration / dT steps of the configured
/// method. Samples are taken at the end of each step. Errors carry the
/// method and step index in their message.
TimeSeries run_simulation(const ScenarioConfig& config, const RunOptions& options = {});

const ProbeSeries& find_probe(const TimeSeries& ts, const Probe& probe);

/// max_k |sim(t_k) - ref(t_k)| / base over the instants of `sim`. Each
/// instant must have a reference sample within 1e-9 s; otherwise
/// AlignmentError.
double compute_err(const ProbeSeries& sim, const ProbeSeries& ref, double base);

/// q_b for flow probes, p_b for pressure probes.
double probe_base(const GasConstants& gas, const Probe& probe);

/// Header `t_s,pipeline,x_m,p_pa,q_kg_s`, 15 significant digits.
void write_timeseries_csv(std::ostream& os, const TimeSeries& ts);

/// Reads a TimeSeries CSV back (samples and pipeline ids only). Throws
/// ParseError on malformed content.
TimeSeries read_timeseries_csv(std::istream& is);

/// Probe values from recorded samples: the x = 0 border for inlets and the
/// largest x of the pipeline for outlets. Throws ConfigError when the
/// pipeline is absent.
ProbeSeries probe_from_samples(const TimeSeries& ts, const Probe& probe);

/// One sweep configuration.
struct SweepEntry {
  Method method = Method::SAS2;
  int M = 2;
  int Mx = 1;
  double dT = 0.0;
  int refine_x = 1;
};

struct SweepSpec {
  std::filesystem::path scenario;
  Probe probe;
  SweepEntry reference;
  std::vector<SweepEntry> entries;
};

struct SweepRow {
  SweepEntry entry;
  std::optional<double> log10_err;
  double wall_s = 0.0;
  long factorizations = 0;
  std::string status;  // ok, divergent, invalid-config, error
  std::string message;
};

/// Sweep file: `scenario`, `probe`, a `[reference]` table and `[[grid]]`
/// tables whose method / M / Mx / dT / refine_x are scalars or arrays. Grid
/// tables expand as a cartesian product (method, M, Mx, dT), in file order.
/// Relative scenario paths resolve against `base_dir`.
SweepSpec parse_sweep(std::string_view text, const std::filesystem::path& base_dir);
SweepSpec load_sweep(const std::filesystem::path& path);

/// Config for one entry of the sweep, derived from the scenario.
ScenarioConfig sweep_config(const ScenarioConfig& base, const SweepEntry& entry);

/// Runs the reference once and then every entry, up to `jobs` at a time.
/// Per-entry failures become status rows; reference failures throw.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1);

/// Header `method,M,Mx,dT_s,log10_err,wall_s,factorizations,status`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace gasnet

#endif  // GASNET_DRIVER_HPP
