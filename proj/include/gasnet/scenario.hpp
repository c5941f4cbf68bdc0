// Scenario configuration: network plus simulation settings, parsed from and
// emitted to the scenario file format (a TOML subset, see README).

#ifndef GASNET_SCENARIO_HPP
#define GASNET_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasnet/network.hpp"

namespace gasnet {

enum class Method { SAS1, SAS2, FDM };

const char* to_string(Method m);
/// Accepts "sas1", "sas2", "fdm" (case-insensitive, "SAS-1" style too).
std::optional<Method> parse_method(std::string_view text);

struct Probe {
  std::string pipeline;
  PipeEnd end = PipeEnd::Inlet;
  Field field = Field::Flow;

  friend bool operator==(const Probe&, const Probe&) = default;
};

/// `pipeline:end:field`, e.g. `e3:inlet:q`.
std::string to_string(const Probe& probe);
Probe parse_probe(std::string_view text);

inline constexpr int kDefaultROrder = 10;
inline constexpr double kDefaultEpsB = 1e-12;

struct ScenarioConfig {
  GasNetwork network;
  double duration = 0.0;  // [s]
  double dT = 0.0;        // [s]
  Method method = Method::SAS2;
  int M = 2;
  int Mx = 1;
  int R_order = kDefaultROrder;
  double eps_b = kDefaultEpsB;
  int refine_x = 1;  // FDM only: cells per SAS cell length
  std::vector<Probe> probes;
  std::string output;

  /// duration / dT, rounded; valid only after validation.
  long steps() const;
};

/// Parses scenario text. Throws ParseError on syntax problems and
/// ConfigError (naming the field) on schema or semantic problems, including
/// every violation reported by validate_scenario. With `validate` false
/// only syntax and schema are checked.
ScenarioConfig parse_scenario(std::string_view text, bool validate = true);

/// Reads and parses a scenario file. I/O failures throw std::ios_base::failure.
ScenarioConfig load_scenario(const std::filesystem::path& path, bool validate = true);

/// Canonical scenario text. parse_scenario(emit_scenario(c)) reproduces c.
std::string emit_scenario(const ScenarioConfig& config);

/// Network violations plus simulation-setting violations (time grid, balance
/// condition, probes) and steady-flow direction. Empty iff valid.
std::vector<Violation> validate_scenario(const ScenarioConfig& config);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gasnet

#endif  // GASNET_SCENARIO_HPP
