#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "gasnet/driver.hpp"
#include "gasnet/error.hpp"

using namespace gasnet;
using Catch::Approx;

namespace {

ProbeSeries series(std::vector<double> t, std::vector<double> v) {
  ProbeSeries s;
  s.probe = parse_probe("p1:inlet:q");
  s.t = std::move(t);
  s.value = std::move(v);
  return s;
}

// Sweep CSV with the measured wall time column blanked.
std::string masked_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_sweep_csv(os, rows);
  std::istringstream in(os.str());
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() == 8) cols[5] = "*";
    for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
    out += "\n";
  }
  return out;
}

std::string small_sweep_text() {
  return "scenario = \"" + fixtures::scenario_path("single_pipeline.toml") + "\"\n" +
         "probe = \"p1:inlet:q\"\n"
         "[reference]\nmethod = \"fdm\"\ndT = 0.05\nrefine_x = 4\n"
         "[[grid]]\nmethod = [\"sas1\", \"sas2\"]\nM = 2\nMx = [1, 2]\ndT = [0.5, 1]\n"
         "[[grid]]\nmethod = \"fdm\"\ndT = [0.5, 1]\n";
}

}  // namespace

TEST_CASE("ERR of identical and offset series", "[driver]") {
  const auto a = series({1, 2, 3}, {300, 290, 280});
  CHECK(compute_err(a, a, 2000) == 0.0);
  const auto b = series({1, 2, 3}, {302, 292, 282});
  CHECK(compute_err(b, a, 2000) == Approx(1e-3));
}

TEST_CASE("ERR samples the reference at the simulated instants", "[driver]") {
  const auto ref = series({0.5, 1.0, 1.5, 2.0}, {0, 10, 1000, 20});
  const auto sim = series({1.0, 2.0}, {10, 22});
  CHECK(compute_err(sim, ref, 2000) == Approx(2.0 / 2000));
  const auto off = series({1.25}, {10});
  CHECK_THROWS_AS(compute_err(off, ref, 2000), AlignmentError);
}

TEST_CASE("SAS-2 run telemetry and sample layout", "[driver]") {
  auto cfg = fixtures::single_pipeline();
  cfg.method = Method::SAS2;
  cfg.M = 2;
  cfg.Mx = 1;
  cfg.dT = 1;
  const TimeSeries ts = run_simulation(cfg);
  CHECK(ts.meta.steps == 200);
  CHECK(ts.meta.factorizations == 1);
  CHECK(ts.samples.size() == 200u * 6u);
  CHECK(ts.samples.front().t == 1.0);
  CHECK(ts.samples.back().t == 200.0);
  CHECK(ts.samples.back().x == 2000.0);
  const auto& probe = find_probe(ts, parse_probe("p1:inlet:q"));
  CHECK(probe.t.size() == 200);
}

TEST_CASE("SAS-1 factors twice per step", "[driver]") {
  auto cfg = fixtures::single_pipeline();
  cfg.method = Method::SAS1;
  cfg.dT = 1;
  const TimeSeries ts = run_simulation(cfg);
  CHECK(ts.meta.factorizations == 400);
}

TEST_CASE("FDM run length", "[driver]") {
  auto cfg = fixtures::single_pipeline();
  cfg.method = Method::FDM;
  cfg.dT = 0.05;
  const TimeSeries ts = run_simulation(cfg);
  CHECK(ts.meta.steps == 4000);
  CHECK(ts.samples.size() == 4000u * 6u);
}

TEST_CASE("invalid configs are rejected before running", "[driver]") {
  auto cfg = fixtures::single_pipeline();
  cfg.Mx = cfg.M;
  CHECK_THROWS_AS(run_simulation(cfg), ConfigError);
}

TEST_CASE("frictionless steady scenario stays constant for every method", "[driver]") {
  ScenarioConfig cfg;
  cfg.network = fixtures::straight_pipe(2000, 400, 0.0, 6e6, 300);
  cfg.duration = 20;
  cfg.dT = 0.5;
  cfg.M = 3;
  cfg.Mx = 2;
  cfg.probes = {parse_probe("p:inlet:q"), parse_probe("p:outlet:p")};
  for (Method m : {Method::SAS1, Method::SAS2, Method::FDM}) {
    cfg.method = m;
    const TimeSeries ts = run_simulation(cfg);
    for (double v : find_probe(ts, cfg.probes[0]).value)
      CHECK(std::abs(v - 300) <= 1e-9 * 2000);
    for (double v : find_probe(ts, cfg.probes[1]).value)
      CHECK(std::abs(v - 6e6) <= 1e-9 * 1e6);
  }
}

TEST_CASE("time series CSV round trip", "[driver]") {
  auto cfg = fixtures::six_node();
  cfg.duration = 1;
  const TimeSeries ts = run_simulation(cfg);
  std::ostringstream os;
  write_timeseries_csv(os, ts);
  std::istringstream in(os.str());
  const TimeSeries back = read_timeseries_csv(in);
  CHECK(back.pipelines == ts.pipelines);
  REQUIRE(back.samples.size() == ts.samples.size());
  for (std::size_t k = 0; k < ts.samples.size(); ++k) {
    CHECK(back.samples[k].q == Approx(ts.samples[k].q).epsilon(1e-14));
    CHECK(back.samples[k].p == Approx(ts.samples[k].p).epsilon(1e-14));
  }
  std::ostringstream again;
  write_timeseries_csv(again, back);
  CHECK(again.str() == os.str());

  const auto probe = parse_probe("e3:inlet:q");
  const auto from_csv = probe_from_samples(back, probe);
  const auto& direct = find_probe(ts, probe);
  REQUIRE(from_csv.value.size() == direct.value.size());
  CHECK(compute_err(from_csv, direct, 2000) <= 1e-14);
}

TEST_CASE("malformed time series CSV", "[driver]") {
  std::istringstream bad_header("t,pipeline\n");
  CHECK_THROWS_AS(read_timeseries_csv(bad_header), ParseError);
  std::istringstream bad_number("t_s,pipeline,x_m,p_pa,q_kg_s\n1,p1,0,abc,3\n");
  CHECK_THROWS_AS(read_timeseries_csv(bad_number), ParseError);
}

TEST_CASE("shipped sweep specs expand in grid order", "[driver]") {
  const auto t2 = load_sweep(fixtures::scenario_path("table2.sweep"));
  REQUIRE(t2.entries.size() == 15);
  CHECK(t2.entries[0].M == 2);
  CHECK(t2.entries[0].dT == 0.05);
  CHECK(t2.entries[14].M == 4);
  CHECK(t2.entries[14].dT == 1.0);
  for (const auto& e : t2.entries) CHECK(e.method == Method::SAS1);
  CHECK(t2.reference.method == Method::FDM);
  CHECK(t2.reference.refine_x == 40);
  CHECK(t2.reference.dT == 0.005);

  const auto t8 = load_sweep(fixtures::scenario_path("table8.sweep"));
  CHECK(t8.entries.size() == 10);
  for (const auto& e : t8.entries) {
    CHECK(e.M == 3);
    CHECK(e.Mx == 2);
  }
  CHECK(load_sweep(fixtures::scenario_path("table4.sweep")).entries.size() == 5);
}

TEST_CASE("empty sweep gives an empty table", "[driver]") {
  const auto spec = parse_sweep("# nothing\n", ".");
  const auto rows = run_sweep(spec);
  CHECK(rows.empty());
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str() == "method,M,Mx,dT_s,log10_err,wall_s,factorizations,status\n");
}

TEST_CASE("sweep marks invalid entries and is deterministic", "[driver]") {
  const auto spec = parse_sweep(small_sweep_text(), ".");
  REQUIRE(spec.entries.size() == 10);
  const auto serial = run_sweep(spec, 1);
  const auto parallel = run_sweep(spec, 4);
  CHECK(masked_sweep_csv(serial) == masked_sweep_csv(parallel));
  int invalid = 0;
  for (const auto& row : serial) {
    if (row.entry.method != Method::FDM && row.entry.Mx == 2) {
      CHECK(row.status == "invalid-config");
      ++invalid;
    } else {
      CHECK(row.status == "ok");
      CHECK(row.log10_err.has_value());
    }
  }
  CHECK(invalid == 4);
}
