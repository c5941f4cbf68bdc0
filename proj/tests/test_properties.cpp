#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "fixtures.hpp"
#include "gasnet/driver.hpp"
#include "gasnet/sas.hpp"
#include "gasnet/steady.hpp"

using namespace gasnet;

TEST_CASE("rows balance unknowns on random trees", "[property]") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const GasNetwork net = fixtures::random_tree(rng);
    const int M = std::uniform_int_distribution<int>(2, 4)(rng);
    const int Mx = std::uniform_int_distribution<int>(1, M - 1)(rng);
    const int K = M - Mx;
    const AssemblyContext ctx(net, M, Mx, 0.5);
    const auto state = build_initial_state(net, solve_steady(net));
    LayerInputs in;
    in.state = &state;
    INFO("trial " << trial << ", M = " << M << ", Mx = " << Mx);
    const AssembledSystem sys = assemble_system(ctx, in);
    CHECK(static_cast<int>(sys.rows.size()) == ctx.index.size());

    std::map<int, int> cell_rows, node_rows;
    for (const auto& tag : sys.rows) {
      if (tag.cell >= 0) ++cell_rows[tag.entity];
      else ++node_rows[tag.entity];
    }
    const auto att = attachments(net);
    for (std::size_t v = 0; v < net.nodes.size(); ++v)
      CHECK(node_rows[static_cast<int>(v)] == K * att[v].count());
    for (std::size_t e = 0; e < net.pipelines.size(); ++e) {
      const int N = net.pipelines[e].cells();
      // PDE, initial and seam rows plus K rows at each of the two ends.
      CHECK(cell_rows[static_cast<int>(e)] + 2 * K == N * M * (M + 3));
      CHECK(2 * N * Mx + 2 * (N - 1) * K + 2 * K == 2 * N * M);
    }
  }
}

TEST_CASE("post-solve residuals on random trees", "[property]") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const GasNetwork net = fixtures::random_tree(rng, 6);
    const AssemblyContext ctx(net, 3, 2, 0.2);
    const auto state = build_initial_state(net, solve_steady(net));
    FactorizationCounter counter;
    LayerSolver solver(ctx, {SasScheme::SAS2, 10, 1e-12}, &counter);
    LayerInputs in;
    in.state = &state;
    const AssembledSystem sys = assemble_system(ctx, in);
    DenseLuSolver lu;
    lu.factorize(sys.A);
    const Eigen::VectorXd c = lu.solve(sys.b);
    CHECK((sys.A * c - sys.b).lpNorm<Eigen::Infinity>() <=
          1e-10 * (1 + sys.b.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("frictionless steady networks are preserved over 100 steps", "[property]") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    GasNetwork net = fixtures::random_tree(rng, 6);
    for (auto& pipe : net.pipelines) pipe.lambda = 0;
    for (Method m : {Method::SAS1, Method::SAS2, Method::FDM}) {
      ScenarioConfig cfg;
      cfg.network = net;
      cfg.method = m;
      cfg.duration = 50;
      cfg.dT = 0.5;
      cfg.M = 3;
      cfg.Mx = 2;
      const auto steady = solve_steady(net);
      const TimeSeries ts = run_simulation(cfg);
      CHECK(ts.meta.steps == 100);
      double worst = 0;
      for (const auto& s : ts.samples) {
        worst = std::max(worst, std::abs(s.q - steady.flows[s.pipeline]) / net.constants.q_b);
        worst = std::max(worst, std::abs(s.p - steady.profiles[s.pipeline](s.x)) /
                                    net.constants.p_b);
      }
      INFO("trial " << trial << ", method " << to_string(m));
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("physical outputs do not depend on the normalization bases", "[property]") {
  for (Method m : {Method::SAS1, Method::SAS2, Method::FDM}) {
    auto base = fixtures::single_pipeline();
    base.method = m;
    base.M = 3;
    base.Mx = 2;
    base.dT = 0.5;
    base.duration = 50;
    auto scaled = base;
    scaled.network.constants.p_b *= 3.7;
    scaled.network.constants.q_b *= 0.45;
    const TimeSeries a = run_simulation(base);
    const TimeSeries b = run_simulation(scaled);
    REQUIRE(a.samples.size() == b.samples.size());
    double worst = 0;
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      worst = std::max(worst, std::abs(a.samples[k].p - b.samples[k].p) / std::abs(a.samples[k].p));
      worst = std::max(worst, std::abs(a.samples[k].q - b.samples[k].q) / std::abs(a.samples[k].q));
    }
    INFO("method " << to_string(m));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("identical configs give bit-identical series", "[property]") {
  auto cfg = fixtures::six_node();
  cfg.duration = 5;
  const TimeSeries a = run_simulation(cfg);
  const TimeSeries b = run_simulation(cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  bool same = true;
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    same = same && a.samples[k].p == b.samples[k].p && a.samples[k].q == b.samples[k].q;
  CHECK(same);
}
