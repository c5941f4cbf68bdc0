#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "gasnet/sas.hpp"
#include "gasnet/steady.hpp"

using namespace gasnet;
using Catch::Approx;

namespace {

struct Run {
  ScenarioConfig cfg;
  AssemblyContext ctx;
  StepState state;
  FactorizationCounter counter;
  LayerSolver solver;

  Run(ScenarioConfig c, SasScheme scheme, int M, int Mx, double dT, int R = 10)
      : cfg(std::move(c)),
        ctx(cfg.network, M, Mx, dT),
        state(build_initial_state(cfg.network, solve_steady(cfg.network))),
        solver(ctx, {scheme, R, 1e-12}, &counter) {}
};

// Largest violation of the collocation constraints by the summed solution.
double constraint_violation(const AssemblyContext& ctx, const StepState& ini,
                            const NetworkTensors& T, double t) {
  const auto& net = *ctx.net;
  const auto& B = ctx.basis;
  double worst = 0;
  auto at = [&](int e, int i, double dx, double dt) { return evaluate_solution(B, T[e][i], dx, dt); };
  for (std::size_t e = 0; e < T.size(); ++e) {
    const int n = static_cast<int>(T[e].size());
    for (int i = 0; i < n; ++i) {
      for (double dx : ctx.layout.dx) {
        const PQ v = at(e, i, dx, 0.0);
        worst = std::max(worst, std::abs(v.p - ini.pipes[e][i].p(dx)));
        worst = std::max(worst, std::abs(v.q - ini.pipes[e][i].q(dx)));
      }
      if (i + 1 < n)
        for (double dt : ctx.layout.dt) {
          const PQ a = at(e, i, 1.0, dt), b = at(e, i + 1, 0.0, dt);
          worst = std::max({worst, std::abs(a.p - b.p), std::abs(a.q - b.q)});
        }
    }
  }
  const auto att = attachments(net);
  for (std::size_t v = 0; v < net.nodes.size(); ++v) {
    for (double dt : ctx.layout.dt) {
      const double sig = signal_eval(net.nodes[v].signal, t + dt * ctx.dT);
      switch (net.nodes[v].kind) {
        case NodeKind::Supply:
          for (int e : att[v].inlets)
            worst = std::max(worst, std::abs(at(e, 0, 0.0, dt).p - sig / net.constants.p_b));
          break;
        case NodeKind::Demand:
          for (int e : att[v].outlets) {
            const int last = static_cast<int>(T[e].size()) - 1;
            worst = std::max(worst, std::abs(at(e, last, 1.0, dt).q - sig / net.constants.q_b));
          }
          break;
        case NodeKind::Junction: {
          double balance = 0;
          std::vector<double> pressures;
          for (int e : att[v].outlets) {
            const PQ x = at(e, static_cast<int>(T[e].size()) - 1, 1.0, dt);
            balance += x.q;
            pressures.push_back(x.p);
          }
          for (int e : att[v].inlets) {
            const PQ x = at(e, 0, 0.0, dt);
            balance -= x.q;
            pressures.push_back(x.p);
          }
          worst = std::max(worst, std::abs(balance - sig / net.constants.q_b));
          for (double p : pressures) worst = std::max(worst, std::abs(p - pressures.front()));
          break;
        }
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("layer-0 solve satisfies its system", "[sas]") {
  for (auto [cfg, M, Mx] : {std::tuple{fixtures::single_pipeline(), 4, 1},
                            std::tuple{fixtures::single_pipeline(), 3, 2},
                            std::tuple{fixtures::six_node(), 3, 2}}) {
    const AssemblyContext ctx(cfg.network, M, Mx, 0.1);
    const auto state = build_initial_state(cfg.network, solve_steady(cfg.network));
    LayerInputs in;
    in.state = &state;
    const auto sys = assemble_system(ctx, in);
    DenseLuSolver lu;
    lu.factorize(sys.A);
    const Eigen::VectorXd c = lu.solve(sys.b);
    const double res = (sys.A * c - sys.b).lpNorm<Eigen::Infinity>();
    CHECK(res <= 1e-10 * (1 + sys.b.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("solved steps honor every collocation constraint", "[sas]") {
  for (auto scheme : {SasScheme::SAS1, SasScheme::SAS2}) {
    for (auto [cfg, M, Mx, dT] : {std::tuple{fixtures::single_pipeline(), 4, 1, 0.5},
                                  std::tuple{fixtures::single_pipeline(), 2, 1, 1.0},
                                  std::tuple{fixtures::six_node(), 3, 2, 0.1}}) {
      Run run(cfg, scheme, M, Mx, dT);
      for (int step = 0; step < 5; ++step) {
        const double t = step * dT;
        const auto T = run.solver.solve_layers(run.state, t);
        CHECK(constraint_violation(run.ctx, run.state, T, t) <= 1e-10);
        run.state = advance_state(run.ctx.basis, T);
      }
    }
  }
}

TEST_CASE("frictionless layers stop after layer 1", "[sas]") {
  const auto net = fixtures::straight_pipe(2000, 400, 0.0, 6e6, 300);
  ScenarioConfig cfg;
  cfg.network = net;
  for (auto scheme : {SasScheme::SAS1, SasScheme::SAS2}) {
    Run run(cfg, scheme, 3, 2, 0.5);
    LayerStats stats;
    const auto T = run.solver.solve_layers(run.state, 0.0, &stats);
    CHECK(stats.layers_solved == 1);
    REQUIRE_FALSE(stats.rhs_norms.empty());
    CHECK(stats.rhs_norms.front() == 0.0);
    for (const auto& cells : T)
      for (const auto& c : cells) {
        CHECK(c.p.rightCols(c.p.cols() - 1).isZero());
        CHECK(c.q.rightCols(c.q.cols() - 1).isZero());
      }
  }
}

TEST_CASE("frictionless steady start is a fixed point", "[sas]") {
  const auto net = fixtures::straight_pipe(2000, 400, 0.0, 6e6, 300);
  ScenarioConfig cfg;
  cfg.network = net;
  Run run(cfg, SasScheme::SAS2, 4, 1, 0.5);
  const StepState start = run.state;
  const auto T = run.solver.solve_layers(run.state, 0.0);
  const StepState next = advance_state(run.ctx.basis, T);
  for (std::size_t i = 0; i < next.pipes[0].size(); ++i)
    for (double dx : {0.0, 0.3, 1.0}) {
      CHECK(std::abs(next.pipes[0][i].p(dx) - start.pipes[0][i].p(dx)) <= 1e-10);
      CHECK(std::abs(next.pipes[0][i].q(dx) - start.pipes[0][i].q(dx)) <= 1e-10);
    }
}

TEST_CASE("factorization counts per scheme", "[sas]") {
  Run sas2(fixtures::single_pipeline(), SasScheme::SAS2, 2, 1, 1.0);
  Run sas1(fixtures::single_pipeline(), SasScheme::SAS1, 2, 1, 1.0);
  for (int step = 0; step < 10; ++step) {
    sas2.state = advance_state(sas2.ctx.basis, sas2.solver.solve_layers(sas2.state, step));
    sas1.state = advance_state(sas1.ctx.basis, sas1.solver.solve_layers(sas1.state, step));
  }
  CHECK(sas2.counter.value() == 1);
  CHECK(sas1.counter.value() == 20);
}

TEST_CASE("SAS-2 layer norms decay geometrically", "[sas]") {
  for (double dT : {0.1, 0.5}) {
    Run run(fixtures::single_pipeline(), SasScheme::SAS2, 4, 1, dT, 12);
    for (int step = 0; step < 3; ++step) {
      LayerStats stats;
      const auto T = run.solver.solve_layers(run.state, step * dT, &stats);
      INFO("dT = " << dT << ", step " << step);
      CHECK(stats.layers_solved < 13);
      for (std::size_t r = 2; r + 1 < stats.layer_norms.size(); ++r)
        CHECK(stats.layer_norms[r + 1] < stats.layer_norms[r]);
      run.state = advance_state(run.ctx.basis, T);
    }
  }
}

TEST_CASE("advanced profile equals the solution at the step end", "[sas]") {
  Run run(fixtures::single_pipeline(), SasScheme::SAS2, 4, 1, 0.5);
  const auto T = run.solver.solve_layers(run.state, 0.0);
  const auto next = advance_state(run.ctx.basis, T);
  for (std::size_t i = 0; i < T[0].size(); ++i)
    for (double dx : {0.0, 0.25, 0.5, 1.0}) {
      const PQ v = evaluate_solution(run.ctx.basis, T[0][i], dx, 1.0);
      CHECK(next.pipes[0][i].p(dx) == Approx(v.p).epsilon(1e-14));
      CHECK(next.pipes[0][i].q(dx) == Approx(v.q).epsilon(1e-14));
    }
}

TEST_CASE("constant tensors", "[sas]") {
  const MonomialBasis B(3);
  CellCoeffTensor c;
  c.p = Eigen::MatrixXd::Zero(B.size(), 4);
  c.q = Eigen::MatrixXd::Zero(B.size(), 4);
  c.p(0, 0) = 2.5;
  c.q(0, 0) = 0.1;
  for (double dx : {0.0, 0.5, 1.0})
    for (double dt : {0.0, 0.5, 1.0}) {
      CHECK(evaluate_solution(B, c, dx, dt).p == 2.5);
      CHECK(evaluate_solution(B, c, dx, dt).q == 0.1);
    }
  const CellState next = advance_initial_profile(B, c);
  CHECK(next.p(0.7) == 2.5);
  CHECK(next.q(0.2) == 0.1);
}

TEST_CASE("system dump format", "[sas]") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = 1.5;
  A(1, 0) = -2;
  Eigen::VectorXd b(2);
  b << 0, 0.25;
  std::ostringstream os;
  write_system_dump(os, A, b);
  CHECK(os.str() == "2 2 2\n0 0 1.5\n1 0 -2\n1 2 0.25\n");
}
