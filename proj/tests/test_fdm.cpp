#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "gasnet/fdm.hpp"
#include "gasnet/steady.hpp"

using namespace gasnet;

namespace {

double max_change(const FdmState& a, const FdmState& b) {
  double worst = 0;
  for (std::size_t e = 0; e < a.pipes.size(); ++e) {
    worst = std::max(worst, (a.pipes[e].p - b.pipes[e].p).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (a.pipes[e].q - b.pipes[e].q).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace

TEST_CASE("system dimension", "[fdm]") {
  const auto net = fixtures::six_node().network;
  const FdmContext ctx(net, 0.1, 2);
  int expected = 0;
  for (const auto& p : net.pipelines) expected += 2 * (2 * p.cells() + 1);
  CHECK(ctx.size == expected);
  const auto state = fdm_initial_state(ctx, solve_steady(net));
  const auto sys = fdm_assemble_step(ctx, state, 0.0);
  CHECK(sys.A.rows() == expected);
  CHECK(sys.A.cols() == expected);
}

TEST_CASE("frictionless constant state is a fixed point", "[fdm]") {
  const auto net = fixtures::straight_pipe(2000, 400, 0.0, 6e6, 300);
  const FdmContext ctx(net, 0.5, 4);
  SparseLuSolver solver;
  FdmState state = fdm_initial_state(ctx, solve_steady(net));
  const FdmState start = state;
  for (int k = 0; k < 20; ++k)
    state = fdm_step(ctx, fdm_assemble_step(ctx, state, k * 0.5), solver, k + 1);
  CHECK(max_change(state, start) <= 1e-12);
}

TEST_CASE("frictional steady start drifts by at most 1e-9 per step", "[fdm]") {
  const auto net = fixtures::straight_pipe(2000, 400, 0.0075, 6e6, 300);
  for (int refine : {1, 10}) {
    const FdmContext ctx(net, 0.1, refine);
    SparseLuSolver solver;
    FdmState state = fdm_initial_state(ctx, solve_steady(net));
    for (int k = 0; k < 10; ++k) {
      const FdmState next = fdm_step(ctx, fdm_assemble_step(ctx, state, k * 0.1), solver, k + 1);
      INFO("refine " << refine << ", step " << k);
      CHECK(max_change(next, state) <= 1e-9);
      state = next;
    }
  }
}

TEST_CASE("spatial stencil is exact for linear fields", "[fdm]") {
  const auto net = fixtures::straight_pipe(2000, 400, 0.0, 6e6, 300);
  const FdmContext ctx(net, 1.0, 1);
  FdmState state = fdm_initial_state(ctx, solve_steady(net));
  const auto sys = fdm_assemble_step(ctx, state, 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ctx.size);
  for (int i = 0; i <= ctx.cells[0]; ++i) x(ctx.column(0, i, Field::Flow)) = i;
  const Eigen::VectorXd Ax = sys.A * x;
  const double C1 = ctx.constants[0].C1;
  for (int cell = 0; cell < ctx.cells[0]; ++cell) CHECK(Ax(2 * cell) == Catch::Approx(C1));
}

TEST_CASE("junction balance holds at every time level", "[fdm]") {
  const auto cfg = fixtures::six_node();
  const auto& net = cfg.network;
  const FdmContext ctx(net, 0.1, 1);
  SparseLuSolver solver;
  FdmState state = fdm_initial_state(ctx, solve_steady(net));
  for (int k = 0; k < 50; ++k) {
    state = fdm_step(ctx, fdm_assemble_step(ctx, state, k * 0.1), solver, k + 1);
    for (std::size_t v = 0; v < net.nodes.size(); ++v) {
      if (net.nodes[v].kind != NodeKind::Junction) continue;
      double balance = 0;
      for (int e : ctx.attach[v].outlets) balance += state.pipes[e].q(ctx.cells[e]);
      for (int e : ctx.attach[v].inlets) balance -= state.pipes[e].q(0);
      CHECK(std::abs(balance - signal_eval(net.nodes[v].signal, (k + 1) * 0.1) / 2000) <=
            1e-12);
    }
  }
}
