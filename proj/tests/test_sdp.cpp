#include <cmath>
#include <doctest.h>

#include "helpers.hpp"
#include "sdp.hpp"

using namespace sosalmost;
namespace tst = sosalmost::testing;

namespace {

void check_solution_invariants(const Polynomial& f, const SdpProblem& prob,
                               const SdpSolution& sol, double tol) {
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.gap <= tol);
  MomentMatrix m = build_moment_matrix(sol.primal, prob.r);
  const double scale = std::max(1.0, m.entries.diagonal().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.entries, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() >= -tol * scale);
  CHECK(sol.dual.lambda >= -tol);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> geig(sol.dual.gram, Eigen::EigenvaluesOnly);
  const double gscale = std::max(1.0, sol.dual.gram.diagonal().maxCoeff());
  CHECK(geig.eigenvalues().minCoeff() >= -tol * gscale);
  Polynomial res = dual_residual(f, sol.dual, prob.r, prob.n);
  CHECK(res.l1_norm() <= tol * (1.0 + f.l1_norm()));
  CHECK(sol.primal.y0() == 1.0);
}

}  // namespace

TEST_CASE("minimum of x^2 at order 1") {
  Polynomial f = Polynomial::parse("x1^2", 1);
  RelaxationConfig cfg{.r = 1, .M = 1.0, .tol = 1e-8};
  SdpProblem prob = build_primal(f, cfg);
  SdpSolution sol = solve(prob, feasible_start(cfg, 1), cfg.tol);
  check_solution_invariants(f, prob, sol, 1e-6);
  CHECK(std::abs(sol.primal_value) <= 1e-6);
  CHECK(std::abs(sol.dual_value) <= 1e-6);
  CHECK(std::abs(dual_objective(sol.dual, 1, 1.0) - sol.dual_value) <= 1e-9);
}

TEST_CASE("shifted square recovers the global minimum inside the box") {
  Polynomial f = Polynomial::parse("x1^2 - 2*x1 + 1", 1);
  SdpSolution sol = solve_relaxation(f, {.r = 1, .M = 2.0, .tol = 1e-8});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(std::abs(sol.primal_value) <= 1e-6);
  // The optimal moment sequence concentrates at the minimizer x = 1.
  CHECK(sol.primal.value({1}) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("odd objective is bounded by the budget alone") {
  Polynomial f = Polynomial::parse("x1", 1);
  SdpSolution sol = solve_relaxation(f, {.r = 1, .M = 1.0, .tol = 1e-8});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.primal_value == doctest::Approx(-std::sqrt(std::exp(1.0) - 1.0)).epsilon(1e-6));
}

TEST_CASE("constant shift moves the value") {
  Polynomial f = Polynomial::parse("x1^2 + 1", 1);
  SdpSolution sol = solve_relaxation(f, {.r = 1, .M = 1.0, .tol = 1e-8});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.primal_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("SOS quartic on the circle") {
  Polynomial f = Polynomial::parse("x1^4 + 2*x1^2*x2^2 + x2^4 - 2*x1^2 - 2*x2^2 + 1", 2);
  SdpSolution sol = solve_relaxation(f, {.r = 2, .M = 2.0, .tol = 1e-8});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(std::abs(sol.primal_value) <= 1e-5);
}

TEST_CASE("degenerate order-0 problem") {
  Polynomial f = Polynomial::constant(2, 4.5);
  SdpSolution sol = solve_relaxation(f, {.r = 0, .M = 1.0, .tol = 1e-8});
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.primal_value == 4.5);
  CHECK(sol.gap == 0.0);
}

TEST_CASE("solver is deterministic") {
  Polynomial f = tst::motzkin();
  RelaxationConfig cfg{.r = 3, .M = 2.0, .tol = 1e-8};
  SdpSolution a = solve_relaxation(f, cfg);
  SdpSolution b = solve_relaxation(f, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_value == b.primal_value);
  CHECK(a.dual_value == b.dual_value);
}

TEST_CASE("monotone in the relaxation order") {
  Polynomial f = tst::motzkin();
  const double tol = 1e-8;
  double previous = -1e30;
  for (int r = 3; r <= 5; ++r) {
    SdpSolution sol = solve_relaxation(f, {.r = r, .M = 2.0, .tol = tol});
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_value + 2e-6 >= previous);
    previous = sol.primal_value;
  }
  CHECK(previous >= -0.05);
  CHECK(previous <= 1e-3);
}

TEST_CASE("weak duality against atomic measures in the box") {
  auto rng = tst::make_rng(0xfeedULL);
  Polynomial f = tst::motzkin();
  RelaxationConfig cfg{.r = 3, .M = 2.0, .tol = 1e-8};
  SdpProblem prob = build_primal(f, cfg);
  SdpSolution sol = solve(prob, feasible_start(cfg, 2), cfg.tol);
  REQUIRE(sol.status == SolveStatus::optimal);
  for (int trial = 0; trial < 50; ++trial) {
    auto [points, weights] = tst::random_atoms(rng, 2, 1 + trial % 3, cfg.M);
    MomentSequence y = moments_from_atoms(points, weights, cfg.r);
    const double value = lin_functional(y, f);
    const double scale = 1.0 + std::abs(value);
    CHECK(sol.primal_value <= value + 1e-8 * scale);
    CHECK(dual_objective(sol.dual, 2, cfg.M) <= value + 1e-8 * scale);
  }
}

TEST_CASE("solution invariants across a small corpus") {
  struct Instance {
    const char* text;
    int n;
    int r;
    double M;
  };
  const Instance corpus[] = {
      {"x1^2", 1, 1, 1.0},          {"x1^2", 1, 2, 1.5},
      {"x1^2 - 2*x1 + 1", 1, 1, 2.0},  {"x1^4 - 3*x1^2 + 1", 1, 2, 2.0},
      {"x1^2 + x2^2", 2, 1, 1.0},   {"x1^2 + x2^2 + x3^2", 3, 1, 1.0},
      {"x1*x2 + 1", 2, 2, 1.5},     {"x1^2 - 2*x1*x2 + x2^2", 2, 1, 2.0},
  };
  for (const auto& inst : corpus) {
    Polynomial f = Polynomial::parse(inst.text, inst.n);
    RelaxationConfig cfg{.r = inst.r, .M = inst.M, .tol = 1e-8};
    SdpProblem prob = build_primal(f, cfg);
    SdpSolution sol = solve(prob, feasible_start(cfg, inst.n), cfg.tol);
    check_solution_invariants(f, prob, sol, 1e-6);
  }
}

TEST_CASE("tolerance range is enforced") {
  Polynomial f = Polynomial::parse("x1^2", 1);
  RelaxationConfig cfg{.r = 1, .M = 1.0, .tol = 1e-8};
  SdpProblem prob = build_primal(f, cfg);
  CHECK_THROWS_AS(solve(prob, feasible_start(cfg, 1), 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(solve(prob, feasible_start(cfg, 1), 1e-12), std::invalid_argument);
}
