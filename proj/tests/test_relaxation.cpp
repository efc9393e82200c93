#include <cmath>
#include <doctest.h>

#include "helpers.hpp"
#include "relaxation.hpp"

using namespace sosalmost;
namespace tst = sosalmost::testing;

TEST_CASE("exponential budget") {
  CHECK(exp_budget(2, 1.0) == doctest::Approx(5.436563657).epsilon(1e-9));
  CHECK(exp_budget(1, 0.0) == 1.0);
  CHECK(exp_budget(3, 2.0) == doctest::Approx(3.0 * std::exp(4.0)).epsilon(1e-15));
  CHECK_THROWS_AS(exp_budget(1, 27.0), std::invalid_argument);
}

TEST_CASE("primal assembly for f = x^2") {
  Polynomial f = Polynomial::parse("x1^2", 1);
  SdpProblem prob = build_primal(f, {.r = 1, .M = 1.0, .tol = 1e-8});
  CHECK(prob.num_vars() == 2);  // y_1, y_2
  CHECK(prob.psd_dim() == 2);
  CHECK(prob.c[0] == 0.0);
  CHECK(prob.c[1] == 1.0);  // objective is y_2
  CHECK(prob.constant_term == 0.0);
  CHECK(prob.budget_bound == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(prob.budget_coeff[0] == 0.0);
  CHECK(prob.budget_coeff[1] == 1.0);
  // y_1 sits at (1,2)/(2,1); y_2 at (2,2).
  REQUIRE(prob.positions[0].size() == 1);
  CHECK(prob.positions[0][0] == std::pair<int, int>{0, 1});
  REQUIRE(prob.positions[1].size() == 1);
  CHECK(prob.positions[1][0] == std::pair<int, int>{1, 1});
}

TEST_CASE("primal assembly counts for the Motzkin relaxation") {
  SdpProblem prob = build_primal(tst::motzkin(), {.r = 3, .M = 2.0, .tol = 1e-8});
  CHECK(prob.num_vars() == 27);
  CHECK(prob.psd_dim() == 10);
  CHECK(prob.budget_bound == doctest::Approx(2.0 * std::exp(4.0)).epsilon(1e-15));
}

TEST_CASE("constant objective and degree guards") {
  Polynomial c = Polynomial::constant(2, 3.0);
  SdpProblem prob = build_primal(c, {.r = 1, .M = 1.0, .tol = 1e-8});
  CHECK(prob.constant_term == 3.0);
  CHECK(prob.c.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(build_primal(tst::motzkin(), RelaxationConfig{.r = 2, .M = 1.0, .tol = 1e-8}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_primal(c, RelaxationConfig{.r = 1, .M = -1.0, .tol = 1e-8}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_primal(c, RelaxationConfig{.r = 1, .M = 1.0, .tol = 0.0}),
                  std::invalid_argument);
}

TEST_CASE("dual objective") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
  CHECK(dual_objective({1.0, 0.0, g}, 1, 1.0) == 1.0);
  CHECK(dual_objective({0.0, 1.0, g}, 1, 1.0) == doctest::Approx(-std::exp(1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(dual_objective({0.0, -0.5, g}, 1, 1.0), std::invalid_argument);
}

TEST_CASE("dual residual") {
  Polynomial f = Polynomial::parse("x1^2", 1);
  Eigen::MatrixXd g(2, 2);
  g << 0, 0, 0, 1;
  CHECK(dual_residual(f, {0.0, 0.0, g}, 1, 1).is_zero());

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK(dual_residual(f, {-1.0, 0.0, id}, 1, 1).is_zero());

  Eigen::MatrixXd tampered = id;
  tampered(0, 0) += 1e-3;
  Polynomial res = dual_residual(f, {-1.0, 0.0, tampered}, 1, 1);
  CHECK(res.l1_norm() == doctest::Approx(1e-3).epsilon(1e-12));

  Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(dual_residual(f, {0.0, 0.0, wrong}, 1, 1), std::invalid_argument);
}

TEST_CASE("feasible start is strictly feasible") {
  RelaxationConfig cfg{.r = 1, .M = 2.0, .tol = 1e-8};
  MomentSequence y = feasible_start(cfg, 1);
  Eigen::VectorXd expected(3);
  expected << 1.0, 0.0, 1.0 / 3.0;
  CHECK((y.values() - expected).cwiseAbs().maxCoeff() == 0.0);

  SdpProblem prob = build_primal(Polynomial::parse("x1^2", 1), cfg);
  CHECK(prob.budget_value(y) == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-15));
  CHECK(prob.budget_value(y) < prob.budget_bound);

  RelaxationConfig cfg22{.r = 2, .M = 2.0, .tol = 1e-8};
  MomentSequence y22 = feasible_start(cfg22, 2);
  MomentMatrix m = build_moment_matrix(y22, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.entries, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);

  for (int n = 1; n <= 4; ++n) {
    for (double M : {1.0, 2.0, 3.0}) {
      for (int r = 1; r <= 3; ++r) {
        RelaxationConfig c{.r = r, .M = M, .tol = 1e-8};
        SdpProblem p = build_primal(Polynomial::constant(n, 0.0), c);
        CHECK(p.budget_value(feasible_start(c, n)) < p.budget_bound);
      }
    }
  }
}

TEST_CASE("budget admissible for any measure supported in the box") {
  auto rng = tst::make_rng(0xb0bULL);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const int r = 1 + trial % 3;
    const double M = (trial % 2 == 0) ? 1.0 : 2.0;
    auto [points, weights] = tst::random_atoms(rng, n, 1 + trial % 4, M);
    MomentSequence y = moments_from_atoms(points, weights, r);
    SdpProblem prob = build_primal(Polynomial::constant(n, 0.0), {.r = r, .M = M, .tol = 1e-8});
    CHECK(prob.budget_value(y) <= prob.budget_bound * (1.0 + 1e-12));
  }
}
