#include <cmath>
#include <doctest.h>
#include <set>

#include "helpers.hpp"
#include "poly.hpp"

using namespace sosalmost;
namespace tst = sosalmost::testing;

TEST_CASE("parse produces the canonical sparse form") {
  Polynomial p = Polynomial::parse("x1^2 + 2*x1*x2", 2);
  CHECK(p.term_count() == 2);
  CHECK(p.coefficient({2, 0}) == 1.0);
  CHECK(p.coefficient({1, 1}) == 2.0);

  Polynomial z = Polynomial::parse("0", 3);
  CHECK(z.is_zero());
  CHECK(z.degree() == 0);

  Polynomial m = tst::motzkin();
  CHECK(m.term_count() == 4);
  CHECK(m.coefficient({4, 2}) == 1.0);
  CHECK(m.coefficient({2, 4}) == 1.0);
  CHECK(m.coefficient({2, 2}) == -3.0);
  CHECK(m.coefficient({0, 0}) == 1.0);
}

TEST_CASE("parse reports positions and bad indices") {
  CHECK_THROWS_AS(Polynomial::parse("x1 +", 1), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("x1^", 1), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("x0 + 1", 2), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("x3", 2), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("1 & 2", 1), ParseError);
  CHECK_THROWS_AS(Polynomial::parse("2*", 1), ParseError);
  try {
    Polynomial::parse("x1 + x9^2", 2);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("evaluate") {
  Polynomial m = tst::motzkin();
  const double at11[] = {1.0, 1.0};
  CHECK(m.evaluate(at11) == 0.0);
  const double x1sq[] = {3.0};
  CHECK(Polynomial::parse("x1^2", 1).evaluate(x1sq) == 9.0);
  const double pt[] = {0.3, -0.7};
  CHECK(Polynomial::zero(2).evaluate(pt) == 0.0);
  CHECK_THROWS_AS(m.evaluate(x1sq), std::invalid_argument);
}

TEST_CASE("l1 norm") {
  CHECK(tst::motzkin().l1_norm() == 6.0);
  CHECK(Polynomial::zero(2).l1_norm() == 0.0);
  CHECK(Polynomial::parse("1 + x1^2 + 0.5*x1^4", 1).l1_norm() == 2.5);
}

TEST_CASE("arithmetic") {
  Polynomial x = Polynomial::variable(1, 1);
  CHECK((x + (-x)).is_zero());
  Polynomial one = Polynomial::constant(1, 1.0);
  Polynomial sq = (one - x).squared();
  CHECK(sq == Polynomial::parse("1 - 2*x1 + x1^2", 1));
  Polynomial xy = Polynomial::variable(2, 1) * Polynomial::variable(2, 2);
  CHECK(xy == Polynomial::parse("x1*x2", 2));
  CHECK_THROWS_AS(x + Polynomial::variable(2, 1), std::invalid_argument);
}

TEST_CASE("gradient") {
  Polynomial x1sq = Polynomial::parse("x1^2", 1);
  CHECK(x1sq.partial(1) == Polynomial::parse("2*x1", 1));
  Polynomial xy = Polynomial::parse("x1*x2", 2);
  CHECK(xy.partial(2) == Polynomial::parse("x1", 2));
  CHECK(Polynomial::constant(2, 5.0).partial(1).is_zero());
  CHECK_THROWS_AS(xy.partial(3), std::invalid_argument);
}

TEST_CASE("basis ordering matches the canonical listing") {
  MonomialBasis b22(2, 2);
  REQUIRE(b22.size() == 6);
  CHECK(b22[0] == Monomial{0, 0});
  CHECK(b22[1] == Monomial{1, 0});
  CHECK(b22[2] == Monomial{0, 1});
  CHECK(b22[3] == Monomial{2, 0});
  CHECK(b22[4] == Monomial{1, 1});
  CHECK(b22[5] == Monomial{0, 2});

  MonomialBasis b13(1, 3);
  REQUIRE(b13.size() == 4);
  CHECK(b13[3] == Monomial{3});

  CHECK(MonomialBasis(3, 2).size() == 10);
}

TEST_CASE("basis enumerates every multi-index exactly once") {
  // Brute-force oracle over a full exponent grid.
  for (int n = 1; n <= 5; ++n) {
    for (int r = 0; r <= 6; ++r) {
      MonomialBasis basis(n, r);
      CHECK(basis.size() == binomial(n + r, n));
      std::set<Monomial> seen;
      for (int i = 0; i < basis.size(); ++i) {
        const Monomial& alpha = basis[i];
        CHECK(total_degree(alpha) <= r);
        CHECK(seen.insert(alpha).second);
        CHECK(basis.index_of(alpha) == i);
      }
      // Strictly increasing in the fixed order.
      GradedOrder less;
      for (int i = 0; i + 1 < basis.size(); ++i) CHECK(less(basis[i], basis[i + 1]));
      CHECK(basis[0] == Monomial(n, 0));
    }
  }
}

TEST_CASE("perturbation series") {
  CHECK(perturbation_series(1, 2) == Polynomial::parse("1 + x1^2 + 0.5*x1^4", 1));
  CHECK(perturbation_series(2, 1) == Polynomial::parse("2 + x1^2 + x2^2", 2));
  CHECK(perturbation_series(2, 0) == Polynomial::constant(2, 2.0));
  CHECK_THROWS_AS(perturbation_series(1, 21), std::invalid_argument);
}

TEST_CASE("perturbation series l1 norm equals the factorial partial sum") {
  for (int n = 1; n <= 4; ++n) {
    for (int r = 0; r <= 10; ++r) {
      double expected = 0.0;
      for (int k = r; k >= 0; --k) expected += inv_factorial(k);
      expected *= n;
      CHECK(perturbation_series(n, r).l1_norm() == doctest::Approx(expected).epsilon(1e-15));
      CHECK(perturbation_series(n, r).l1_norm() <= n * std::exp(1.0) + 1e-12);
    }
  }
}

TEST_CASE("evaluation is a ring homomorphism at random points") {
  auto rng = tst::make_rng(0x9e3779b97f4a7c15ULL);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(trial % 3);
    Polynomial p = tst::random_polynomial(rng, n, 4, 6);
    Polynomial q = tst::random_polynomial(rng, n, 4, 6);
    Polynomial sum = p + q;
    Polynomial prod = p * q;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd x = tst::random_point(rng, n, 1.5);
      std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
      const double ps = p.evaluate(xs);
      const double qs = q.evaluate(xs);
      const double scale = 1.0 + std::abs(ps) + std::abs(qs) + std::abs(ps * qs);
      CHECK(std::abs(sum.evaluate(xs) - (ps + qs)) <= 1e-10 * scale);
      CHECK(std::abs(prod.evaluate(xs) - ps * qs) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("parse round-trips format") {
  auto rng = tst::make_rng(0xdeadbeefULL);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(trial % 4);
    Polynomial p = tst::random_polynomial(rng, n, 5, 8);
    CHECK(Polynomial::parse(p.format(), n) == p);
  }
  CHECK(Polynomial::parse("0", 2).format() == "0");
  CHECK(Polynomial::parse(tst::motzkin().format(), 2) == tst::motzkin());
}
