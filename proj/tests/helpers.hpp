#ifndef SOSALMOST_TEST_HELPERS_HPP
#define SOSALMOST_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "poly.hpp"

namespace sosalmost::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> dist(-radius, radius);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = dist(rng);
  return x;
}

inline Polynomial random_polynomial(std::mt19937_64& rng, int n, int max_degree, int max_terms) {
  std::uniform_int_distribution<int> term_count(1, max_terms);
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  Polynomial p = Polynomial::zero(n);
  const int terms = term_count(rng);
  for (int t = 0; t < terms; ++t) {
    Monomial alpha(n, 0);
    int remaining = degree(rng);
    for (int i = 0; i < n && remaining > 0; ++i) {
      std::uniform_int_distribution<int> part(0, remaining);
      alpha[i] = part(rng);
      remaining -= alpha[i];
    }
    double c = coeff(rng);
    if (c == 0.0) c = 1.0;
    p = p + Polynomial::monomial(n, alpha, c);
  }
  return p;
}

// Random atomic probability measure with atoms in [-radius, radius]^n.
inline std::pair<std::vector<Eigen::VectorXd>, std::vector<double>> random_atoms(
    std::mt19937_64& rng, int n, int count, double radius) {
  std::uniform_real_distribution<double> wdist(0.05, 1.0);
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    points.push_back(random_point(rng, n, radius));
    weights.push_back(wdist(rng));
    total += weights.back();
  }
  double running = 0.0;
  for (int i = 0; i + 1 < count; ++i) {
    weights[i] /= total;
    running += weights[i];
  }
  weights[count - 1] = 1.0 - running;  // exact sum to 1
  return {points, weights};
}

inline Polynomial motzkin() {
  return Polynomial::parse("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1", 2);
}

}  // namespace sosalmost::testing

#endif  // SOSALMOST_TEST_HELPERS_HPP
