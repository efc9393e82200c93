#include "relaxation.hpp"

#include <cmath>

namespace sosalmost {

double exp_budget(int dimension, double M) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (M < 0.0 || M > kMaxBoxRadius) {
    throw std::invalid_argument("box radius M must lie in (0, 26] to avoid overflow");
  }
  return dimension * std::exp(M * M);
}

void RelaxationConfig::validate(const Polynomial& f) const {
  if (M <= 0.0 || M > kMaxBoxRadius) {
    throw std::invalid_argument("box radius M must lie in (0, 26]");
  }
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  if (r < 0) throw std::invalid_argument("relaxation order must be >= 0");
  if (2 * r < f.degree()) {
    throw std::invalid_argument("relaxation order too small: 2r < deg f");
  }
  if (r > kMaxPerturbationOrder) {
    throw std::invalid_argument("relaxation order capped at " +
                                std::to_string(kMaxPerturbationOrder));
  }
}

MomentSequence SdpProblem::to_moment_sequence(const Eigen::VectorXd& x) const {
  Eigen::VectorXd values(var_basis.size());
  values[0] = 1.0;
  values.tail(var_basis.size() - 1) = x;
  return MomentSequence(n, 2 * r, std::move(values));
}

double SdpProblem::budget_value(const MomentSequence& y) const {
  double sum = 0.0;
  for (int k = 0; k <= r; ++k) {
    const double w = inv_factorial(k);
    for (int i = 1; i <= n; ++i) sum += w * y.marginal_even(i, k);
  }
  return sum;
}

SdpProblem build_primal(const Polynomial& f, const RelaxationConfig& cfg) {
  cfg.validate(f);
  const int n = f.dimension();

  SdpProblem prob{.n = n,
                  .r = cfg.r,
                  .M = cfg.M,
                  .tol = cfg.tol,
                  .row_basis = MonomialBasis(n, cfg.r),
                  .var_basis = MonomialBasis(n, 2 * cfg.r)};

  const int nvars = prob.var_basis.size() - 1;
  prob.c = Eigen::VectorXd::Zero(nvars);
  prob.constant_term = f.coefficient(Monomial(n, 0));
  for (const auto& [alpha, coeff] : f.terms()) {
    const int idx = prob.var_basis.index_of(alpha);
    if (idx < 0) throw std::invalid_argument("monomial of f exceeds degree 2r");
    if (idx > 0) prob.c[idx - 1] = coeff;
  }

  // Positions of each variable inside the moment block.
  prob.positions.assign(nvars, {});
  const int s = prob.row_basis.size();
  Monomial sum(n);
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      for (int v = 0; v < n; ++v) sum[v] = prob.row_basis[i][v] + prob.row_basis[j][v];
      const int idx = prob.var_basis.index_of(sum);
      if (idx > 0) prob.positions[idx - 1].emplace_back(i, j);
    }
  }

  // Budget row: theta_alpha = 1/k! at alpha = 2k e_i, k = 1..r. The k = 0
  // term contributes the constant n through y_0 = 1.
  prob.budget_coeff = Eigen::VectorXd::Zero(nvars);
  for (int k = 1; k <= cfg.r; ++k) {
    const double w = inv_factorial(k);
    for (int i = 0; i < n; ++i) {
      Monomial alpha(n, 0);
      alpha[i] = 2 * k;
      prob.budget_coeff[prob.var_basis.index_of(alpha) - 1] = w;
    }
  }
  prob.budget_bound = exp_budget(n, cfg.M);
  prob.budget_scale = std::exp(-cfg.M * cfg.M);
  prob.budget_slack0 = prob.budget_scale * (prob.budget_bound - n);
  return prob;
}

double dual_objective(const DualShape& d, int dimension, double M) {
  if (d.lambda < 0.0) throw std::invalid_argument("dual multiplier lambda must be nonnegative");
  return d.gamma - exp_budget(dimension, M) * d.lambda;
}

Polynomial dual_residual(const Polynomial& f, const DualShape& d, int r, int dimension) {
  MonomialBasis basis(dimension, r);
  if (d.gram.rows() != basis.size() || d.gram.cols() != basis.size()) {
    throw std::invalid_argument("Gram dimension does not match s(r)");
  }
  Polynomial::TermMap q_terms;
  Monomial sum(dimension);
  for (int i = 0; i < basis.size(); ++i) {
    for (int j = 0; j < basis.size(); ++j) {
      for (int v = 0; v < dimension; ++v) sum[v] = basis[i][v] + basis[j][v];
      auto [it, inserted] = q_terms.emplace(sum, d.gram(i, j));
      if (!inserted) it->second += d.gram(i, j);
    }
  }
  Polynomial q(dimension, std::move(q_terms));
  return f - Polynomial::constant(dimension, d.gamma) - q +
         d.lambda * perturbation_series(dimension, r);
}

MomentSequence feasible_start(const RelaxationConfig& cfg, int dimension) {
  return uniform_box_moments(dimension, cfg.r, cfg.M / 2.0);
}

}  // namespace sosalmost
