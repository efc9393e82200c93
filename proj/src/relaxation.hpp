#ifndef SOSALMOST_RELAXATION_HPP
#define SOSALMOST_RELAXATION_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "moment.hpp"
#include "poly.hpp"

namespace sosalmost {

// n * exp(M^2), the exponential-moment budget. M must be <= 26 so the
// value stays finite in double precision.
double exp_budget(int dimension, double M);

inline constexpr double kMaxBoxRadius = 26.0;

struct RelaxationConfig {
  int r = 1;        // relaxation order, 2r >= deg f
  double M = 1.0;   // sup-norm box radius
  double tol = 1e-8;

  void validate(const Polynomial& f) const;
};

// The moment relaxation in solver-neutral form, over the variables
// x_k = y_{alpha_k} for 0 < |alpha_k| <= 2r (y_0 is substituted by 1):
//
//   minimize    c.x  + constant_term
//   subject to  moment block  E_00 + sum_k x_k A_k            psd
//               budget slack  s0   - sum_k x_k b_k            >= 0
//
// where A_k has unit entries at the positions (i, j) with
// alpha_i + alpha_j = alpha_k, and the budget row carries the weights
// 1/k! at alpha = 2k e_i, scaled by budget_scale = e^{-M^2}.
struct SdpProblem {
  int n = 0;
  int r = 0;
  double M = 0.0;
  double tol = 1e-8;
  MonomialBasis row_basis;   // order r, indexes the psd block
  MonomialBasis var_basis;   // order 2r; variable k corresponds to var_basis[k+1]
  Eigen::VectorXd c;         // objective over the variables
  double constant_term = 0;  // coefficient of f at alpha = 0
  std::vector<std::vector<std::pair<int, int>>> positions;  // psd positions (i<=j) per variable
  Eigen::VectorXd budget_coeff;  // unscaled theta_alpha per variable
  double budget_bound = 0;       // n e^{M^2}
  double budget_scale = 1;       // e^{-M^2}
  double budget_slack0 = 0;      // budget_scale * (budget_bound - n)

  int num_vars() const { return static_cast<int>(c.size()); }
  int psd_dim() const { return row_basis.size(); }

  // Moment sequence of order 2r from a solver variable vector (y_0 restored).
  MomentSequence to_moment_sequence(const Eigen::VectorXd& x) const;
  // Value of the budget functional sum_{k<=r} sum_i y^(i)_{2k}/k! at y.
  double budget_value(const MomentSequence& y) const;
};

SdpProblem build_primal(const Polynomial& f, const RelaxationConfig& cfg);

// Dual point of Q_r: gamma, lambda >= 0, and the Gram matrix of the SOS
// polynomial q over the order-r basis.
struct DualShape {
  double gamma = 0.0;
  double lambda = 0.0;
  Eigen::MatrixXd gram;
};

// gamma - n e^{M^2} lambda.
double dual_objective(const DualShape& d, int dimension, double M);

// f - gamma - v_r^T G v_r + lambda * Theta_r; zero for a feasible dual point.
Polynomial dual_residual(const Polynomial& f, const DualShape& d, int r, int dimension);

// Moments of the uniform distribution on the box of halfwidth M/2: strictly
// feasible for Q_r (positive definite moment matrix, slack in the budget).
MomentSequence feasible_start(const RelaxationConfig& cfg, int dimension);

}  // namespace sosalmost

#endif  // SOSALMOST_RELAXATION_HPP
