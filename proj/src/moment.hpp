#ifndef SOSALMOST_MOMENT_HPP
#define SOSALMOST_MOMENT_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "poly.hpp"

namespace sosalmost {

// Truncated moment sequence y_alpha for |alpha| <= order, stored in the
// canonical graded basis.
class MomentSequence {
 public:
  MomentSequence(int dimension, int order, Eigen::VectorXd values);

  int dimension() const { return basis_.dimension(); }
  int order() const { return basis_.order(); }
  const MonomialBasis& basis() const { return basis_; }
  const Eigen::VectorXd& values() const { return values_; }

  double value(const Monomial& alpha) const;
  // y^(i)_{2k}: the moment of x_i^{2k}; i is 1-based.
  double marginal_even(int i, int k) const;
  double y0() const { return values_[0]; }

 private:
  MonomialBasis basis_;
  Eigen::VectorXd values_;
};

// L_y(p) = sum_alpha p_alpha y_alpha. Requires deg p <= order of y.
double lin_functional(const MomentSequence& y, const Polynomial& p);

// Moments of the discrete probability measure sum_l w_l * delta_{points[l]},
// up to |alpha| <= 2r. Weights must be nonnegative and sum to 1 within 1e-12.
MomentSequence moments_from_atoms(const std::vector<Eigen::VectorXd>& points,
                                  const std::vector<double>& weights, int r);

// Moments of the uniform distribution on the box [-h, h]^n up to |alpha| <= 2r:
// y_alpha = prod_i h^{alpha_i}/(alpha_i + 1) for even alpha, 0 otherwise.
MomentSequence uniform_box_moments(int dimension, int r, double halfwidth);

struct MomentMatrix {
  MonomialBasis basis;      // order r row/column index
  Eigen::MatrixXd entries;  // entries(i, j) = y_{alpha_i + alpha_j}
};

// M_r(y); requires order of y >= 2r.
MomentMatrix build_moment_matrix(const MomentSequence& y, int r);

// p^T M_r(y) p for deg p <= r; equals L_y(p^2).
double quad_form(const MomentSequence& y, const Polynomial& p);

// Outcome of checking the diagonal-domination implication on one matrix:
// if every marginal diagonal y^(i)_{2k} (k = 0..r) is <= tau, then every
// diagonal entry y_{2alpha} is <= tau*(1+1e-8) and every entry satisfies
// |y_{alpha+beta}| <= tau*(1+1e-8).
struct DiagBoundReport {
  bool hypothesis_holds = false;  // marginal diagonals all <= tau
  bool holds = true;              // the implication (vacuously true if !hypothesis_holds)
  double tau = 0.0;
  double max_marginal_diag = 0.0;
  double max_diag = 0.0;
  double max_abs_entry = 0.0;
  std::string violation;  // description of the first violating entry
};

// Throws std::invalid_argument if the matrix is not numerically PSD
// (min eigenvalue < -1e-8 * max diagonal).
DiagBoundReport diag_bound_check(const MomentMatrix& m, double tau);

// Partial sums S_K = sum_{k=1..K} (y_{2k})^{-1/(2k)} of the Carleman series
// for one coordinate; even_moment(k) must return y^(i)_{2k} > 0 for k >= 1.
std::vector<double> carleman_partial_sums(const std::function<double(int)>& even_moment, int K);
std::vector<double> carleman_partial_sums(const MomentSequence& y, int i, int K);

}  // namespace sosalmost

#endif  // SOSALMOST_MOMENT_HPP
