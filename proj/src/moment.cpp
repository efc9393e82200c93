#include "moment.hpp"

#include <cmath>
#include <sstream>

namespace sosalmost {

MomentSequence::MomentSequence(int dimension, int order, Eigen::VectorXd values)
    : basis_(dimension, order), values_(std::move(values)) {
  if (values_.size() != basis_.size()) {
    throw std::invalid_argument("moment vector size does not match basis size");
  }
}

double MomentSequence::value(const Monomial& alpha) const {
  const int idx = basis_.index_of(alpha);
  if (idx < 0) throw std::out_of_range("moment of degree beyond stored order");
  return values_[idx];
}

double MomentSequence::marginal_even(int i, int k) const {
  if (i < 1 || i > dimension()) throw std::out_of_range("coordinate index out of range");
  Monomial alpha(dimension(), 0);
  alpha[i - 1] = 2 * k;
  return value(alpha);
}

double lin_functional(const MomentSequence& y, const Polynomial& p) {
  if (p.dimension() != y.dimension()) throw std::invalid_argument("dimension mismatch");
  if (p.degree() > y.order()) {
    throw std::invalid_argument("polynomial degree exceeds available moments");
  }
  double sum = 0.0;
  for (const auto& [alpha, coeff] : p.terms()) sum += coeff * y.value(alpha);
  return sum;
}

MomentSequence moments_from_atoms(const std::vector<Eigen::VectorXd>& points,
                                  const std::vector<double>& weights, int r) {
  if (points.empty() || points.size() != weights.size()) {
    throw std::invalid_argument("atoms and weights must be nonempty and matched");
  }
  const int n = static_cast<int>(points.front().size());
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("atom weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("atom weights must sum to 1");
  }
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != n) throw std::invalid_argument("atom dimension mismatch");
  }

  MonomialBasis basis(n, 2 * r);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t l = 0; l < points.size(); ++l) {
    for (int idx = 0; idx < basis.size(); ++idx) {
      const Monomial& alpha = basis[idx];
      double mono = 1.0;
      for (int i = 0; i < n; ++i) {
        for (int e = 0; e < alpha[i]; ++e) mono *= points[l][i];
      }
      values[idx] += weights[l] * mono;
    }
  }
  return MomentSequence(n, 2 * r, std::move(values));
}

MomentSequence uniform_box_moments(int dimension, int r, double halfwidth) {
  if (halfwidth <= 0.0) throw std::invalid_argument("halfwidth must be positive");
  MonomialBasis basis(dimension, 2 * r);
  Eigen::VectorXd values(basis.size());
  for (int idx = 0; idx < basis.size(); ++idx) {
    const Monomial& alpha = basis[idx];
    double v = 1.0;
    for (int i = 0; i < dimension && v != 0.0; ++i) {
      if (alpha[i] % 2 != 0) {
        v = 0.0;
      } else {
        v *= std::pow(halfwidth, alpha[i]) / (alpha[i] + 1);
      }
    }
    values[idx] = v;
  }
  return MomentSequence(dimension, 2 * r, std::move(values));
}

MomentMatrix build_moment_matrix(const MomentSequence& y, int r) {
  if (2 * r > y.order()) throw std::invalid_argument("insufficient moment order for M_r(y)");
  MonomialBasis basis(y.dimension(), r);
  const int s = basis.size();
  Eigen::MatrixXd entries(s, s);
  Monomial sum(y.dimension());
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      for (int v = 0; v < y.dimension(); ++v) sum[v] = basis[i][v] + basis[j][v];
      const double value = y.value(sum);
      entries(i, j) = value;
      entries(j, i) = value;
    }
  }
  return MomentMatrix{std::move(basis), std::move(entries)};
}

double quad_form(const MomentSequence& y, const Polynomial& p) {
  if (p.dimension() != y.dimension()) throw std::invalid_argument("dimension mismatch");
  const int r = y.order() / 2;
  if (p.degree() > r) throw std::invalid_argument("polynomial degree exceeds r");
  MomentMatrix m = build_moment_matrix(y, r);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(m.basis.size());
  for (const auto& [alpha, coeff] : p.terms()) coeffs[m.basis.index_of(alpha)] = coeff;
  return coeffs.dot(m.entries * coeffs);
}

DiagBoundReport diag_bound_check(const MomentMatrix& m, double tau) {
  const int s = m.basis.size();
  const int n = m.basis.dimension();
  const int r = m.basis.order();

  const double max_diag = m.entries.diagonal().maxCoeff();
  const double scale = std::max(1e-300, std::abs(max_diag));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.entries, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw std::invalid_argument("moment matrix is not numerically PSD");
  }

  DiagBoundReport report;
  report.tau = tau;
  report.max_diag = max_diag;
  report.max_abs_entry = m.entries.cwiseAbs().maxCoeff();

  // Diagonal entry at basis position k*e_i equals y^(i)_{2k}.
  double max_marginal = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int k = 0; k <= r; ++k) {
      Monomial alpha(n, 0);
      alpha[i - 1] = k;
      const int idx = m.basis.index_of(alpha);
      max_marginal = std::max(max_marginal, m.entries(idx, idx));
    }
  }
  report.max_marginal_diag = max_marginal;
  report.hypothesis_holds = max_marginal <= tau;
  if (!report.hypothesis_holds) {
    report.holds = true;  // implication is vacuous
    return report;
  }

  const double bound = tau * (1.0 + 1e-8);
  for (int i = 0; i < s && report.holds; ++i) {
    if (m.entries(i, i) > bound) {
      report.holds = false;
      std::ostringstream os;
      os << "diagonal entry at basis index " << i << " is " << m.entries(i, i) << " > " << bound;
      report.violation = os.str();
    }
  }
  for (int i = 0; i < s && report.holds; ++i) {
    for (int j = 0; j < s && report.holds; ++j) {
      if (std::abs(m.entries(i, j)) > bound) {
        report.holds = false;
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") is " << m.entries(i, j) << ", magnitude > " << bound;
        report.violation = os.str();
      }
    }
  }
  return report;
}

std::vector<double> carleman_partial_sums(const std::function<double(int)>& even_moment, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  std::vector<double> sums;
  sums.reserve(K);
  double acc = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double y2k = even_moment(k);
    if (!(y2k > 0.0)) {
      throw std::invalid_argument("even moment y_{2k} must be positive for k = " +
                                  std::to_string(k));
    }
    acc += std::pow(y2k, -1.0 / (2.0 * k));
    sums.push_back(acc);
  }
  return sums;
}

std::vector<double> carleman_partial_sums(const MomentSequence& y, int i, int K) {
  if (2 * K > y.order()) throw std::invalid_argument("K exceeds stored moment order");
  return carleman_partial_sums([&y, i](int k) { return y.marginal_even(i, k); }, K);
}

}  // namespace sosalmost
