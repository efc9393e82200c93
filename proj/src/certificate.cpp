#include "certificate.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sosalmost {

Polynomial build_f_eps(const Polynomial& f, double eps, int r_eps) {
  if (eps < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
  if (eps == 0.0) return f;
  return f + eps * perturbation_series(f.dimension(), r_eps);
}

double l1_gap_value(double eps, int dimension, int r_eps) {
  double partial = 0.0;
  for (int k = 0; k <= r_eps; ++k) partial += inv_factorial(k);
  return eps * dimension * partial;
}

Polynomial gram_polynomial(const Eigen::MatrixXd& gram, const MonomialBasis& basis) {
  if (gram.rows() != basis.size() || gram.cols() != basis.size()) {
    throw std::invalid_argument("Gram dimension does not match the basis");
  }
  const int n = basis.dimension();
  Polynomial::TermMap terms;
  Monomial sum(n);
  for (int i = 0; i < basis.size(); ++i) {
    for (int j = 0; j < basis.size(); ++j) {
      if (gram(i, j) == 0.0) continue;
      for (int v = 0; v < n; ++v) sum[v] = basis[i][v] + basis[j][v];
      auto [it, inserted] = terms.emplace(sum, gram(i, j));
      if (!inserted) it->second += gram(i, j);
    }
  }
  return Polynomial(n, std::move(terms));
}

std::vector<Polynomial> gram_to_squares(const Eigen::MatrixXd& gram, const MonomialBasis& basis) {
  if (gram.rows() != basis.size() || gram.cols() != basis.size()) {
    throw std::invalid_argument("Gram dimension does not match the basis");
  }
  const double trace_scale = std::max(1e-300, gram.trace());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.eigenvalues().minCoeff() < -1e-9 * trace_scale) {
    throw std::invalid_argument("Gram matrix is indefinite beyond tolerance");
  }
  std::vector<Polynomial> squares;
  const int n = basis.dimension();
  for (int i = basis.size() - 1; i >= 0; --i) {  // largest eigenvalue first
    const double mu = eig.eigenvalues()[i];
    if (mu <= 1e-14 * trace_scale) continue;
    const double w = std::sqrt(mu);
    Polynomial::TermMap terms;
    for (int j = 0; j < basis.size(); ++j) {
      const double coeff = w * eig.eigenvectors()(j, i);
      if (coeff != 0.0) terms.emplace(basis[j], coeff);
    }
    squares.emplace_back(n, std::move(terms));
  }
  return squares;
}

CertificateReport verify(const Polynomial& f, const SosCertificate& cert) {
  if (cert.basis.dimension() != f.dimension()) {
    throw std::invalid_argument("certificate dimension does not match the polynomial");
  }
  if (cert.gram.rows() != cert.basis.size() || cert.gram.cols() != cert.basis.size()) {
    throw std::invalid_argument("Gram dimension does not match the certificate basis");
  }
  for (const Polynomial& s : cert.squares) {
    if (s.dimension() != f.dimension()) {
      throw std::invalid_argument("square polynomial dimension mismatch");
    }
  }
  if (cert.epsilon < 0.0 || cert.r_eps < 0) {
    throw std::invalid_argument("certificate has negative epsilon or order");
  }

  const Polynomial f_eps = build_f_eps(f, cert.epsilon, cert.r_eps);
  CertificateReport report;
  report.tolerance = 1e-6 * (1.0 + f_eps.l1_norm());

  report.residual_gram = (f_eps - gram_polynomial(cert.gram, cert.basis)).l1_norm();
  Polynomial sum_sq = Polynomial::zero(f.dimension());
  for (const Polynomial& s : cert.squares) sum_sq = sum_sq + s.squared();
  report.residual_squares = (f_eps - sum_sq).l1_norm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cert.gram, Eigen::EigenvaluesOnly);
  report.gram_min_eigenvalue = eig.eigenvalues().minCoeff();
  const double eig_floor = -1e-8 * std::max(1.0, cert.gram.trace());

  report.l1_gap_expected = l1_gap_value(cert.epsilon, f.dimension(), cert.r_eps);

  std::ostringstream why;
  if (report.residual_gram > report.tolerance) {
    why << "Gram identity residual " << report.residual_gram << " exceeds " << report.tolerance
        << "; ";
  }
  if (report.residual_squares > report.tolerance) {
    why << "squares identity residual " << report.residual_squares << " exceeds "
        << report.tolerance << "; ";
  }
  if (report.gram_min_eigenvalue < eig_floor) {
    why << "Gram minimum eigenvalue " << report.gram_min_eigenvalue << " below floor " << eig_floor
        << "; ";
  }
  if (std::abs(cert.l1_gap - report.l1_gap_expected) >
      1e-12 * (1.0 + std::abs(report.l1_gap_expected))) {
    why << "stored l1 gap " << cert.l1_gap << " does not match " << report.l1_gap_expected << "; ";
  }
  report.failure = why.str();
  report.passed = report.failure.empty();
  return report;
}

double lambda_bound(double M, double f_at_0, double f_star_lb, int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (M <= 0.0 || M > kMaxBoxRadius) throw std::invalid_argument("M must lie in (0, 26]");
  if (f_star_lb < 0.0) throw std::invalid_argument("f_star_lb must be a nonnegative lower bound");
  if (f_star_lb > f_at_0) throw std::invalid_argument("f_star_lb cannot exceed f(0)");
  return (1.0 / M + f_at_0 - f_star_lb) / (dimension * (std::exp(M * M) - 1.0));
}

std::vector<ScheduleCell> make_schedule(const std::vector<double>& Ms, int r_min, int r_max) {
  if (Ms.empty() || r_min > r_max) throw std::invalid_argument("empty schedule");
  std::vector<ScheduleCell> cells;
  for (double M : Ms) {
    for (int r = r_min; r <= r_max; ++r) cells.push_back({M, r});
  }
  return cells;
}

SosCertificate assemble_from_cell(const Polynomial& f, double eps_half,
                                  const CertificateCell& cell, double lambda_prime, int r) {
  const int n = f.dimension();
  if (lambda_prime < cell.lambda - 1e-12) {
    throw std::invalid_argument("lambda' must dominate the cell multiplier");
  }
  if (r < cell.r) throw std::invalid_argument("target order must be >= the cell order");

  MonomialBasis basis(n, r);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  // The graded ordering makes the order-cell.r basis a leading block.
  gram.topLeftCorner(cell.gram_q.rows(), cell.gram_q.cols()) = cell.gram_q;
  gram(0, 0) += cell.gamma + n * (lambda_prime - cell.lambda);
  for (int j = 0; j < n; ++j) {
    for (int k = 1; k <= r; ++k) {
      Monomial alpha(n, 0);
      alpha[j] = k;
      const int idx = basis.index_of(alpha);
      double add = eps_half + (lambda_prime - cell.lambda);
      if (k > cell.r) add += cell.lambda;
      gram(idx, idx) += add * inv_factorial(k);
    }
  }

  SosCertificate cert{f,
                      lambda_prime + eps_half,
                      r,
                      std::move(basis),
                      std::move(gram),
                      {},
                      0.0,
                      0.0,
                      {cell.M, cell.lambda, cell.gamma, cell.solver_gap}};
  cert.squares = gram_to_squares(cert.gram, cert.basis);
  Polynomial sum_sq = Polynomial::zero(n);
  for (const Polynomial& s : cert.squares) sum_sq = sum_sq + s.squared();
  cert.identity_residual = (build_f_eps(f, cert.epsilon, cert.r_eps) - sum_sq).l1_norm();
  cert.l1_gap = l1_gap_value(cert.epsilon, n, cert.r_eps);
  return cert;
}

namespace {

// Deterministic sample hunt for a point with f(x) < -1e-9.
std::optional<Eigen::VectorXd> find_negative_point(const Polynomial& f) {
  const int n = f.dimension();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
  if (f.evaluate(xs) < -1e-9) return x;
  std::mt19937_64 rng(0x5eedf00dULL);
  for (double radius : {1.0, 2.0, 5.0}) {
    std::uniform_real_distribution<double> dist(-radius, radius);
    for (int trial = 0; trial < 700; ++trial) {
      for (int i = 0; i < n; ++i) x[i] = dist(rng);
      if (f.evaluate(xs) < -1e-9) return x;
    }
  }
  return std::nullopt;
}

}  // namespace

FindResult find_r_eps(const Polynomial& f, double eps, const std::vector<ScheduleCell>& schedule,
                      double tol) {
  if (eps <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (schedule.empty()) throw std::invalid_argument("schedule must be nonempty");

  FindResult result;
  if (auto witness = find_negative_point(f)) {
    std::ostringstream os;
    os << "polynomial is detectably negative at (";
    for (int i = 0; i < witness->size(); ++i) os << (i ? ", " : "") << (*witness)[i];
    os << "): rejected";
    result.message = os.str();
    result.negative_input = true;
    return result;
  }

  const int n = f.dimension();
  const double eps_half = eps / 2.0;
  // f* >= 0 but unknown: run on the shifted objective g = f + n*eps/2, whose
  // minimum is strictly positive, and fold the shift back into the squares.
  const Polynomial g = f + Polynomial::constant(n, n * eps_half);
  const int r_f = (f.degree() + 1) / 2;
  const double gamma_floor = -1e-9 * (1.0 + f.l1_norm());

  std::ostringstream log;
  for (const ScheduleCell& cell : schedule) {
    if (cell.r < r_f) continue;
    SdpSolution sol = solve_relaxation(g, {.r = cell.r, .M = cell.M, .tol = tol});
    if (sol.status != SolveStatus::optimal) {
      log << "(M=" << cell.M << ", r=" << cell.r << "): " << to_string(sol.status) << "; ";
      continue;
    }
    result.best_lambda = std::min(result.best_lambda, sol.dual.lambda);
    if (sol.dual.lambda > eps_half) {
      log << "(M=" << cell.M << ", r=" << cell.r << "): lambda " << sol.dual.lambda << " > "
          << eps_half << "; ";
      continue;
    }
    if (sol.dual.gamma < gamma_floor) {
      log << "(M=" << cell.M << ", r=" << cell.r << "): dual constant " << sol.dual.gamma
          << " negative; ";
      continue;
    }
    CertificateCell found{cell.M,        cell.r,  sol.dual.lambda, sol.dual.gamma,
                          sol.dual.gram, sol.gap, sol.primal_value};
    SosCertificate cert = assemble_from_cell(f, eps_half, found, eps_half, cell.r);
    CertificateReport report = verify(f, cert);
    if (!report.passed) {
      log << "(M=" << cell.M << ", r=" << cell.r << "): assembled certificate failed ("
          << report.failure << "); ";
      continue;
    }
    result.certificate = std::move(cert);
    result.cell = std::move(found);
    result.message = log.str();
    return result;
  }

  std::ostringstream os;
  os << "schedule exhausted";
  if (std::isfinite(result.best_lambda)) os << "; best lambda " << result.best_lambda;
  os << "; " << log.str();
  result.message = os.str();
  return result;
}

}  // namespace sosalmost
