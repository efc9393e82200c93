#ifndef SOSALMOST_CERTIFICATE_HPP
#define SOSALMOST_CERTIFICATE_HPP

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdp.hpp"

namespace sosalmost {

// Checkable witness that f_eps = f + eps * Theta_{r_eps} is a sum of squares:
// gram is PSD over the order-r' basis (r' = max(r_eps, ceil(deg f / 2))) with
// v^T gram v = f_eps, and squares is its explicit spectral decomposition.
struct SosCertificate {
  Polynomial f;
  double epsilon = 0.0;
  int r_eps = 0;
  MonomialBasis basis;                // order r'
  Eigen::MatrixXd gram;
  std::vector<Polynomial> squares;
  double identity_residual = 0.0;     // l1 norm of f_eps - sum s_i^2
  double l1_gap = 0.0;                // eps * n * sum_{k<=r_eps} 1/k!
  struct Provenance {
    double M = 0.0;
    double lambda_M = 0.0;
    double gamma_M = 0.0;
    double solver_gap = 0.0;
  } provenance;
};

// f + eps * Theta_{r_eps}.
Polynomial build_f_eps(const Polynomial& f, double eps, int r_eps);

// ||f - f_eps||_1 = eps * n * sum_{k=0}^{r_eps} 1/k!, always <= eps * n * e.
double l1_gap_value(double eps, int dimension, int r_eps);

// Spectral split G = sum mu_i u_i u_i^T into squares s_i = sqrt(mu_i) u_i^T v.
// Eigenvalues in [-1e-9 * trace, 0) are clipped to zero; below that the matrix
// is rejected as indefinite.
std::vector<Polynomial> gram_to_squares(const Eigen::MatrixXd& gram, const MonomialBasis& basis);

// Polynomial v_r^T G v_r over the given basis.
Polynomial gram_polynomial(const Eigen::MatrixXd& gram, const MonomialBasis& basis);

struct CertificateReport {
  bool passed = false;
  double residual_gram = 0.0;     // l1 of f_eps - v^T G v
  double residual_squares = 0.0;  // l1 of f_eps - sum s_i^2
  double gram_min_eigenvalue = 0.0;
  double l1_gap_expected = 0.0;
  double tolerance = 0.0;
  std::string failure;  // empty when passed
};

// Solver-independent check: recomputes f_eps and both reconstructions with
// plain polynomial arithmetic plus one eigendecomposition.
CertificateReport verify(const Polynomial& f, const SosCertificate& cert);

// (1/M + f(0) - f*) / (n (e^{M^2} - 1)): the decay bound on the dual
// multiplier; requires f_star_lb > 1/M.
double lambda_bound(double M, double f_at_0, double f_star_lb, int dimension);

struct ScheduleCell {
  double M = 1.0;
  int r = 1;
};

std::vector<ScheduleCell> make_schedule(const std::vector<double>& Ms, int r_min, int r_max);

// Dual data of one solved relaxation cell of the shifted objective
// g = f + (eps/2) n, kept so certificates can be re-assembled at other
// (lambda, r) pairs.
struct CertificateCell {
  double M = 0.0;
  int r = 0;
  double lambda = 0.0;       // dual multiplier of the budget row
  double gamma = 0.0;        // dual constant for g
  Eigen::MatrixXd gram_q;    // Gram of the dual SOS polynomial q over order r
  double solver_gap = 0.0;
  double primal_value = 0.0;
};

// Assemble the certificate f + 2*lambda'*Theta_r = SOS from a solved cell,
// valid for any lambda' >= cell.lambda and r >= cell.r. find_r_eps uses
// lambda' = eps/2 so the result certifies f_eps exactly at eps.
SosCertificate assemble_from_cell(const Polynomial& f, double eps_half,
                                  const CertificateCell& cell, double lambda_prime, int r);

struct FindResult {
  std::optional<SosCertificate> certificate;
  std::optional<CertificateCell> cell;  // the successful cell
  double best_lambda = std::numeric_limits<double>::infinity();
  bool negative_input = false;
  std::string message;
};

// Search the schedule for a cell of the shifted relaxation with a budget
// multiplier small enough to absorb into eps; rejects polynomials that are
// detectably negative somewhere (sampled value < -1e-9).
FindResult find_r_eps(const Polynomial& f, double eps, const std::vector<ScheduleCell>& schedule,
                      double tol);

}  // namespace sosalmost

#endif  // SOSALMOST_CERTIFICATE_HPP
