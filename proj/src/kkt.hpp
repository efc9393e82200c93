#ifndef SOSALMOST_KKT_HPP
#define SOSALMOST_KKT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "certificate.hpp"

namespace sosalmost {

// Raised when sampled Hessians show the program is not a convex one
// (f convex, every g_j concave); carries the witness point.
class NotConvexError : public std::runtime_error {
 public:
  NotConvexError(std::string message, Eigen::VectorXd point, double eigenvalue);
  const Eigen::VectorXd& witness() const { return witness_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  Eigen::VectorXd witness_;
  double eigenvalue_;
};

// min f over K = {g_j >= 0} with a Slater point; g_j(x0) > 0 is verified at
// construction.
class ConvexProgram {
 public:
  ConvexProgram(Polynomial f, std::vector<Polynomial> constraints, Eigen::VectorXd slater_point);

  const Polynomial& objective() const { return f_; }
  const std::vector<Polynomial>& constraints() const { return g_; }
  const Eigen::VectorXd& slater_point() const { return x0_; }
  int dimension() const { return f_.dimension(); }
  int num_constraints() const { return static_cast<int>(g_.size()); }

  // Sampled spectral test of the Hessians of f and -g_j at 100 deterministic
  // points; throws NotConvexError with the witness on failure.
  void check_convexity() const;

 private:
  Polynomial f_;
  std::vector<Polynomial> g_;
  Eigen::VectorXd x0_;
};

struct KktSolution {
  Eigen::VectorXd x_star;
  Eigen::VectorXd multipliers;  // lambda_j >= 0, one per constraint
  double f_star = 0.0;
  bool converged = false;
  double stationarity = 0.0;    // ||grad f - sum lambda_j grad g_j||_inf
  double complementarity = 0.0; // max_j |lambda_j g_j(x*)|
  int iterations = 0;
  std::string message;
};

// Log-barrier path following with damped Newton steps, started at the Slater
// point; multipliers are the barrier gradients mu/g_j at the final mu.
KktSolution solve_convex_program(const ConvexProgram& prog, double tol);

// f - sum lambda_j g_j.
Polynomial lagrangian(const ConvexProgram& prog, const Eigen::VectorXd& multipliers);

// The scalar-multiplier representation f + eps*Theta = f_0 + sum lambda_j g_j
// with f_0 certified SOS (the certificate is for the Lagrangian).
struct KktRepresentation {
  Polynomial f;
  std::vector<Polynomial> g;
  Eigen::VectorXd multipliers;
  Eigen::VectorXd x_star;
  double f_star = 0.0;
  SosCertificate certificate;  // certifies L = f - sum lambda_j g_j
  double residual = 0.0;       // l1 of f + eps*Theta - f_0 - sum lambda_j g_j
};

struct RepresentationResult {
  std::optional<KktRepresentation> representation;
  KktSolution kkt;
  FindResult search;
  std::string message;
};

RepresentationResult build_representation(const ConvexProgram& prog, double eps,
                                          const std::vector<ScheduleCell>& schedule, double tol);

struct RepresentationReport {
  bool passed = false;
  bool multipliers_nonnegative = false;
  CertificateReport certificate;  // for the reconstructed Lagrangian
  double identity_residual = 0.0;
  double tolerance = 0.0;
  int feasible_samples = 0;
  double min_f_eps_on_samples = 0.0;
  std::string failure;
};

// Independent check of a representation: multiplier signs, the Gram
// certificate of the reconstructed Lagrangian, the coefficient identity, and
// nonnegativity of f_eps on sampled feasible points.
RepresentationReport verify_representation(const KktRepresentation& rep);

}  // namespace sosalmost

#endif  // SOSALMOST_KKT_HPP
