#include "kkt.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sosalmost {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::span<const double> as_span(const VectorXd& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

// Gradient and Hessian of one polynomial, with the partials precomputed.
struct Derivatives {
  std::vector<Polynomial> grad;
  std::vector<std::vector<Polynomial>> hess;  // lower triangle, hess[i][j], j <= i

  explicit Derivatives(const Polynomial& p) {
    const int n = p.dimension();
    grad.reserve(n);
    for (int i = 1; i <= n; ++i) grad.push_back(p.partial(i));
    hess.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) hess[i].push_back(grad[i].partial(j + 1));
    }
  }

  VectorXd gradient(const VectorXd& x) const {
    VectorXd g(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) g[i] = grad[i].evaluate(as_span(x));
    return g;
  }

  MatrixXd hessian(const VectorXd& x) const {
    const int n = static_cast<int>(grad.size());
    MatrixXd h(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        h(i, j) = hess[i][j].evaluate(as_span(x));
        h(j, i) = h(i, j);
      }
    }
    return h;
  }
};

double min_eigenvalue(const MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

NotConvexError::NotConvexError(std::string message, VectorXd point, double eigenvalue)
    : std::runtime_error(std::move(message)), witness_(std::move(point)), eigenvalue_(eigenvalue) {}

ConvexProgram::ConvexProgram(Polynomial f, std::vector<Polynomial> constraints,
                             VectorXd slater_point)
    : f_(std::move(f)), g_(std::move(constraints)), x0_(std::move(slater_point)) {
  const int n = f_.dimension();
  if (x0_.size() != n) throw std::invalid_argument("Slater point has wrong dimension");
  for (const Polynomial& gj : g_) {
    if (gj.dimension() != n) throw std::invalid_argument("constraint dimension mismatch");
    if (!(gj.evaluate(as_span(x0_)) > 0.0)) {
      throw std::invalid_argument("Slater condition fails: g_j(x0) <= 0 for constraint " +
                                  gj.format());
    }
  }
}

void ConvexProgram::check_convexity() const {
  const int n = dimension();
  const double radius = 2.0 * (1.0 + x0_.lpNorm<Eigen::Infinity>());
  std::mt19937_64 rng(0xc0417e57ULL);
  std::uniform_real_distribution<double> dist(-radius, radius);

  Derivatives df(f_);
  std::vector<Derivatives> dg;
  dg.reserve(g_.size());
  for (const Polynomial& gj : g_) dg.emplace_back(gj);

  VectorXd x(n);
  for (int trial = 0; trial < 100; ++trial) {
    for (int i = 0; i < n; ++i) x[i] = dist(rng);
    MatrixXd hf = df.hessian(x);
    double floor = -1e-6 * (1.0 + hf.cwiseAbs().maxCoeff());
    double eig = min_eigenvalue(hf);
    if (eig < floor) {
      std::ostringstream os;
      os << "objective Hessian has eigenvalue " << eig << " at a sampled point";
      throw NotConvexError(os.str(), x, eig);
    }
    for (std::size_t j = 0; j < g_.size(); ++j) {
      MatrixXd hg = -dg[j].hessian(x);
      floor = -1e-6 * (1.0 + hg.cwiseAbs().maxCoeff());
      eig = min_eigenvalue(hg);
      if (eig < floor) {
        std::ostringstream os;
        os << "constraint " << j + 1 << " is not concave: -Hessian eigenvalue " << eig
           << " at a sampled point";
        throw NotConvexError(os.str(), x, eig);
      }
    }
  }
}

KktSolution solve_convex_program(const ConvexProgram& prog, double tol) {
  if (tol <= 0.0 || tol > 1e-2) throw std::invalid_argument("tolerance must lie in (0, 1e-2]");
  prog.check_convexity();

  const int n = prog.dimension();
  const int m = prog.num_constraints();
  Derivatives df(prog.objective());
  std::vector<Derivatives> dg;
  dg.reserve(m);
  for (const Polynomial& gj : prog.constraints()) dg.emplace_back(gj);

  VectorXd x = prog.slater_point();
  KktSolution sol;
  sol.multipliers = VectorXd::Zero(m);

  auto g_values = [&](const VectorXd& p) {
    VectorXd v(m);
    for (int j = 0; j < m; ++j) v[j] = prog.constraints()[j].evaluate(as_span(p));
    return v;
  };
  auto barrier_value = [&](const VectorXd& p, double mu) {
    const VectorXd gv = g_values(p);
    if (m > 0 && gv.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    double value = prog.objective().evaluate(as_span(p));
    for (int j = 0; j < m; ++j) value -= mu * std::log(gv[j]);
    return value;
  };

  int total_newton = 0;
  auto newton = [&](double mu, double grad_tol) {
    for (int it = 0; it < 120; ++it) {
      const VectorXd gv = g_values(x);
      VectorXd grad = df.gradient(x);
      MatrixXd hess = df.hessian(x);
      for (int j = 0; j < m; ++j) {
        const VectorXd gj_grad = dg[j].gradient(x);
        grad -= (mu / gv[j]) * gj_grad;
        hess += (mu / (gv[j] * gv[j])) * (gj_grad * gj_grad.transpose());
        hess -= (mu / gv[j]) * dg[j].hessian(x);
      }
      if (grad.lpNorm<Eigen::Infinity>() <= grad_tol) return true;

      MatrixXd damped = hess;
      damped.diagonal().array() += 1e-10 * (1.0 + hess.cwiseAbs().maxCoeff());
      Eigen::LDLT<MatrixXd> ldlt(damped);
      VectorXd step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) return false;

      const double slope = grad.dot(step);
      const double base = barrier_value(x, mu);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        if (barrier_value(x + t * step, mu) <= base + 0.25 * t * slope) {
          x += t * step;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      ++total_newton;
      if (!moved) return grad.lpNorm<Eigen::Infinity>() <= grad_tol * 1e3;
    }
    return false;
  };

  const double mu_final = std::max(1e-12, tol * 1e-3);
  bool ok = true;
  if (m == 0) {
    ok = newton(0.0, 1e-11 * (1.0 + std::abs(prog.objective().evaluate(as_span(x)))));
  } else {
    double mu = 1.0;
    while (true) {
      ok = newton(mu, std::max(1e-12, 0.1 * mu));
      if (!ok || mu <= mu_final) break;
      mu = std::max(mu * 0.1, mu_final * 0.99);
    }
    const VectorXd gv = g_values(x);
    for (int j = 0; j < m; ++j) sol.multipliers[j] = mu_final / gv[j];
  }

  sol.x_star = x;
  sol.f_star = prog.objective().evaluate(as_span(x));
  sol.iterations = total_newton;

  // Multipliers below solver noise are exact zeros of the complementarity
  // system; keep them clean so inactive constraints report lambda = 0.
  const double clip = 1e-8 * (1.0 + std::abs(sol.f_star));
  for (int j = 0; j < m; ++j) {
    if (sol.multipliers[j] < clip) sol.multipliers[j] = 0.0;
  }

  VectorXd residual = df.gradient(x);
  double comp = 0.0;
  for (int j = 0; j < m; ++j) {
    residual -= sol.multipliers[j] * dg[j].gradient(x);
    comp = std::max(comp, std::abs(sol.multipliers[j] *
                                   prog.constraints()[j].evaluate(as_span(x))));
  }
  sol.stationarity = residual.lpNorm<Eigen::Infinity>();
  sol.complementarity = comp;
  const double scale = 1.0 + std::abs(sol.f_star);
  sol.converged = ok && sol.stationarity <= 1e-6 * scale && sol.complementarity <= 1e-6 * scale;
  if (!sol.converged) {
    std::ostringstream os;
    os << "barrier solve did not meet the KKT tolerances: stationarity " << sol.stationarity
       << ", complementarity " << sol.complementarity;
    sol.message = os.str();
  }
  return sol;
}

Polynomial lagrangian(const ConvexProgram& prog, const VectorXd& multipliers) {
  if (multipliers.size() != prog.num_constraints()) {
    throw std::invalid_argument("multiplier count does not match constraints");
  }
  Polynomial L = prog.objective();
  for (int j = 0; j < prog.num_constraints(); ++j) {
    if (multipliers[j] < 0.0) throw std::invalid_argument("multipliers must be nonnegative");
    L = L - multipliers[j] * prog.constraints()[j];
  }
  return L;
}

namespace {

// Deterministic feasible samples around a center, by rejection.
std::vector<VectorXd> feasible_samples(const std::vector<Polynomial>& g, const VectorXd& center,
                                       int want, int max_attempts) {
  const int n = static_cast<int>(center.size());
  const double radius = 1.0 + 2.0 * center.lpNorm<Eigen::Infinity>();
  std::mt19937_64 rng(0xfea51b1eULL);
  std::uniform_real_distribution<double> dist(-radius, radius);
  std::vector<VectorXd> out;
  VectorXd x(n);
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < want;
       ++attempt) {
    for (int i = 0; i < n; ++i) x[i] = center[i] + dist(rng);
    bool inside = true;
    for (const Polynomial& gj : g) {
      if (gj.evaluate(as_span(x)) < 0.0) {
        inside = false;
        break;
      }
    }
    if (inside) out.push_back(x);
  }
  return out;
}

}  // namespace

RepresentationResult build_representation(const ConvexProgram& prog, double eps,
                                          const std::vector<ScheduleCell>& schedule, double tol) {
  if (eps <= 0.0) throw std::invalid_argument("epsilon must be positive");
  RepresentationResult result;
  result.kkt = solve_convex_program(prog, tol);
  if (!result.kkt.converged) {
    result.message = result.kkt.message;
    return result;
  }

  // Spot-check the standing assumption f >= 0 on K.
  std::vector<VectorXd> samples =
      feasible_samples(prog.constraints(), prog.slater_point(), 200, 5000);
  samples.push_back(result.kkt.x_star);
  const double floor = -1e-9 * (1.0 + std::abs(result.kkt.f_star));
  for (const VectorXd& x : samples) {
    if (prog.objective().evaluate(as_span(x)) < floor) {
      throw std::invalid_argument("objective is negative on a sampled feasible point");
    }
  }

  const Polynomial L = lagrangian(prog, result.kkt.multipliers);
  result.search = find_r_eps(L, eps, schedule, tol);
  if (!result.search.certificate) {
    result.message = result.search.message;
    return result;
  }

  KktRepresentation rep{prog.objective(),
                        prog.constraints(),
                        result.kkt.multipliers,
                        result.kkt.x_star,
                        result.kkt.f_star,
                        *result.search.certificate,
                        0.0};
  const SosCertificate& cert = rep.certificate;
  Polynomial identity = build_f_eps(rep.f, cert.epsilon, cert.r_eps) -
                        gram_polynomial(cert.gram, cert.basis);
  for (int j = 0; j < rep.multipliers.size(); ++j) {
    identity = identity - rep.multipliers[j] * rep.g[j];
  }
  rep.residual = identity.l1_norm();
  result.representation = std::move(rep);
  return result;
}

RepresentationReport verify_representation(const KktRepresentation& rep) {
  RepresentationReport report;
  std::ostringstream why;

  report.multipliers_nonnegative = (rep.multipliers.size() == 0) || rep.multipliers.minCoeff() >= 0.0;
  if (!report.multipliers_nonnegative) why << "a multiplier is negative; ";
  if (rep.multipliers.size() != static_cast<Eigen::Index>(rep.g.size())) {
    throw std::invalid_argument("multiplier count does not match constraints");
  }

  // Certificate of the reconstructed Lagrangian.
  Polynomial L = rep.f;
  for (int j = 0; j < rep.multipliers.size(); ++j) {
    L = L - std::max(0.0, rep.multipliers[j]) * rep.g[j];
  }
  report.certificate = verify(L, rep.certificate);
  if (!report.certificate.passed) {
    why << "Lagrangian certificate failed (" << report.certificate.failure << "); ";
  }

  // Coefficient identity f + eps*Theta = f_0 + sum lambda_j g_j.
  const Polynomial f_eps = build_f_eps(rep.f, rep.certificate.epsilon, rep.certificate.r_eps);
  Polynomial identity = f_eps - gram_polynomial(rep.certificate.gram, rep.certificate.basis);
  for (int j = 0; j < rep.multipliers.size(); ++j) {
    identity = identity - rep.multipliers[j] * rep.g[j];
  }
  report.identity_residual = identity.l1_norm();
  report.tolerance = 1e-6 * (1.0 + f_eps.l1_norm());
  if (report.identity_residual > report.tolerance) {
    why << "representation identity residual " << report.identity_residual << " exceeds "
        << report.tolerance << "; ";
  }

  // Consequence: f_eps >= 0 on sampled feasible points.
  std::vector<VectorXd> samples = feasible_samples(rep.g, rep.x_star, 1000, 20000);
  report.feasible_samples = static_cast<int>(samples.size());
  report.min_f_eps_on_samples = std::numeric_limits<double>::infinity();
  for (const VectorXd& x : samples) {
    const double value = f_eps.evaluate(as_span(x));
    report.min_f_eps_on_samples = std::min(report.min_f_eps_on_samples, value);
    if (value < -1e-7 * (1.0 + std::abs(value))) {
      why << "f_eps is negative (" << value << ") at a sampled feasible point; ";
      break;
    }
  }

  report.failure = why.str();
  report.passed = report.failure.empty();
  return report;
}

}  // namespace sosalmost
