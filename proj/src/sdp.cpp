#include "sdp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sosalmost {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded_guard: return "unbounded_guard";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kStepFraction = 0.98;
constexpr double kInfiniteStep = 1e16;

// One symmetric PSD block plus the scalar budget slack.
struct BlockPoint {
  MatrixXd m;
  double b = 0.0;
};

// Largest t with lambda + t * delta staying PSD, in the scaled geometry where
// the current point is diag(sigma) (matrix block) and sigma_b (scalar block).
double step_to_boundary(const VectorXd& sigma, const MatrixXd& delta_m, double sigma_b,
                        double delta_b) {
  const int s = static_cast<int>(sigma.size());
  MatrixXd scaled(s, s);
  const VectorXd inv_sqrt = sigma.cwiseSqrt().cwiseInverse();
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) scaled(i, j) = delta_m(i, j) * inv_sqrt[i] * inv_sqrt[j];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
  double step = kInfiniteStep;
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < 0.0) step = std::min(step, -1.0 / min_eig);
  if (delta_b < 0.0) step = std::min(step, -sigma_b / delta_b);
  return step;
}

struct Workspace {
  // Scaled constraint rows: row k = [vec(F_k scaled), budget entry scaled].
  MatrixXd fmat;
  MatrixXd schur;
  Eigen::LLT<MatrixXd> schur_llt;
  MatrixXd g;      // NT scaling factor, W = G G^T
  MatrixXd g_inv;
  VectorXd sigma;  // scaled point of the matrix block (diagonal)
  double w_b = 1.0;
  double sigma_b = 1.0;
};

}  // namespace

SdpSolution solve(const SdpProblem& prob, const MomentSequence& start, double tol) {
  if (tol < 1e-10 || tol > 1e-4) {
    throw std::invalid_argument("solver tolerance must lie in [1e-10, 1e-4]");
  }
  if (start.dimension() != prob.n || start.order() < 2 * prob.r) {
    throw std::invalid_argument("start point does not match the problem");
  }

  const int m = prob.num_vars();
  const int s = prob.psd_dim();
  const double f_l1 = prob.c.lpNorm<1>() + std::abs(prob.constant_term);
  const double f0_norm = std::sqrt(1.0 + prob.budget_slack0 * prob.budget_slack0);

  auto finish = [&](SolveStatus status, const VectorXd& x, const BlockPoint& z, double pval,
                    double dval, double gap, int iters, double pinf, double dinf,
                    std::string message) {
    const double lambda = std::max(0.0, prob.budget_scale * z.b);
    DualShape dual{prob.constant_term - z.m(0, 0) + prob.n * lambda, lambda, z.m};
    return SdpSolution{status, prob.to_moment_sequence(x), std::move(dual), pval,
                       dval,   gap,                        iters,           pinf,
                       dinf,   std::move(message)};
  };

  // Degenerate order-0 relaxation: the only moment is y_0 = 1.
  if (m == 0) {
    BlockPoint z{MatrixXd::Zero(s, s), 0.0};
    const double value = prob.constant_term;
    return finish(SolveStatus::optimal, VectorXd(0), z, value, value, 0.0, 0, 0.0, 0.0, "");
  }

  VectorXd x(m);
  for (int k = 0; k < m; ++k) x[k] = start.value(prob.var_basis[k + 1]);

  auto apply_map = [&](const VectorXd& v) {
    BlockPoint out{MatrixXd::Zero(s, s), 0.0};
    out.m(0, 0) = 1.0;
    for (int k = 0; k < m; ++k) {
      for (const auto& [i, j] : prob.positions[k]) {
        out.m(i, j) = v[k];
        out.m(j, i) = v[k];
      }
    }
    out.b = prob.budget_slack0 - prob.budget_scale * prob.budget_coeff.dot(v);
    return out;
  };

  BlockPoint X = apply_map(x);
  const double z_scale = std::max(1.0, prob.c.lpNorm<Eigen::Infinity>());
  BlockPoint Z{MatrixXd::Identity(s, s) * z_scale, z_scale};

  Workspace ws;
  ws.fmat.resize(m, s * s + 1);

  double primal_value = 0.0, dual_value = 0.0, gap = 0.0, pinf = 0.0, dinf = 0.0;
  int iter = 0;
  int stalled = 0;

  // Best iterate by the worst of the three convergence measures.
  struct Snapshot {
    VectorXd x;
    BlockPoint z;
    double primal, dual, gap, pinf, dinf;
    int iter;
  };
  Snapshot best{x, Z, 0.0, 0.0, std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), 0};
  double best_merit = std::numeric_limits<double>::infinity();

  auto inner = [](const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).sum(); };

  for (iter = 0; iter <= kSdpMaxIterations; ++iter) {
    // Residuals and convergence test.
    BlockPoint fx = apply_map(x);
    const MatrixXd rp_m = fx.m - X.m;
    const double rp_b = fx.b - X.b;
    VectorXd rd = prob.c;
    for (int k = 0; k < m; ++k) {
      double dot = 0.0;
      for (const auto& [i, j] : prob.positions[k]) {
        dot += (i == j) ? Z.m(i, i) : 2.0 * Z.m(i, j);
      }
      rd[k] -= dot - prob.budget_scale * prob.budget_coeff[k] * Z.b;
    }

    primal_value = prob.c.dot(x) + prob.constant_term;
    dual_value = prob.constant_term - Z.m(0, 0) - prob.budget_slack0 * Z.b;
    gap = std::abs(primal_value - dual_value) / (1.0 + std::abs(primal_value));
    pinf = (rp_m.norm() + std::abs(rp_b)) / (1.0 + f0_norm);
    dinf = rd.lpNorm<1>() / (1.0 + f_l1);

#ifdef SOSALMOST_SDP_TRACE
    std::fprintf(stderr, "it=%3d p=%+.9e d=%+.9e gap=%.2e pinf=%.2e dinf=%.2e\n", iter,
                 primal_value, dual_value, gap, pinf, dinf);
#endif
    const double merit = std::max({gap, pinf, dinf});
    if (merit < best_merit) {
      best_merit = merit;
      best = Snapshot{x, Z, primal_value, dual_value, gap, pinf, dinf, iter};
    }
    if (merit <= tol) {
      return finish(SolveStatus::optimal, x, Z, primal_value, dual_value, gap, iter, pinf, dinf,
                    "");
    }
    if (primal_value < -1e12 * (1.0 + f_l1)) {
      return finish(SolveStatus::unbounded_guard, x, Z, primal_value, dual_value, gap, iter, pinf,
                    dinf, "primal objective diverged below the compactness bound");
    }
    if (dual_value > 1e12 * (1.0 + f_l1) && dinf <= tol) {
      return finish(SolveStatus::infeasible, x, Z, primal_value, dual_value, gap, iter, pinf, dinf,
                    "dual objective diverged: primal infeasible (assembly bug)");
    }
    if (iter == kSdpMaxIterations) break;

    // NT scaling from Cholesky factors of both blocks.
    Eigen::LLT<MatrixXd> llt_x(X.m);
    Eigen::LLT<MatrixXd> llt_z(Z.m);
    if (llt_x.info() != Eigen::Success || llt_z.info() != Eigen::Success || X.b <= 0.0 ||
        Z.b <= 0.0) {
      return finish(SolveStatus::numerical_failure, x, Z, primal_value, dual_value, gap, iter,
                    pinf, dinf, "Cholesky factorization of an iterate failed");
    }
    const MatrixXd lx = llt_x.matrixL();
    const MatrixXd lz = llt_z.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(lz.transpose() * lx,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    ws.sigma = svd.singularValues();
    if (ws.sigma.minCoeff() < 1e-150) {
      return finish(SolveStatus::numerical_failure, x, Z, primal_value, dual_value, gap, iter,
                    pinf, dinf, "NT scaling became singular");
    }
    const VectorXd sigma_inv_sqrt = ws.sigma.cwiseSqrt().cwiseInverse();
    ws.g = lx * svd.matrixV() * sigma_inv_sqrt.asDiagonal();
    MatrixXd lx_inv = MatrixXd::Identity(s, s);
    lx.triangularView<Eigen::Lower>().solveInPlace(lx_inv);
    ws.g_inv = ws.sigma.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * lx_inv;
    ws.w_b = std::sqrt(X.b / Z.b);
    ws.sigma_b = std::sqrt(X.b * Z.b);

    // Scaled constraint matrices, assembled from rank-one pieces of G^{-1}.
    MatrixXd ft(s, s);
    for (int k = 0; k < m; ++k) {
      ft.setZero();
      for (const auto& [i, j] : prob.positions[k]) {
        const auto ui = ws.g_inv.col(i);
        const auto uj = ws.g_inv.col(j);
        if (i == j) {
          ft.noalias() += ui * ui.transpose();
        } else {
          ft.noalias() += ui * uj.transpose();
          ft.noalias() += uj * ui.transpose();
        }
      }
      ws.fmat.row(k).head(s * s) = Eigen::Map<const VectorXd>(ft.data(), s * s);
      ws.fmat(k, s * s) = -prob.budget_scale * prob.budget_coeff[k] / ws.w_b;
    }
    ws.schur.noalias() = ws.fmat * ws.fmat.transpose();
    ws.schur_llt.compute(ws.schur);
    if (ws.schur_llt.info() != Eigen::Success) {
      ws.schur.diagonal().array() += 1e-12 * (1.0 + ws.schur.diagonal().maxCoeff());
      ws.schur_llt.compute(ws.schur);
      if (ws.schur_llt.info() != Eigen::Success) {
        return finish(SolveStatus::numerical_failure, x, Z, primal_value, dual_value, gap, iter,
                      pinf, dinf, "Schur complement factorization broke down");
      }
    }

    const MatrixXd rp_scaled = ws.g_inv * rp_m * ws.g_inv.transpose();
    const double rp_b_scaled = rp_b / ws.w_b;
    const double mu = (inner(X.m, Z.m) + X.b * Z.b) / (s + 1);

    VectorXd stack(s * s + 1);
    auto solve_direction = [&](const MatrixXd& rc_m, double rc_b, VectorXd& dx, MatrixXd& dxt,
                               MatrixXd& dzt, double& dxt_b, double& dzt_b) {
      stack.head(s * s) = Eigen::Map<const VectorXd>(rc_m.data(), s * s) -
                          Eigen::Map<const VectorXd>(rp_scaled.data(), s * s);
      stack[s * s] = rc_b - rp_b_scaled;
      const VectorXd rhs = ws.fmat * stack - rd;
      dx = ws.schur_llt.solve(rhs);
      stack.noalias() -= ws.fmat.transpose() * dx;
      dzt = Eigen::Map<const MatrixXd>(stack.data(), s, s);
      dzt = 0.5 * (dzt + dzt.transpose()).eval();
      dzt_b = stack[s * s];
      dxt = rc_m - dzt;
      dxt_b = rc_b - dzt_b;
    };

    // Predictor: aim straight at complementarity zero.
    MatrixXd rc = MatrixXd::Zero(s, s);
    rc.diagonal() = -ws.sigma;
    double rc_b = -ws.sigma_b;
    VectorXd dx_a;
    MatrixXd dxt_a, dzt_a;
    double dxt_ab = 0.0, dzt_ab = 0.0;
    solve_direction(rc, rc_b, dx_a, dxt_a, dzt_a, dxt_ab, dzt_ab);

    const double ap_aff = std::min(1.0, step_to_boundary(ws.sigma, dxt_a, ws.sigma_b, dxt_ab));
    const double ad_aff = std::min(1.0, step_to_boundary(ws.sigma, dzt_a, ws.sigma_b, dzt_ab));

    MatrixXd lam_p = ap_aff * dxt_a;
    lam_p.diagonal() += ws.sigma;
    MatrixXd lam_d = ad_aff * dzt_a;
    lam_d.diagonal() += ws.sigma;
    const double mu_aff = (inner(lam_p, lam_d) + (ws.sigma_b + ap_aff * dxt_ab) *
                                                     (ws.sigma_b + ad_aff * dzt_ab)) /
                          (s + 1);
    double centering = mu_aff / mu;
    centering = std::clamp(centering * centering * centering, 1e-10, 1.0);

    // Corrector with the Mehrotra second-order term in scaled space.
    MatrixXd rs = -0.5 * (dxt_a * dzt_a + dzt_a * dxt_a);
    rs.diagonal().array() += centering * mu;
    rs.diagonal() -= ws.sigma.cwiseProduct(ws.sigma);
    for (int j = 0; j < s; ++j) {
      for (int i = 0; i < s; ++i) rc(i, j) = 2.0 * rs(i, j) / (ws.sigma[i] + ws.sigma[j]);
    }
    rc_b = (centering * mu - ws.sigma_b * ws.sigma_b - dxt_ab * dzt_ab) / ws.sigma_b;

    VectorXd dx;
    MatrixXd dxt, dzt;
    double dxt_b = 0.0, dzt_b = 0.0;
    solve_direction(rc, rc_b, dx, dxt, dzt, dxt_b, dzt_b);

    // Commit only steps whose end point still factors; halve otherwise.
    auto safe_step = [s](BlockPoint& point, const MatrixXd& dm, double db, double alpha) {
      for (int attempt = 0; attempt < 40 && alpha > 1e-14; ++attempt) {
        MatrixXd cand = point.m + alpha * dm;
        cand = 0.5 * (cand + cand.transpose()).eval();
        const double cand_b = point.b + alpha * db;
        if (cand_b > 0.0) {
          Eigen::LLT<MatrixXd> llt(cand);
          if (llt.info() == Eigen::Success) {
            point.m = std::move(cand);
            point.b = cand_b;
            return alpha;
          }
        }
        alpha *= 0.5;
      }
      return 0.0;
    };

    const MatrixXd dx_full = ws.g * dxt * ws.g.transpose();
    const double dxb_full = ws.w_b * dxt_b;
    const MatrixXd dz_full = ws.g_inv.transpose() * dzt * ws.g_inv;
    const double dzb_full = dzt_b / ws.w_b;

    const double ap = safe_step(
        X, dx_full, dxb_full,
        std::min(1.0, kStepFraction * step_to_boundary(ws.sigma, dxt, ws.sigma_b, dxt_b)));
    const double ad = safe_step(
        Z, dz_full, dzb_full,
        std::min(1.0, kStepFraction * step_to_boundary(ws.sigma, dzt, ws.sigma_b, dzt_b)));
    x.noalias() += ap * dx;

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalled >= 5) {
        return finish(SolveStatus::numerical_failure, best.x, best.z, best.primal, best.dual,
                      best.gap, best.iter, best.pinf, best.dinf,
                      "search directions collapsed; returning best iterate");
      }
    } else {
      stalled = 0;
    }
  }

  return finish(SolveStatus::max_iterations, best.x, best.z, best.primal, best.dual, best.gap,
                best.iter, best.pinf, best.dinf, "iteration cap reached; returning best iterate");
}

SdpSolution solve_relaxation(const Polynomial& f, const RelaxationConfig& cfg) {
  const SdpProblem prob = build_primal(f, cfg);
  return solve(prob, feasible_start(cfg, f.dimension()), cfg.tol);
}

}  // namespace sosalmost
