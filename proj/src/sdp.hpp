#ifndef SOSALMOST_SDP_HPP
#define SOSALMOST_SDP_HPP

#include <string>

#include "relaxation.hpp"

namespace sosalmost {

enum class SolveStatus {
  optimal,
  max_iterations,
  infeasible,
  unbounded_guard,
  numerical_failure,
};

std::string to_string(SolveStatus status);

struct SdpSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  MomentSequence primal;  // optimal y with y_0 = 1 restored, order 2r
  DualShape dual;         // gamma, lambda, Gram of q
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // |primal - dual| / (1 + |primal|)
  int iterations = 0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  std::string message;
};

// Primal-dual interior-point solve of the relaxation and its SOS dual to
// relative gap <= tol. `start` must be strictly feasible (feasible_start).
// Deterministic: identical inputs give identical iterates.
SdpSolution solve(const SdpProblem& prob, const MomentSequence& start, double tol);

// build_primal + feasible_start + solve in one call.
SdpSolution solve_relaxation(const Polynomial& f, const RelaxationConfig& cfg);

inline constexpr int kSdpMaxIterations = 200;

}  // namespace sosalmost

#endif  // SOSALMOST_SDP_HPP
