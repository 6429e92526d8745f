#pragma once

#include <cstdint>
#include <vector>

#include "ctsched/lp_problem.hpp"

namespace ctsched {

struct LpSolution {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  std::vector<double> x;      // valid iff optimal
  double objective = 0.0;     // valid iff optimal
};

struct SolveOptions {
  double feas_tol = 1e-9;  // absolute row-residual tolerance
  double opt_tol = 1e-9;   // reduced-cost tolerance
  std::int64_t max_pivots = 0;  // 0 = automatic
};

// Dense two-phase simplex. Deterministic for fixed input; throws
// SolverFailureError on numerical breakdown instead of returning a wrong
// "optimal".
LpSolution solve(const LpProblem& p, const SolveOptions& opt = {});

}  // namespace ctsched
