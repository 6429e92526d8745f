#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctsched/decision_rule.hpp"
#include "ctsched/envelope.hpp"
#include "ctsched/lp_builder.hpp"
#include "ctsched/system_model.hpp"

namespace ctsched {

struct SeparationResult {
  enum class Family { vertex, ramp_upper, ramp_lower };
  Family family;
  std::size_t j;    // breakpoint (vertex family) or segment (ramp family)
  std::size_t row;  // stacked row p for vertex cuts, generator for ramp cuts
  VertexSelector sigma;
  double violation;
};

// Most violated vertex inequality for row p at breakpoint j, found by the
// sign rule: sigma'_d = 1 iff entry d of (A_p alpha + B_p) is non-negative.
// Since H_j >= 0 this sigma' maximizes the left-hand side over all vertices.
std::optional<SeparationResult> separate_vertex(
    const std::vector<double>& alpha, const std::vector<double>& beta_j,
    const DemandEnvelope& env, const StackedInequalities& s, std::size_t j,
    std::size_t p, double tol);

// Most violated ramp inequality for generator g on segment j. The upper
// bound maximizes over the ramp box (sigma'_d = 1 iff alpha_{g,d} >= 0),
// the lower bound minimizes (sigma'_d = 1 iff alpha_{g,d} < 0).
std::optional<SeparationResult> separate_ramp(
    const std::vector<double>& alpha, const std::vector<double>& beta_slope_j,
    const DemandEnvelope& env, const SystemModel& sys, std::size_t j,
    std::size_t g, RampBound bound, double tol);

struct IterationStat {
  double master_objective;
  std::size_t cuts_added;
};

struct SolveLog {
  std::size_t iterations = 0;
  std::vector<IterationStat> per_iteration;
  double objective = 0.0;
  std::size_t initial_slice = 0;  // the randomly drawn vertex index l'
};

struct RobustSolveResult {
  DecisionRule rule;
  SolveLog log;
};

// Cutting-plane loop: solve the master relaxation, add every most-violated
// inequality found by the separators, repeat until none is violated beyond
// tol. The returned rule then satisfies the fully enumerated LP and attains
// its optimum.
RobustSolveResult solve_robust(const DemandEnvelope& env,
                               const SystemModel& sys, std::uint64_t seed,
                               double tol = 1e-7, std::size_t max_iter = 0);

}  // namespace ctsched
