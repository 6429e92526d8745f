#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ctsched/decision_rule.hpp"
#include "ctsched/envelope.hpp"
#include "ctsched/pwa.hpp"
#include "ctsched/system_model.hpp"

namespace ctsched {

// Seeded generator with a platform-independent uniform, so fixed seeds give
// byte-identical trajectories everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Forward-samples one member of the uncertainty set on the given grid: the
// next value is drawn uniformly from the envelope interval intersected with
// the ramp-reachable interval, which is never empty because the envelopes
// themselves obey the ramp limits.
std::vector<PwaFunction> sample_on_grid(const DemandEnvelope& env,
                                        const std::vector<double>& grid_points,
                                        Rng& rng);

// Samples on the union of a uniform refinement (points_per_horizon points)
// and the envelope grid.
std::vector<PwaFunction> sample_trajectory(const DemandEnvelope& env,
                                           std::size_t points_per_horizon,
                                           std::uint64_t seed);

// Constraint audit of replayed outputs against one demand trajectory.
// Violations are recorded only beyond tol, so an all-zero report means
// feasible within tolerance. Breakpoint and segment checks are exact for the
// continuum because all trajectories are piecewise affine.
struct FeasibilityReport {
  struct Entry {
    double max_violation = 0.0;
    double at_time = 0.0;
    long count = 0;
  };
  Entry capacity, line, ramp, balance;

  bool all_zero() const {
    return capacity.count == 0 && line.count == 0 && ramp.count == 0 &&
           balance.count == 0;
  }
};

FeasibilityReport audit(const std::vector<PwaFunction>& outputs,
                        const std::vector<PwaFunction>& traj,
                        const SystemModel& sys, double tol);

// Exact integral of C . replay(rule, traj) over the horizon.
double realized_cost(const DecisionRule& rule,
                     const std::vector<PwaFunction>& traj,
                     const std::vector<double>& cost);

// Closed-form worst-case cost of the rule over the uncertainty set.
double worst_case_cost(const DecisionRule& rule, const DemandEnvelope& env,
                       const std::vector<double>& cost);

}  // namespace ctsched
