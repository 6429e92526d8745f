#pragma once

#include <string>
#include <vector>

#include "ctsched/pwa.hpp"

namespace ctsched {

// Per-interval demand bounds on N equally spaced time points: upper[j] and
// lower[j] bound the demand anywhere inside [grid[j], grid[j+1]].
struct StepBounds {
  std::vector<double> grid;   // N points, grid[0] = 0, grid[N-1] = T
  std::vector<double> upper;  // N-1 per-interval suprema (MW)
  std::vector<double> lower;  // N-1 per-interval infima (MW)

  void validate() const;
  double horizon() const { return grid.back(); }
};

// Extreme average rates of change of a load's demand (MW/h). down <= up;
// neither sign is forced.
struct RampLimits {
  double up = 0.0;
  double down = 0.0;
};

struct LoadBounds {
  StepBounds steps;
  RampLimits ramps;
};

// The uncertainty set of one load's demand trajectories, resolved into its
// tightest continuous piecewise affine envelopes plus the merged breakpoint
// grid and the per-segment constants consumed by the LP builder.
struct DemandEnvelope {
  std::vector<PwaFunction> upper;  // per load, on the shared grid
  std::vector<PwaFunction> lower;
  std::vector<RampLimits> ramps;
  TimeGrid grid;

  // Derived constants. H[j][d] = upper_d(t_j) - lower_d(t_j) >= 0.
  std::vector<std::vector<double>> H;          // M x D
  std::vector<std::vector<double>> upper_sum;  // (M-1) x D endpoint sums of upper
  std::vector<std::vector<double>> lower_sum;  // (M-1) x D
  std::vector<std::vector<double>> ramp_hi;    // (M-1) x D per-segment max rates
  std::vector<std::vector<double>> ramp_lo;    // (M-1) x D per-segment min rates

  std::size_t num_loads() const { return upper.size(); }
  std::size_t num_breakpoints() const { return grid.size(); }
  double horizon() const { return grid.horizon(); }
};

// Pointwise largest trajectory compatible with the step bounds and ramp
// limits. Throws InfeasibleUncertaintyError when a step transition cannot be
// connected within the limits.
PwaFunction build_upper_envelope(const StepBounds& b, const RampLimits& r);

// Pointwise smallest trajectory; mirror of build_upper_envelope.
PwaFunction build_lower_envelope(const StepBounds& b, const RampLimits& r);

// Builds every load's envelopes, merges all breakpoints, resamples onto the
// shared grid and derives the per-segment constants.
DemandEnvelope build_envelope_set(const std::vector<LoadBounds>& loads);

struct MembershipViolation {
  enum class Kind { above_upper, below_lower, ramp_up, ramp_down };
  Kind kind;
  std::size_t load;
  double time;    // for ramp violations, the left end of the segment
  double amount;  // positive excess (MW or MW/h)
};

struct MembershipReport {
  bool ok = true;
  std::vector<MembershipViolation> violations;
  std::string describe() const;
};

// Checks that each trajectory stays within [lower_d, upper_d] and that every
// segment slope lies within the load's ramp limits, all up to tol.
MembershipReport validate_membership(const DemandEnvelope& env,
                                     const std::vector<PwaFunction>& traj,
                                     double tol);

}  // namespace ctsched
