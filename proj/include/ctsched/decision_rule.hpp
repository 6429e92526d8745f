#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ctsched/pwa.hpp"

namespace ctsched {

// Time-interpolated affine decision rule: output(t) = alpha * demand(t)
// + (1 - gamma(t)) * beta[k(t)] + gamma(t) * beta[k(t)+1]. The output at
// time t depends on the demand trajectory only through its current value,
// which is what makes the rule non-anticipative.
struct DecisionRule {
  std::size_t num_generators = 0;
  std::size_t num_loads = 0;
  std::vector<double> alpha;              // G x D, row-major
  std::vector<std::vector<double>> beta;  // M vectors of length G
  TimeGrid grid;
  double objective = std::numeric_limits<double>::quiet_NaN();

  double alpha_at(std::size_t g, std::size_t d) const {
    return alpha[g * num_loads + d];
  }

  void validate() const;

  // Power outputs at time t given the current demand vector.
  std::vector<double> evaluate(double t, std::span<const double> demand_now) const;

  // Slope of beta on segment j: (beta[j+1] - beta[j]) / delta_j.
  std::vector<double> beta_slope(std::size_t segment) const;
};

// Output trajectories for a whole demand trajectory, evaluated on the merged
// grid of the trajectory's breakpoints and the rule's grid. Agrees with
// evaluate() at every time point.
std::vector<PwaFunction> replay(const DecisionRule& rule,
                                const std::vector<PwaFunction>& traj);

}  // namespace ctsched
