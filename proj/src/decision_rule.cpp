#include "ctsched/decision_rule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctsched {

void DecisionRule::validate() const {
  if (num_generators == 0) {
    throw std::invalid_argument("DecisionRule: no generators");
  }
  if (alpha.size() != num_generators * num_loads) {
    throw std::invalid_argument("DecisionRule: alpha size mismatch");
  }
  if (beta.size() != grid.size()) {
    throw std::invalid_argument("DecisionRule: need one beta vector per grid point");
  }
  for (const auto& b : beta) {
    if (b.size() != num_generators) {
      throw std::invalid_argument("DecisionRule: beta vector length mismatch");
    }
  }
}

std::vector<double> DecisionRule::evaluate(double t,
                                           std::span<const double> demand_now) const {
  if (demand_now.size() != num_loads) {
    throw std::domain_error("DecisionRule::evaluate: wrong demand dimension");
  }
  const std::size_t k = grid.segment_index(t);
  const double g = grid.gamma(t);
  std::vector<double> out(num_generators, 0.0);
  for (std::size_t i = 0; i < num_generators; ++i) {
    double v = (1.0 - g) * beta[k][i] + g * beta[k + 1][i];
    const double* row = alpha.data() + i * num_loads;
    for (std::size_t d = 0; d < num_loads; ++d) v += row[d] * demand_now[d];
    out[i] = v;
  }
  return out;
}

std::vector<double> DecisionRule::beta_slope(std::size_t segment) const {
  if (segment + 1 >= beta.size()) {
    throw std::out_of_range("DecisionRule::beta_slope: segment index");
  }
  const double delta = grid.deltas()[segment];
  std::vector<double> g(num_generators);
  for (std::size_t i = 0; i < num_generators; ++i) {
    g[i] = (beta[segment + 1][i] - beta[segment][i]) / delta;
  }
  return g;
}

std::vector<PwaFunction> replay(const DecisionRule& rule,
                                const std::vector<PwaFunction>& traj) {
  if (traj.size() != rule.num_loads) {
    throw std::domain_error("replay: wrong number of demand trajectories");
  }
  const double tol = breakpoint_tolerance(rule.grid.horizon());
  std::vector<std::vector<double>> sets;
  sets.push_back(rule.grid.points());
  for (const auto& f : traj) {
    if (std::abs(f.domain_end() - rule.grid.horizon()) > tol) {
      throw std::domain_error("replay: trajectory horizon differs from rule grid");
    }
    sets.push_back(f.breakpoints());
  }
  auto merged = merge_points(sets, tol);
  merged.back() = rule.grid.horizon();

  std::vector<double> demand(rule.num_loads);
  std::vector<std::vector<double>> values(rule.num_generators);
  for (auto& v : values) v.reserve(merged.size());
  for (double t : merged) {
    for (std::size_t d = 0; d < rule.num_loads; ++d) {
      demand[d] = traj[d].eval(std::min(t, traj[d].domain_end()));
    }
    auto x = rule.evaluate(t, demand);
    for (std::size_t g = 0; g < rule.num_generators; ++g) {
      values[g].push_back(x[g]);
    }
  }
  std::vector<PwaFunction> out;
  out.reserve(rule.num_generators);
  for (std::size_t g = 0; g < rule.num_generators; ++g) {
    out.emplace_back(merged, std::move(values[g]));
  }
  return out;
}

}  // namespace ctsched
