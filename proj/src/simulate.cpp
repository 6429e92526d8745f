#include "ctsched/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ctsched/lp_builder.hpp"

namespace ctsched {

std::vector<PwaFunction> sample_on_grid(const DemandEnvelope& env,
                                        const std::vector<double>& grid_points,
                                        Rng& rng) {
  if (grid_points.size() < 2) {
    throw std::invalid_argument("sample_on_grid: need at least two points");
  }
  const std::size_t n = grid_points.size();
  std::vector<PwaFunction> out;
  out.reserve(env.num_loads());
  for (std::size_t d = 0; d < env.num_loads(); ++d) {
    auto hi = env.upper[d].eval_sorted(grid_points);
    auto lo = env.lower[d].eval_sorted(grid_points);
    const double r_up = env.ramps[d].up;
    const double r_dn = env.ramps[d].down;
    std::vector<double> vals(n);
    vals[0] = rng.uniform(lo[0], hi[0]);
    for (std::size_t k = 1; k < n; ++k) {
      double dt = grid_points[k] - grid_points[k - 1];
      double floor_v = std::max(lo[k], vals[k - 1] + r_dn * dt);
      double cap_v = std::min(hi[k], vals[k - 1] + r_up * dt);
      if (floor_v > cap_v + 1e-9 * (1.0 + std::abs(cap_v))) {
        throw std::logic_error(
            "sample_on_grid: empty sampling interval; envelope invariant broken");
      }
      vals[k] = rng.uniform(floor_v, std::max(floor_v, cap_v));
    }
    out.emplace_back(grid_points, std::move(vals));
  }
  return out;
}

std::vector<PwaFunction> sample_trajectory(const DemandEnvelope& env,
                                           std::size_t points_per_horizon,
                                           std::uint64_t seed) {
  if (points_per_horizon < 2) {
    throw std::invalid_argument("sample_trajectory: need at least two points");
  }
  const double horizon = env.horizon();
  std::vector<double> uniform(points_per_horizon);
  for (std::size_t i = 0; i < points_per_horizon; ++i) {
    uniform[i] = horizon * static_cast<double>(i) /
                 static_cast<double>(points_per_horizon - 1);
  }
  uniform.front() = 0.0;
  uniform.back() = horizon;
  auto merged = merge_points({uniform, env.grid.points()},
                             breakpoint_tolerance(horizon));
  merged.back() = horizon;
  Rng rng(seed);
  return sample_on_grid(env, merged, rng);
}

FeasibilityReport audit(const std::vector<PwaFunction>& outputs,
                        const std::vector<PwaFunction>& traj,
                        const SystemModel& sys, double tol) {
  sys.validate();
  const std::size_t n_gen = sys.num_generators();
  const std::size_t n_load = sys.num_loads;
  const std::size_t n_line = sys.num_lines();
  if (outputs.size() != n_gen) {
    throw std::domain_error("audit: wrong number of output trajectories");
  }
  if (traj.size() != n_load) {
    throw std::domain_error("audit: wrong number of demand trajectories");
  }
  const double horizon = outputs.front().domain_end();
  const double ttol = breakpoint_tolerance(horizon);
  std::vector<std::vector<double>> sets;
  for (const auto& f : outputs) {
    if (std::abs(f.domain_end() - horizon) > ttol) {
      throw std::domain_error("audit: trajectories do not share a horizon");
    }
    sets.push_back(f.breakpoints());
  }
  for (const auto& f : traj) {
    if (std::abs(f.domain_end() - horizon) > ttol) {
      throw std::domain_error("audit: trajectories do not share a horizon");
    }
    sets.push_back(f.breakpoints());
  }
  auto grid = merge_points(sets, ttol);
  grid.back() = horizon;

  std::vector<std::vector<double>> x(n_gen), xi(n_load);
  for (std::size_t g = 0; g < n_gen; ++g) x[g] = outputs[g].eval_sorted(grid);
  for (std::size_t d = 0; d < n_load; ++d) xi[d] = traj[d].eval_sorted(grid);

  FeasibilityReport rep;
  auto record = [tol](FeasibilityReport::Entry& e, double violation, double t) {
    if (violation <= tol) return;
    ++e.count;
    if (violation > e.max_violation) {
      e.max_violation = violation;
      e.at_time = t;
    }
  };

  for (std::size_t k = 0; k < grid.size(); ++k) {
    double t = grid[k];
    double sum_x = 0.0, sum_xi = 0.0;
    for (std::size_t g = 0; g < n_gen; ++g) {
      double v = x[g][k];
      sum_x += v;
      record(rep.capacity, v - sys.x_max[g], t);
      record(rep.capacity, sys.x_min[g] - v, t);
    }
    for (std::size_t d = 0; d < n_load; ++d) sum_xi += xi[d][k];
    for (std::size_t l = 0; l < n_line; ++l) {
      double flow = 0.0;
      for (std::size_t g = 0; g < n_gen; ++g) flow += sys.ptdf_gen[l][g] * x[g][k];
      for (std::size_t d = 0; d < n_load; ++d) flow += sys.ptdf_load[l][d] * xi[d][k];
      record(rep.line, std::abs(flow) - sys.line_cap[l], t);
    }
    record(rep.balance, std::abs(sum_x - sum_xi), t);
  }
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    double dt = grid[k + 1] - grid[k];
    for (std::size_t g = 0; g < n_gen; ++g) {
      double rate = (x[g][k + 1] - x[g][k]) / dt;
      record(rep.ramp, rate - sys.ramp_up[g], grid[k]);
      record(rep.ramp, sys.ramp_down[g] - rate, grid[k]);
    }
  }
  return rep;
}

double realized_cost(const DecisionRule& rule,
                     const std::vector<PwaFunction>& traj,
                     const std::vector<double>& cost) {
  auto outputs = replay(rule, traj);
  double total = 0.0;
  for (std::size_t g = 0; g < outputs.size(); ++g) {
    total += cost[g] * outputs[g].integrate(0.0, outputs[g].domain_end());
  }
  return total;
}

double worst_case_cost(const DecisionRule& rule, const DemandEnvelope& env,
                       const std::vector<double>& cost) {
  const auto& rp = rule.grid.points();
  const auto& ep = env.grid.points();
  if (rp.size() != ep.size()) {
    throw std::domain_error("worst_case_cost: rule grid does not match envelope");
  }
  const double tol = breakpoint_tolerance(env.horizon());
  for (std::size_t i = 0; i < rp.size(); ++i) {
    if (std::abs(rp[i] - ep[i]) > tol) {
      throw std::domain_error("worst_case_cost: rule grid does not match envelope");
    }
  }
  auto terms = objective_coefficients(env, cost);
  return terms.evaluate(rule.alpha, rule.beta);
}

}  // namespace ctsched
