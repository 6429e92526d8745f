#include "ctsched/lp_builder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctsched {

namespace {

std::size_t vertex_count(std::size_t dims) {
  if (dims >= 30) {
    throw std::invalid_argument("vertex enumeration limited to < 30 loads");
  }
  return std::size_t{1} << dims;
}

void check_consistent(const DemandEnvelope& env, const SystemModel& sys) {
  sys.validate();
  if (sys.num_loads != env.num_loads()) {
    throw std::invalid_argument("envelope and system disagree on the number of loads");
  }
}

// beta_coeff[j][g] aggregates 0.5 * delta_j * C_g over the segments touching
// breakpoint j, so that sum_j beta_coeff[j] . beta_j equals the integral of
// C . beta over the horizon.
std::vector<std::vector<double>> beta_cost_coeff(const TimeGrid& grid,
                                                 const std::vector<double>& cost) {
  const std::size_t m = grid.size();
  std::vector<std::vector<double>> coeff(m, std::vector<double>(cost.size(), 0.0));
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double half = 0.5 * grid.deltas()[j];
    for (std::size_t g = 0; g < cost.size(); ++g) {
      coeff[j][g] += half * cost[g];
      coeff[j + 1][g] += half * cost[g];
    }
  }
  return coeff;
}

}  // namespace

VertexSelector VertexSelector::from_index(std::size_t l, std::size_t dims) {
  if (l >= vertex_count(dims)) {
    throw std::out_of_range("VertexSelector: index out of range");
  }
  VertexSelector sel;
  sel.sigma.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    sel.sigma[d] = static_cast<std::uint8_t>((l >> (dims - 1 - d)) & 1u);
  }
  return sel;
}

double ObjectiveTerms::evaluate(
    const std::vector<double>& alpha,
    const std::vector<std::vector<double>>& beta) const {
  const std::size_t m = beta_coeff.size();
  const std::size_t n_gen = beta_coeff.empty() ? 0 : beta_coeff[0].size();
  const std::size_t n_load = upper_alpha.size();
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t g = 0; g < n_gen; ++g) {
      total += beta_coeff[j][g] * beta[j][g];
    }
  }
  for (std::size_t d = 0; d < n_load; ++d) {
    double hi = 0.0, lo = 0.0;
    for (std::size_t g = 0; g < n_gen; ++g) {
      hi += upper_alpha[d][g] * alpha[g * n_load + d];
      lo += lower_alpha[d][g] * alpha[g * n_load + d];
    }
    total += 0.5 * std::max(hi, lo);
  }
  return total;
}

ObjectiveTerms objective_coefficients(const DemandEnvelope& env,
                                      const std::vector<double>& cost) {
  const std::size_t m = env.num_breakpoints();
  const std::size_t n_load = env.num_loads();
  ObjectiveTerms terms;
  terms.beta_coeff = beta_cost_coeff(env.grid, cost);
  terms.upper_alpha.assign(n_load, std::vector<double>(cost.size(), 0.0));
  terms.lower_alpha.assign(n_load, std::vector<double>(cost.size(), 0.0));
  for (std::size_t d = 0; d < n_load; ++d) {
    double hi = 0.0, lo = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      hi += env.grid.deltas()[j] * env.upper_sum[j][d];
      lo += env.grid.deltas()[j] * env.lower_sum[j][d];
    }
    for (std::size_t g = 0; g < cost.size(); ++g) {
      terms.upper_alpha[d][g] = hi * cost[g];
      terms.lower_alpha[d][g] = lo * cost[g];
    }
  }
  return terms;
}

std::vector<double> vertex_demand(const DemandEnvelope& env, std::size_t j,
                                  const VertexSelector& sel) {
  const std::size_t n_load = env.num_loads();
  if (sel.size() != n_load) {
    throw std::invalid_argument("vertex_demand: selector dimension mismatch");
  }
  std::vector<double> v(n_load);
  for (std::size_t d = 0; d < n_load; ++d) {
    v[d] = env.lower[d].values()[j] + (sel.sigma[d] ? env.H[j][d] : 0.0);
  }
  return v;
}

std::vector<double> vertex_ramp(const DemandEnvelope& env, std::size_t j,
                                const VertexSelector& sel) {
  const std::size_t n_load = env.num_loads();
  if (sel.size() != n_load) {
    throw std::invalid_argument("vertex_ramp: selector dimension mismatch");
  }
  std::vector<double> v(n_load);
  for (std::size_t d = 0; d < n_load; ++d) {
    v[d] = env.ramp_lo[j][d] +
           (sel.sigma[d] ? env.ramp_hi[j][d] - env.ramp_lo[j][d] : 0.0);
  }
  return v;
}

void append_vertex_row(LpProblem& lp, const DemandEnvelope& env,
                       const StackedInequalities& s, std::size_t j,
                       const VertexSelector& sel, std::size_t p) {
  const auto& lay = lp.layout;
  auto vertex = vertex_demand(env, j, sel);
  std::vector<double> row(lp.num_cols, 0.0);
  double rhs = s.a[p];
  for (std::size_t g = 0; g < lay.G; ++g) {
    double apg = s.A[p][g];
    if (apg == 0.0) continue;
    for (std::size_t d = 0; d < lay.D; ++d) {
      row[lay.alpha_col(g, d)] = apg * vertex[d];
    }
    row[lay.beta_col(j, g)] = apg;
  }
  for (std::size_t d = 0; d < lay.D; ++d) {
    rhs -= s.B[p][d] * vertex[d];
  }
  lp.add_ineq(std::move(row), rhs);
}

void append_ramp_row(LpProblem& lp, const DemandEnvelope& env,
                     const SystemModel& sys, std::size_t j,
                     const VertexSelector& sel, std::size_t g, RampBound bound) {
  const auto& lay = lp.layout;
  auto ramp = vertex_ramp(env, j, sel);
  const double sgn = (bound == RampBound::upper) ? 1.0 : -1.0;
  const double inv_delta = 1.0 / env.grid.deltas()[j];
  std::vector<double> row(lp.num_cols, 0.0);
  for (std::size_t d = 0; d < lay.D; ++d) {
    row[lay.alpha_col(g, d)] = sgn * ramp[d];
  }
  row[lay.beta_col(j + 1, g)] = sgn * inv_delta;
  row[lay.beta_col(j, g)] = -sgn * inv_delta;
  double rhs = (bound == RampBound::upper) ? sys.ramp_up[g] : -sys.ramp_down[g];
  lp.add_ineq(std::move(row), rhs);
}

namespace {

void append_balance_equalities(LpProblem& lp) {
  const auto& lay = lp.layout;
  for (std::size_t d = 0; d < lay.D; ++d) {
    std::vector<double> row(lp.num_cols, 0.0);
    for (std::size_t g = 0; g < lay.G; ++g) row[lay.alpha_col(g, d)] = 1.0;
    lp.add_eq(std::move(row), 1.0);
  }
  for (std::size_t j = 0; j < lay.M; ++j) {
    std::vector<double> row(lp.num_cols, 0.0);
    for (std::size_t g = 0; g < lay.G; ++g) row[lay.beta_col(j, g)] = 1.0;
    lp.add_eq(std::move(row), 0.0);
  }
}

void append_epigraph_rows(LpProblem& lp, const ObjectiveTerms& terms) {
  const auto& lay = lp.layout;
  for (std::size_t d = 0; d < lay.D; ++d) {
    for (int side = 0; side < 2; ++side) {
      const auto& coeff = side == 0 ? terms.upper_alpha[d] : terms.lower_alpha[d];
      std::vector<double> row(lp.num_cols, 0.0);
      for (std::size_t g = 0; g < lay.G; ++g) {
        row[lay.alpha_col(g, d)] = coeff[g];
      }
      row[lay.eta_col(d)] = -1.0;
      lp.add_ineq(std::move(row), 0.0);
    }
  }
}

}  // namespace

LpProblem build_full_lp(const DemandEnvelope& env, const SystemModel& sys) {
  check_consistent(env, sys);
  const auto stacked = assemble(sys);
  const std::size_t m = env.num_breakpoints();
  const std::size_t n_load = env.num_loads();
  const std::size_t n_gen = sys.num_generators();
  const std::size_t n_vert = vertex_count(n_load);

  VariableLayout lay{n_gen, n_load, m, n_load, 0};
  LpProblem lp(lay.num_cols());
  lp.layout = lay;

  const auto terms = objective_coefficients(env, sys.cost);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t g = 0; g < n_gen; ++g) {
      lp.objective[lay.beta_col(j, g)] = terms.beta_coeff[j][g];
    }
  }
  for (std::size_t d = 0; d < n_load; ++d) {
    lp.objective[lay.eta_col(d)] = 0.5;
  }

  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < n_vert; ++l) {
      auto sel = VertexSelector::from_index(l, n_load);
      for (std::size_t p = 0; p < stacked.rows(); ++p) {
        append_vertex_row(lp, env, stacked, j, sel, p);
      }
    }
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    for (std::size_t l = 0; l < n_vert; ++l) {
      auto sel = VertexSelector::from_index(l, n_load);
      for (std::size_t g = 0; g < n_gen; ++g) {
        append_ramp_row(lp, env, sys, j, sel, g, RampBound::upper);
        append_ramp_row(lp, env, sys, j, sel, g, RampBound::lower);
      }
    }
  }
  append_epigraph_rows(lp, terms);
  append_balance_equalities(lp);
  return lp;
}

LpProblem build_master_lp(const DemandEnvelope& env, const SystemModel& sys,
                          const VertexSelector& slice) {
  check_consistent(env, sys);
  if (slice.size() != env.num_loads()) {
    throw std::invalid_argument("build_master_lp: selector dimension mismatch");
  }
  const auto stacked = assemble(sys);
  const std::size_t m = env.num_breakpoints();
  const std::size_t n_load = env.num_loads();
  const std::size_t n_gen = sys.num_generators();

  VariableLayout lay{n_gen, n_load, m, n_load, 1};
  LpProblem lp(lay.num_cols());
  lp.layout = lay;
  lp.objective[lay.extra_col(0)] = 1.0;

  const auto terms = objective_coefficients(env, sys.cost);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t p = 0; p < stacked.rows(); ++p) {
      append_vertex_row(lp, env, stacked, j, slice, p);
    }
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    for (std::size_t g = 0; g < n_gen; ++g) {
      append_ramp_row(lp, env, sys, j, slice, g, RampBound::upper);
      append_ramp_row(lp, env, sys, j, slice, g, RampBound::lower);
    }
  }
  append_epigraph_rows(lp, terms);

  // Cost bound: 0.5 sum_j delta_j C.(beta_j + beta_{j+1}) + 0.5 sum_d eta_d
  // <= eta, with eta >= 0 keeping the relaxation bounded.
  {
    std::vector<double> row(lp.num_cols, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t g = 0; g < n_gen; ++g) {
        row[lay.beta_col(j, g)] = terms.beta_coeff[j][g];
      }
    }
    for (std::size_t d = 0; d < n_load; ++d) row[lay.eta_col(d)] = 0.5;
    row[lay.extra_col(0)] = -1.0;
    lp.add_ineq(std::move(row), 0.0);
  }
  {
    std::vector<double> row(lp.num_cols, 0.0);
    row[lay.extra_col(0)] = -1.0;
    lp.add_ineq(std::move(row), 0.0);
  }
  append_balance_equalities(lp);
  return lp;
}

LpProblem build_scenario_lp(
    const std::vector<std::vector<PwaFunction>>& scenarios,
    const SystemModel& sys, const TimeGrid& grid) {
  sys.validate();
  if (scenarios.empty()) {
    throw std::invalid_argument("build_scenario_lp: no scenarios");
  }
  const auto stacked = assemble(sys);
  const std::size_t m = grid.size();
  const std::size_t n_load = sys.num_loads;
  const std::size_t n_gen = sys.num_generators();
  const double tol = breakpoint_tolerance(grid.horizon());

  // Scenario values on the shared grid; resampling rejects breakpoints that
  // are not grid points.
  std::vector<std::vector<std::vector<double>>> vals;  // s x d x j
  vals.reserve(scenarios.size());
  for (const auto& sc : scenarios) {
    if (sc.size() != n_load) {
      throw std::domain_error("build_scenario_lp: scenario load count mismatch");
    }
    std::vector<std::vector<double>> per_load;
    for (const auto& f : sc) {
      per_load.push_back(resample(f, grid, tol).values());
    }
    vals.push_back(std::move(per_load));
  }

  VariableLayout lay{n_gen, n_load, m, 0, 1};
  LpProblem lp(lay.num_cols());
  lp.layout = lay;
  lp.objective[lay.extra_col(0)] = 1.0;

  const auto beta_coeff = beta_cost_coeff(grid, sys.cost);

  for (std::size_t s = 0; s < vals.size(); ++s) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t p = 0; p < stacked.rows(); ++p) {
        std::vector<double> row(lp.num_cols, 0.0);
        double rhs = stacked.a[p];
        for (std::size_t g = 0; g < n_gen; ++g) {
          double apg = stacked.A[p][g];
          if (apg == 0.0) continue;
          for (std::size_t d = 0; d < n_load; ++d) {
            row[lay.alpha_col(g, d)] = apg * vals[s][d][j];
          }
          row[lay.beta_col(j, g)] = apg;
        }
        for (std::size_t d = 0; d < n_load; ++d) {
          rhs -= stacked.B[p][d] * vals[s][d][j];
        }
        lp.add_ineq(std::move(row), rhs);
      }
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double inv_delta = 1.0 / grid.deltas()[j];
      for (std::size_t g = 0; g < n_gen; ++g) {
        for (int side = 0; side < 2; ++side) {
          const double sgn = side == 0 ? 1.0 : -1.0;
          std::vector<double> row(lp.num_cols, 0.0);
          for (std::size_t d = 0; d < n_load; ++d) {
            double slope = (vals[s][d][j + 1] - vals[s][d][j]) * inv_delta;
            row[lay.alpha_col(g, d)] = sgn * slope;
          }
          row[lay.beta_col(j + 1, g)] = sgn * inv_delta;
          row[lay.beta_col(j, g)] = -sgn * inv_delta;
          double rhs = side == 0 ? sys.ramp_up[g] : -sys.ramp_down[g];
          lp.add_ineq(std::move(row), rhs);
        }
      }
    }
  }

  // Worst case over the scenario set: one bound variable above every
  // scenario's exact PWA cost.
  for (std::size_t s = 0; s < vals.size(); ++s) {
    std::vector<double> row(lp.num_cols, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t g = 0; g < n_gen; ++g) {
        row[lay.beta_col(j, g)] = beta_coeff[j][g];
      }
    }
    for (std::size_t d = 0; d < n_load; ++d) {
      double integral = 0.0;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        integral += 0.5 * grid.deltas()[j] * (vals[s][d][j] + vals[s][d][j + 1]);
      }
      for (std::size_t g = 0; g < n_gen; ++g) {
        row[lay.alpha_col(g, d)] += sys.cost[g] * integral;
      }
    }
    row[lay.extra_col(0)] = -1.0;
    lp.add_ineq(std::move(row), 0.0);
  }
  append_balance_equalities(lp);
  return lp;
}

}  // namespace ctsched
