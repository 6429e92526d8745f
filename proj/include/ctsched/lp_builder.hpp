#pragma once

#include <cstdint>
#include <vector>

#include "ctsched/envelope.hpp"
#include "ctsched/lp_problem.hpp"
#include "ctsched/pwa.hpp"
#include "ctsched/system_model.hpp"

namespace ctsched {

// Picks one vertex of a box [lo, lo + H]: entry d of the vertex is
// lo[d] + sigma[d] * H[d].
struct VertexSelector {
  std::vector<std::uint8_t> sigma;

  // Lexicographic enumeration: index 0 is all-zeros, the last index all-ones.
  static VertexSelector from_index(std::size_t l, std::size_t dims);
  std::size_t size() const { return sigma.size(); }
};

// Worst-case cost decomposition: the beta part is linear with coefficient
// beta_coeff[j][g] on beta_j[g]; each load contributes
// 0.5 * max(upper_alpha[d] . alpha_d, lower_alpha[d] . alpha_d).
struct ObjectiveTerms {
  std::vector<std::vector<double>> beta_coeff;   // M x G
  std::vector<std::vector<double>> upper_alpha;  // D x G
  std::vector<std::vector<double>> lower_alpha;  // D x G

  double evaluate(const std::vector<double>& alpha,
                  const std::vector<std::vector<double>>& beta) const;
};

ObjectiveTerms objective_coefficients(const DemandEnvelope& env,
                                      const std::vector<double>& cost);

// Extreme demand vector at breakpoint j: lower(t_j) + sigma o H_j.
std::vector<double> vertex_demand(const DemandEnvelope& env, std::size_t j,
                                  const VertexSelector& sel);

// Extreme demand ramp on segment j: r_lo_j + sigma o (r_hi_j - r_lo_j).
std::vector<double> vertex_ramp(const DemandEnvelope& env, std::size_t j,
                                const VertexSelector& sel);

// Scalar row p of the vertex inequality family at breakpoint j and vertex
// sigma, in the column layout: (A_p alpha + B_p) vertex + A_p beta_j <= a_p.
void append_vertex_row(LpProblem& lp, const DemandEnvelope& env,
                       const StackedInequalities& s, std::size_t j,
                       const VertexSelector& sel, std::size_t p);

enum class RampBound { upper, lower };

// Ramp row for generator g on segment j at ramp vertex sigma:
// alpha_g . vertex + (beta_{j+1,g} - beta_{j,g}) / delta_j <= ramp_up[g]
// (negated for the lower bound).
void append_ramp_row(LpProblem& lp, const DemandEnvelope& env,
                     const SystemModel& sys, std::size_t j,
                     const VertexSelector& sel, std::size_t g, RampBound bound);

// The fully enumerated LP over all 2^D vertices at every breakpoint and
// segment. Row order: vertex family (j, l, p), ramp family (j, l, g,
// upper/lower), epigraph rows (d, upper/lower); equalities: alpha column
// sums, then beta sums.
LpProblem build_full_lp(const DemandEnvelope& env, const SystemModel& sys);

// The initial cutting-plane relaxation: only the given vertex slice of both
// families, plus a non-negative bound variable placed above the cost.
LpProblem build_master_lp(const DemandEnvelope& env, const SystemModel& sys,
                          const VertexSelector& slice);

// Worst case over a finite scenario set (each scenario one PWA trajectory
// per load with breakpoints inside the grid).
LpProblem build_scenario_lp(
    const std::vector<std::vector<PwaFunction>>& scenarios,
    const SystemModel& sys, const TimeGrid& grid);

}  // namespace ctsched
