#include "ctsched/cutting_plane.hpp"

#include <random>
#include <set>
#include <tuple>

#include "ctsched/errors.hpp"
#include "ctsched/simplex.hpp"

namespace ctsched {

std::optional<SeparationResult> separate_vertex(
    const std::vector<double>& alpha, const std::vector<double>& beta_j,
    const DemandEnvelope& env, const StackedInequalities& s, std::size_t j,
    std::size_t p, double tol) {
  const std::size_t n_load = env.num_loads();
  const std::size_t n_gen = beta_j.size();

  VertexSelector sel;
  sel.sigma.resize(n_load);
  double lhs = 0.0;
  for (std::size_t d = 0; d < n_load; ++d) {
    double v = s.B[p][d];
    for (std::size_t g = 0; g < n_gen; ++g) {
      v += s.A[p][g] * alpha[g * n_load + d];
    }
    sel.sigma[d] = (v >= 0.0) ? 1 : 0;
    lhs += v * (env.lower[d].values()[j] + (sel.sigma[d] ? env.H[j][d] : 0.0));
  }
  for (std::size_t g = 0; g < n_gen; ++g) {
    lhs += s.A[p][g] * beta_j[g];
  }
  double violation = lhs - s.a[p];
  if (violation <= tol) return std::nullopt;
  return SeparationResult{SeparationResult::Family::vertex, j, p,
                          std::move(sel), violation};
}

std::optional<SeparationResult> separate_ramp(
    const std::vector<double>& alpha, const std::vector<double>& beta_slope_j,
    const DemandEnvelope& env, const SystemModel& sys, std::size_t j,
    std::size_t g, RampBound bound, double tol) {
  const std::size_t n_load = env.num_loads();

  VertexSelector sel;
  sel.sigma.resize(n_load);
  double rate = beta_slope_j[g];
  for (std::size_t d = 0; d < n_load; ++d) {
    double a = alpha[g * n_load + d];
    bool pick_hi = (bound == RampBound::upper) ? (a >= 0.0) : (a < 0.0);
    sel.sigma[d] = pick_hi ? 1 : 0;
    rate += a * (pick_hi ? env.ramp_hi[j][d] : env.ramp_lo[j][d]);
  }
  double violation = (bound == RampBound::upper) ? rate - sys.ramp_up[g]
                                                 : sys.ramp_down[g] - rate;
  if (violation <= tol) return std::nullopt;
  auto family = (bound == RampBound::upper) ? SeparationResult::Family::ramp_upper
                                            : SeparationResult::Family::ramp_lower;
  return SeparationResult{family, j, g, std::move(sel), violation};
}

namespace {

std::uint64_t pack_sigma(const VertexSelector& sel) {
  std::uint64_t bits = 0;
  for (std::size_t d = 0; d < sel.size(); ++d) {
    bits = (bits << 1) | (sel.sigma[d] ? 1u : 0u);
  }
  return bits;
}

}  // namespace

RobustSolveResult solve_robust(const DemandEnvelope& env,
                               const SystemModel& sys, std::uint64_t seed,
                               double tol, std::size_t max_iter) {
  sys.validate();
  if (sys.num_loads != env.num_loads()) {
    throw std::invalid_argument("solve_robust: envelope/system load mismatch");
  }
  const std::size_t n_load = env.num_loads();
  const std::size_t n_gen = sys.num_generators();
  const std::size_t m = env.num_breakpoints();
  const std::size_t n_vert = std::size_t{1} << n_load;
  const std::size_t bound = n_vert * (3 * m - 2);
  if (max_iter == 0) max_iter = bound;

  std::mt19937_64 engine(seed);
  const std::size_t slice_index = static_cast<std::size_t>(engine() % n_vert);
  auto slice = VertexSelector::from_index(slice_index, n_load);

  const auto stacked = assemble(sys);
  LpProblem master = build_master_lp(env, sys, slice);
  const auto& lay = master.layout;

  SolveLog log;
  log.initial_slice = slice_index;

  // Rows already in the master, so a rediscovered cut cannot be added twice.
  using CutKey = std::tuple<int, std::size_t, std::size_t, std::uint64_t>;
  std::set<CutKey> present;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t p = 0; p < stacked.rows(); ++p) {
      present.insert({0, j, p, pack_sigma(slice)});
    }
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    for (std::size_t g = 0; g < n_gen; ++g) {
      present.insert({1, j, g, pack_sigma(slice)});
      present.insert({2, j, g, pack_sigma(slice)});
    }
  }

  std::vector<double> alpha(n_gen * n_load);
  std::vector<std::vector<double>> beta(m, std::vector<double>(n_gen));

  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    LpSolution sol = solve(master);
    if (sol.status == LpSolution::Status::infeasible) {
      throw ModelInfeasibleError(
          "master relaxation is infeasible: no decision rule satisfies the "
          "capacity, line, ramp, and balance constraints");
    }
    if (sol.status == LpSolution::Status::unbounded) {
      throw SolverFailureError("master relaxation reported unbounded");
    }

    for (std::size_t g = 0; g < n_gen; ++g) {
      for (std::size_t d = 0; d < n_load; ++d) {
        alpha[g * n_load + d] = sol.x[lay.alpha_col(g, d)];
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t g = 0; g < n_gen; ++g) {
        beta[j][g] = sol.x[lay.beta_col(j, g)];
      }
    }

    std::size_t cuts = 0;
    std::vector<double> beta_j(n_gen), slope_j(n_gen);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t g = 0; g < n_gen; ++g) beta_j[g] = beta[j][g];
      for (std::size_t p = 0; p < stacked.rows(); ++p) {
        auto cut = separate_vertex(alpha, beta_j, env, stacked, j, p, tol);
        if (!cut) continue;
        CutKey key{0, j, p, pack_sigma(cut->sigma)};
        if (!present.insert(key).second) continue;
        append_vertex_row(master, env, stacked, j, cut->sigma, p);
        ++cuts;
      }
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double inv_delta = 1.0 / env.grid.deltas()[j];
      for (std::size_t g = 0; g < n_gen; ++g) {
        slope_j[g] = (beta[j + 1][g] - beta[j][g]) * inv_delta;
      }
      for (std::size_t g = 0; g < n_gen; ++g) {
        for (RampBound b : {RampBound::upper, RampBound::lower}) {
          auto cut = separate_ramp(alpha, slope_j, env, sys, j, g, b, tol);
          if (!cut) continue;
          int fam = (b == RampBound::upper) ? 1 : 2;
          CutKey key{fam, j, g, pack_sigma(cut->sigma)};
          if (!present.insert(key).second) continue;
          append_ramp_row(master, env, sys, j, cut->sigma, g, b);
          ++cuts;
        }
      }
    }

    log.per_iteration.push_back({sol.objective, cuts});
    log.iterations = iter;
    if (cuts == 0) {
      log.objective = sol.objective;
      DecisionRule rule{n_gen, n_load, alpha, beta, env.grid, sol.objective};
      return RobustSolveResult{std::move(rule), std::move(log)};
    }
  }
  throw SolverFailureError(
      "cutting plane did not converge within the iteration limit");
}

}  // namespace ctsched
