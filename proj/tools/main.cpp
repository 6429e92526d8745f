#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctsched/case_file.hpp"
#include "ctsched/cutting_plane.hpp"
#include "ctsched/envelope.hpp"
#include "ctsched/errors.hpp"
#include "ctsched/io.hpp"
#include "ctsched/lp_builder.hpp"
#include "ctsched/simplex.hpp"
#include "ctsched/simulate.hpp"

namespace fs = std::filesystem;
using namespace ctsched;

namespace {

struct CommonArgs {
  std::string case_path;
  std::string out_dir = "out";
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_tol = false;
  double tol = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--case", args.case_path, "case file (JSON)")->required();
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "random seed")
      ->each([&](const std::string&) { args.has_seed = true; });
  cmd->add_option("--tol", args.tol, "tolerance override")
      ->each([&](const std::string&) { args.has_tol = true; });
}

CaseFile load_with_overrides(const CommonArgs& args) {
  CaseFile cf = load_case_file(args.case_path);
  if (args.has_seed) cf.run.seed = args.seed;
  return cf;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Step series are written with both endpoints of every interval so plots
// show the flat levels.
void write_step_csv(const std::string& path, const StepBounds& steps) {
  auto out = open_text(path);
  out << "t,upper,lower\n";
  for (std::size_t i = 0; i + 1 < steps.grid.size(); ++i) {
    out << format_number(steps.grid[i]) << "," << format_number(steps.upper[i])
        << "," << format_number(steps.lower[i]) << "\n";
    out << format_number(steps.grid[i + 1]) << ","
        << format_number(steps.upper[i]) << "," << format_number(steps.lower[i])
        << "\n";
  }
}

int cmd_envelope(const CommonArgs& args) {
  CaseFile cf = load_with_overrides(args);
  fs::create_directories(args.out_dir);
  DemandEnvelope env = build_envelope_set(cf.demand);

  for (std::size_t d = 0; d < cf.demand.size(); ++d) {
    write_step_csv(join_path(args.out_dir, "step_" + cf.load_names[d] + ".csv"),
                   cf.demand[d].steps);
    write_series_csv(
        join_path(args.out_dir, "envelope_" + cf.load_names[d] + ".csv"),
        {"upper", "lower"}, env.grid.points(),
        {env.upper[d].values(), env.lower[d].values()});
  }
  const std::size_t n_load = cf.demand.size();
  const std::size_t bound = 2 * n_load * (cf.n_points - 2) + cf.n_points;
  std::cout << "loads " << n_load << "\nN " << cf.n_points << "\nM "
            << env.num_breakpoints() << "\nbound " << bound << "\n";
  return 0;
}

int cmd_solve(const CommonArgs& args, std::size_t max_iter_flag,
              const std::string& export_lp) {
  CaseFile cf = load_with_overrides(args);
  if (args.has_tol) cf.run.tol = args.tol;
  if (max_iter_flag > 0) cf.run.max_iter = max_iter_flag;
  fs::create_directories(args.out_dir);
  DemandEnvelope env = build_envelope_set(cf.demand);

  if (!export_lp.empty()) {
    write_lp_text(build_full_lp(env, cf.system), export_lp);
  }

  auto result = solve_robust(env, cf.system, cf.run.seed, cf.run.tol,
                             cf.run.max_iter);
  write_rule(join_path(args.out_dir, "rule.txt"), result.rule);
  {
    auto log = open_text(join_path(args.out_dir, "iterations.log"));
    log << "slice " << result.log.initial_slice << "\n";
    for (std::size_t i = 0; i < result.log.per_iteration.size(); ++i) {
      log << "iter " << (i + 1) << " objective "
          << format_number(result.log.per_iteration[i].master_objective)
          << " cuts " << result.log.per_iteration[i].cuts_added << "\n";
    }
  }
  std::cout << "objective " << format_number(result.log.objective)
            << "\niterations " << result.log.iterations << "\n";
  return 0;
}

int cmd_solve_scenario(const CommonArgs& args, std::size_t n_scen_flag,
                       bool has_n_scen) {
  CaseFile cf = load_with_overrides(args);
  if (has_n_scen) cf.run.n_scenarios = n_scen_flag;
  fs::create_directories(args.out_dir);
  DemandEnvelope env = build_envelope_set(cf.demand);

  std::vector<std::vector<PwaFunction>> scenarios;
  scenarios.push_back(env.upper);
  scenarios.push_back(env.lower);
  Rng rng(cf.run.seed);
  for (std::size_t s = 0; s < cf.run.n_scenarios; ++s) {
    scenarios.push_back(sample_on_grid(env, env.grid.points(), rng));
  }

  LpProblem lp = build_scenario_lp(scenarios, cf.system, env.grid);
  LpSolution sol = solve(lp);
  if (sol.status == LpSolution::Status::infeasible) {
    throw ModelInfeasibleError("scenario model is infeasible");
  }
  if (sol.status != LpSolution::Status::optimal) {
    throw SolverFailureError("scenario model reported unbounded");
  }
  const auto& lay = lp.layout;
  std::vector<double> alpha(lay.G * lay.D);
  std::vector<std::vector<double>> beta(lay.M, std::vector<double>(lay.G));
  for (std::size_t g = 0; g < lay.G; ++g) {
    for (std::size_t d = 0; d < lay.D; ++d) {
      alpha[g * lay.D + d] = sol.x[lay.alpha_col(g, d)];
    }
  }
  for (std::size_t j = 0; j < lay.M; ++j) {
    for (std::size_t g = 0; g < lay.G; ++g) {
      beta[j][g] = sol.x[lay.beta_col(j, g)];
    }
  }
  DecisionRule rule{lay.G, lay.D, std::move(alpha), std::move(beta), env.grid,
                    sol.objective};
  write_rule(join_path(args.out_dir, "rule_scenario.txt"), rule);
  std::cout << "objective " << format_number(sol.objective) << "\nscenarios "
            << scenarios.size() << "\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& rule_path,
                 std::size_t n_traj_flag, bool has_n_traj,
                 std::size_t points_flag, bool has_points) {
  CaseFile cf = load_with_overrides(args);
  if (args.has_tol) cf.run.audit_tol = args.tol;
  if (has_n_traj) cf.run.n_traj = n_traj_flag;
  if (has_points) cf.run.points_per_horizon = points_flag;
  fs::create_directories(args.out_dir);
  DemandEnvelope env = build_envelope_set(cf.demand);
  DecisionRule rule = read_rule(rule_path);

  if (rule.num_generators != cf.system.num_generators() ||
      rule.num_loads != cf.demand.size()) {
    throw ArtifactMismatchError("rule dimensions do not match the case");
  }
  const double tol = breakpoint_tolerance(env.horizon());
  if (rule.grid.size() != env.grid.size()) {
    throw ArtifactMismatchError("rule grid does not match the case envelope");
  }
  for (std::size_t j = 0; j < rule.grid.size(); ++j) {
    if (std::abs(rule.grid.points()[j] - env.grid.points()[j]) > tol) {
      throw ArtifactMismatchError("rule grid does not match the case envelope");
    }
  }

  auto audit_csv = open_text(join_path(args.out_dir, "audit.csv"));
  audit_csv << "trajectory,realized_cost,capacity_max,capacity_count,line_max,"
               "line_count,ramp_max,ramp_count,balance_max,balance_count\n";

  std::vector<double> costs;
  FeasibilityReport overall;
  auto fold = [](FeasibilityReport::Entry& into,
                 const FeasibilityReport::Entry& from) {
    into.count += from.count;
    if (from.max_violation > into.max_violation) {
      into.max_violation = from.max_violation;
      into.at_time = from.at_time;
    }
  };
  char name[64];
  for (std::size_t i = 0; i < cf.run.n_traj; ++i) {
    auto traj = sample_trajectory(env, cf.run.points_per_horizon,
                                  cf.run.seed + i);
    auto outputs = replay(rule, traj);
    auto rep = audit(outputs, traj, cf.system, cf.run.audit_tol);
    double cost = realized_cost(rule, traj, cf.system.cost);
    costs.push_back(cost);

    std::snprintf(name, sizeof(name), "trajectory_%03zu.csv", i);
    std::vector<std::vector<double>> cols;
    auto grid = outputs.front().breakpoints();
    for (std::size_t d = 0; d < traj.size(); ++d) {
      cols.push_back(traj[d].eval_sorted(grid));
    }
    write_series_csv(join_path(args.out_dir, name), cf.load_names, grid, cols);
    std::snprintf(name, sizeof(name), "output_%03zu.csv", i);
    cols.clear();
    for (const auto& f : outputs) cols.push_back(f.values());
    write_series_csv(join_path(args.out_dir, name), cf.generator_names, grid,
                     cols);

    audit_csv << i << "," << format_number(cost) << ","
              << format_number(rep.capacity.max_violation) << ","
              << rep.capacity.count << "," << format_number(rep.line.max_violation)
              << "," << rep.line.count << "," << format_number(rep.ramp.max_violation)
              << "," << rep.ramp.count << ","
              << format_number(rep.balance.max_violation) << ","
              << rep.balance.count << "\n";
    fold(overall.capacity, rep.capacity);
    fold(overall.line, rep.line);
    fold(overall.ramp, rep.ramp);
    fold(overall.balance, rep.balance);
  }

  auto summary = open_text(join_path(args.out_dir, "summary.txt"));
  summary << "n_traj " << cf.run.n_traj << "\n";
  if (!costs.empty()) {
    double lo = *std::min_element(costs.begin(), costs.end());
    double hi = *std::max_element(costs.begin(), costs.end());
    double mean = std::accumulate(costs.begin(), costs.end(), 0.0) /
                  static_cast<double>(costs.size());
    summary << "realized_cost_min " << format_number(lo) << "\n";
    summary << "realized_cost_mean " << format_number(mean) << "\n";
    summary << "realized_cost_max " << format_number(hi) << "\n";
  }
  summary << "worst_case_cost "
          << format_number(worst_case_cost(rule, env, cf.system.cost)) << "\n";
  summary << "max_violation_capacity "
          << format_number(overall.capacity.max_violation) << "\n";
  summary << "max_violation_line " << format_number(overall.line.max_violation)
          << "\n";
  summary << "max_violation_ramp " << format_number(overall.ramp.max_violation)
          << "\n";
  summary << "max_violation_balance "
          << format_number(overall.balance.max_violation) << "\n";
  std::cout << "trajectories " << cf.run.n_traj << "\nfeasible "
            << (overall.all_zero() ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust continuous-time generation scheduling toolkit"};
  app.require_subcommand(1);

  CommonArgs env_args, solve_args, scen_args, sim_args;
  std::size_t max_iter = 0, n_scenarios = 0, n_traj = 0, points = 0;
  bool has_n_scen = false, has_n_traj = false, has_points = false;
  std::string export_lp, rule_path;

  auto* envc = app.add_subcommand("envelope", "build and export the demand envelopes");
  add_common(envc, env_args);

  auto* solvec = app.add_subcommand("solve", "solve the robust model by cutting planes");
  add_common(solvec, solve_args);
  solvec->add_option("--max-iter", max_iter, "iteration cap (0 = bound)");
  solvec->add_option("--export-lp", export_lp, "write the fully enumerated LP");

  auto* scenc = app.add_subcommand("solve-scenario", "solve the scenario-based counterpart");
  add_common(scenc, scen_args);
  scenc->add_option("--n-scenarios", n_scenarios, "sampled scenarios beyond the envelopes")
      ->each([&](const std::string&) { has_n_scen = true; });

  auto* simc = app.add_subcommand("simulate", "sample trajectories, replay and audit a rule");
  add_common(simc, sim_args);
  simc->add_option("--rule", rule_path, "rule record to replay")->required();
  simc->add_option("--n-traj", n_traj, "number of trajectories")
      ->each([&](const std::string&) { has_n_traj = true; });
  simc->add_option("--points", points, "points per horizon")
      ->each([&](const std::string&) { has_points = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (envc->parsed()) return cmd_envelope(env_args);
    if (solvec->parsed()) return cmd_solve(solve_args, max_iter, export_lp);
    if (scenc->parsed()) return cmd_solve_scenario(scen_args, n_scenarios, has_n_scen);
    if (simc->parsed()) {
      return cmd_simulate(sim_args, rule_path, n_traj, has_n_traj, points,
                          has_points);
    }
  } catch (const CaseFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleUncertaintyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelInfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ArtifactMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
