#include "ctsched/case_file.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "ctsched/errors.hpp"

namespace ctsched {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw CaseFormatError(where + ": " + what);
}

const json& get(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "." + key, "missing field");
  return *it;
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  const json& v = get(obj, where, key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const std::string& where,
                      const std::string& key) {
  const json& v = get(obj, where, key);
  if (!v.is_number_unsigned()) fail(where + "." + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& obj, const std::string& where,
                       const std::string& key, const std::string& fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_array(const json& obj, const std::string& where,
                              const std::string& key, std::size_t expected) {
  const json& v = get(obj, where, key);
  if (!v.is_array()) fail(where + "." + key, "expected an array");
  if (expected != 0 && v.size() != expected) {
    fail(where + "." + key, "expected " + std::to_string(expected) +
                                " entries, found " + std::to_string(v.size()));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      fail(where + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> uniform_grid(double horizon, std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = horizon * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.front() = 0.0;
  grid.back() = horizon;
  return grid;
}

// The profile form scales a system demand profile S per load and pads it
// with a margin: the upper step is rho*S + margin, the lower step is the
// margin-padded min of the neighbouring upper levels and rho*S, and the ramp
// limits scale the extreme hourly profile changes.
std::vector<LoadBounds> demand_from_profile(const json& demand,
                                            const std::vector<double>& grid,
                                            std::vector<std::string>* names) {
  const std::size_t n_int = grid.size() - 1;
  auto profile = get_array(demand, "demand", "profile", n_int);
  double margin = demand.contains("margin")
                      ? get_number(demand, "demand", "margin")
                      : 5.0;
  const json& loads = get(demand, "demand", "loads");
  if (!loads.is_array() || loads.empty()) {
    fail("demand.loads", "expected a non-empty array");
  }
  double max_d = 0.0, min_d = 0.0;
  for (std::size_t i = 0; i + 1 < n_int; ++i) {
    max_d = std::max(max_d, profile[i + 1] - profile[i]);
    min_d = std::min(min_d, profile[i + 1] - profile[i]);
  }
  std::vector<LoadBounds> out;
  for (std::size_t d = 0; d < loads.size(); ++d) {
    const std::string where = "demand.loads[" + std::to_string(d) + "]";
    double rho = get_number(loads[d], where, "rho");
    names->push_back(get_string(loads[d], where, "name", "d" + std::to_string(d + 1)));
    std::vector<double> upper(n_int), lower(n_int);
    for (std::size_t i = 0; i < n_int; ++i) {
      upper[i] = rho * profile[i] + margin;
    }
    lower[0] = rho * profile[0] - margin;
    for (std::size_t i = 1; i < n_int; ++i) {
      double next = upper[std::min(i + 1, n_int - 1)];
      lower[i] = std::min({upper[i - 1], next, rho * profile[i]}) - margin;
    }
    LoadBounds lb;
    lb.steps.grid = grid;
    lb.steps.upper = std::move(upper);
    lb.steps.lower = std::move(lower);
    lb.ramps.up = rho * max_d;
    lb.ramps.down = rho * min_d;
    out.push_back(std::move(lb));
  }
  return out;
}

std::vector<LoadBounds> demand_from_steps(const json& demand,
                                          const std::vector<double>& grid,
                                          std::vector<std::string>* names) {
  const std::size_t n_int = grid.size() - 1;
  const json& loads = get(demand, "demand", "loads");
  if (!loads.is_array() || loads.empty()) {
    fail("demand.loads", "expected a non-empty array");
  }
  std::vector<LoadBounds> out;
  for (std::size_t d = 0; d < loads.size(); ++d) {
    const std::string where = "demand.loads[" + std::to_string(d) + "]";
    names->push_back(get_string(loads[d], where, "name", "d" + std::to_string(d + 1)));
    LoadBounds lb;
    lb.steps.grid = grid;
    lb.steps.upper = get_array(loads[d], where, "upper_steps", n_int);
    lb.steps.lower = get_array(loads[d], where, "lower_steps", n_int);
    lb.ramps.up = get_number(loads[d], where, "ramp_up");
    lb.ramps.down = get_number(loads[d], where, "ramp_down");
    if (lb.ramps.down > lb.ramps.up) {
      fail(where, "ramp_down exceeds ramp_up");
    }
    out.push_back(std::move(lb));
  }
  return out;
}

}  // namespace

CaseFile load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CaseFormatError("cannot open case file " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CaseFormatError(path + ": " + e.what());
  }

  CaseFile cf;
  if (!doc.is_object()) fail(path, "expected a JSON object");
  if (get_count(doc, "", "version") != 1) {
    fail("version", "unsupported case file version (expected 1)");
  }

  const json& horizon = get(doc, "", "horizon");
  cf.horizon = get_number(horizon, "horizon", "T");
  cf.n_points = get_count(horizon, "horizon", "N");
  if (!(cf.horizon > 0.0)) fail("horizon.T", "must be positive");
  if (cf.n_points < 2) fail("horizon.N", "must be at least 2");

  const json& system = get(doc, "", "system");
  const json& gens = get(system, "system", "generators");
  if (!gens.is_array() || gens.empty()) {
    fail("system.generators", "expected a non-empty array");
  }
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const std::string where = "system.generators[" + std::to_string(g) + "]";
    cf.generator_names.push_back(
        get_string(gens[g], where, "name", "g" + std::to_string(g + 1)));
    cf.system.cost.push_back(get_number(gens[g], where, "cost"));
    cf.system.x_min.push_back(get_number(gens[g], where, "x_min"));
    cf.system.x_max.push_back(get_number(gens[g], where, "x_max"));
    cf.system.ramp_up.push_back(get_number(gens[g], where, "ramp_up"));
    cf.system.ramp_down.push_back(get_number(gens[g], where, "ramp_down"));
  }

  auto grid = uniform_grid(cf.horizon, cf.n_points);
  const json& demand = get(doc, "", "demand");
  cf.demand = demand.contains("profile")
                  ? demand_from_profile(demand, grid, &cf.load_names)
                  : demand_from_steps(demand, grid, &cf.load_names);
  cf.system.num_loads = cf.demand.size();

  if (system.contains("lines")) {
    const json& lines = system.at("lines");
    if (!lines.is_array()) fail("system.lines", "expected an array");
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const std::string where = "system.lines[" + std::to_string(l) + "]";
      cf.line_names.push_back(
          get_string(lines[l], where, "name", "l" + std::to_string(l + 1)));
      cf.system.line_cap.push_back(get_number(lines[l], where, "capacity"));
      cf.system.ptdf_gen.push_back(
          get_array(lines[l], where, "ptdf_gen", cf.system.cost.size()));
      cf.system.ptdf_load.push_back(
          get_array(lines[l], where, "ptdf_load", cf.demand.size()));
    }
  }

  if (doc.contains("run")) {
    const json& run = doc.at("run");
    if (!run.is_object()) fail("run", "expected an object");
    if (run.contains("tol")) cf.run.tol = get_number(run, "run", "tol");
    if (run.contains("audit_tol")) {
      cf.run.audit_tol = get_number(run, "run", "audit_tol");
    }
    if (run.contains("seed")) cf.run.seed = get_count(run, "run", "seed");
    if (run.contains("points_per_horizon")) {
      cf.run.points_per_horizon = get_count(run, "run", "points_per_horizon");
    }
    if (run.contains("max_iter")) cf.run.max_iter = get_count(run, "run", "max_iter");
    if (run.contains("n_traj")) cf.run.n_traj = get_count(run, "run", "n_traj");
    if (run.contains("n_scenarios")) {
      cf.run.n_scenarios = get_count(run, "run", "n_scenarios");
    }
  }

  try {
    cf.system.validate();
    for (const auto& lb : cf.demand) lb.steps.validate();
  } catch (const std::invalid_argument& e) {
    throw CaseFormatError(path + ": " + e.what());
  }
  return cf;
}

}  // namespace ctsched
