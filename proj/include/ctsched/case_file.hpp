#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctsched/envelope.hpp"
#include "ctsched/system_model.hpp"

namespace ctsched {

struct RunParams {
  double tol = 1e-7;        // cutting-plane separation tolerance
  double audit_tol = 1e-6;  // simulation audit tolerance
  std::uint64_t seed = 0;
  std::size_t points_per_horizon = 2401;
  std::size_t max_iter = 0;  // 0 = use the theoretical bound
  std::size_t n_traj = 10;
  std::size_t n_scenarios = 30;
};

struct CaseFile {
  double horizon = 0.0;
  std::size_t n_points = 0;  // N
  SystemModel system;
  std::vector<std::string> generator_names;
  std::vector<std::string> line_names;
  std::vector<std::string> load_names;
  std::vector<LoadBounds> demand;
  RunParams run;
};

// Loads and validates a JSON case file; throws CaseFormatError with the
// offending field in the message.
CaseFile load_case_file(const std::string& path);

}  // namespace ctsched
