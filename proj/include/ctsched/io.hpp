#pragma once

#include <string>
#include <vector>

#include "ctsched/decision_rule.hpp"
#include "ctsched/lp_problem.hpp"

namespace ctsched {

// Fixed 12-significant-digit formatting for reproducible golden files.
std::string format_number(double v);

// CSV with header "t,<name_1>,...", one row per time point.
void write_series_csv(const std::string& path,
                      const std::vector<std::string>& names,
                      const std::vector<double>& times,
                      const std::vector<std::vector<double>>& columns);

// Flat text record of a decision rule: grid, alpha (row-major), beta per
// breakpoint, objective.
void write_rule(const std::string& path, const DecisionRule& rule);
DecisionRule read_rule(const std::string& path);

// CPLEX LP text format, for cross-checking against external solvers.
void write_lp_text(const LpProblem& lp, const std::string& path);

}  // namespace ctsched
