#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ctsched {

// Maps the named unknowns of the scheduling LPs onto columns:
// alpha (G*D, row-major), beta (M vectors of length G), per-load epigraph
// variables, then any trailing extras (the master bound or the scenario
// worst-case variable).
struct VariableLayout {
  std::size_t G = 0;
  std::size_t D = 0;
  std::size_t M = 0;
  std::size_t eta_count = 0;
  std::size_t extra_count = 0;

  std::size_t alpha_col(std::size_t g, std::size_t d) const { return g * D + d; }
  std::size_t beta_col(std::size_t j, std::size_t g) const {
    return G * D + j * G + g;
  }
  std::size_t eta_col(std::size_t d) const { return G * D + G * M + d; }
  std::size_t extra_col(std::size_t i) const {
    return G * D + G * M + eta_count + i;
  }
  std::size_t num_cols() const {
    return G * D + G * M + eta_count + extra_count;
  }
};

// Dense linear program: minimize objective . x subject to
// ineq[r] . x <= ineq_rhs[r] and eq[r] . x = eq_rhs[r], all variables free.
// Sign restrictions are expressed as inequality rows.
struct LpProblem {
  std::size_t num_cols = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> ineq;
  std::vector<double> ineq_rhs;
  std::vector<std::vector<double>> eq;
  std::vector<double> eq_rhs;
  VariableLayout layout;

  LpProblem() = default;
  explicit LpProblem(std::size_t cols)
      : num_cols(cols), objective(cols, 0.0) {}

  void add_ineq(std::vector<double> row, double rhs) {
    if (row.size() != num_cols) {
      throw std::invalid_argument("LpProblem::add_ineq: row width mismatch");
    }
    ineq.push_back(std::move(row));
    ineq_rhs.push_back(rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    if (row.size() != num_cols) {
      throw std::invalid_argument("LpProblem::add_eq: row width mismatch");
    }
    eq.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }
  std::size_t num_rows() const { return ineq.size() + eq.size(); }
};

}  // namespace ctsched
