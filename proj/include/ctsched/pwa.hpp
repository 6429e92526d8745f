#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctsched {

// Default tolerance for collapsing nearly coincident breakpoints on a
// horizon of length T.
inline double breakpoint_tolerance(double horizon) { return 1e-9 * horizon; }

// Continuous piecewise affine scalar function of time on [0, T], identified
// by its strictly increasing breakpoints and the function values there.
// Values between adjacent breakpoints are the linear interpolant; values at
// stored breakpoints are returned exactly.
class PwaFunction {
 public:
  PwaFunction(std::vector<double> breakpoints, std::vector<double> values);

  double eval(double t) const;

  // Evaluates at a non-decreasing sequence of time points in one sweep.
  std::vector<double> eval_sorted(std::span<const double> ts) const;

  // Exact integral over [a, b] (trapezoid per segment).
  double integrate(double a, double b) const;

  double slope(std::size_t segment) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return breakpoints_.size(); }
  double domain_end() const { return breakpoints_.back(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

// Breakpoint grid 0 = t_1 < ... < t_M = T with per-segment widths.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  // 0-based index of the segment containing t; segments are left-closed,
  // right-open, except that t = T maps to the last segment.
  std::size_t segment_index(double t) const;

  // Position of t within its segment, in [0, 1]; exactly 1 at t = T.
  double gamma(double t) const;

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& deltas() const { return deltas_; }
  std::size_t size() const { return points_.size(); }
  std::size_t segments() const { return points_.size() - 1; }
  double horizon() const { return points_.back(); }

 private:
  std::vector<double> points_;
  std::vector<double> deltas_;
};

// Sorted union of several point sets with points closer than tol collapsed
// onto the first point of each cluster. The smallest and largest inputs are
// preserved exactly.
std::vector<double> merge_points(const std::vector<std::vector<double>>& sets,
                                 double tol);

// Merged grid of all breakpoints of the given functions. All functions must
// share the domain [0, T].
TimeGrid merge_breakpoints(const std::vector<PwaFunction>& fs, double tol);

// Rewrites f on a refined grid; the grid must contain every breakpoint of f
// within tol. The result is pointwise identical to f.
PwaFunction resample(const PwaFunction& f, const TimeGrid& grid, double tol);

}  // namespace ctsched
