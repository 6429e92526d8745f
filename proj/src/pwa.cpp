#include "ctsched/pwa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ctsched {

namespace {

void require_domain(double t, double horizon, const char* who) {
  if (!(t >= 0.0 && t <= horizon)) {
    throw std::domain_error(std::string(who) + ": time " + std::to_string(t) +
                            " outside [0, " + std::to_string(horizon) + "]");
  }
}

}  // namespace

PwaFunction::PwaFunction(std::vector<double> breakpoints,
                         std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() != values_.size()) {
    throw std::invalid_argument("PwaFunction: breakpoint/value length mismatch");
  }
  if (breakpoints_.size() < 2) {
    throw std::invalid_argument("PwaFunction: need at least two breakpoints");
  }
  if (breakpoints_.front() != 0.0) {
    throw std::invalid_argument("PwaFunction: domain must start at 0");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw std::invalid_argument("PwaFunction: breakpoints not strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("PwaFunction: non-finite value");
    }
  }
}

double PwaFunction::eval(double t) const {
  require_domain(t, breakpoints_.back(), "PwaFunction::eval");
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it != breakpoints_.end() && *it == t) {
    return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }
  std::size_t hi = static_cast<std::size_t>(it - breakpoints_.begin());
  std::size_t lo = hi - 1;
  double u = (t - breakpoints_[lo]) / (breakpoints_[hi] - breakpoints_[lo]);
  return values_[lo] + u * (values_[hi] - values_[lo]);
}

std::vector<double> PwaFunction::eval_sorted(std::span<const double> ts) const {
  std::vector<double> out;
  out.reserve(ts.size());
  std::size_t seg = 0;
  const std::size_t last = breakpoints_.size() - 2;
  for (double t : ts) {
    require_domain(t, breakpoints_.back(), "PwaFunction::eval_sorted");
    while (seg < last && t >= breakpoints_[seg + 1]) ++seg;
    if (t == breakpoints_[seg]) {
      out.push_back(values_[seg]);
    } else if (t == breakpoints_[seg + 1]) {
      out.push_back(values_[seg + 1]);
    } else {
      double u = (t - breakpoints_[seg]) / (breakpoints_[seg + 1] - breakpoints_[seg]);
      out.push_back(values_[seg] + u * (values_[seg + 1] - values_[seg]));
    }
  }
  return out;
}

double PwaFunction::integrate(double a, double b) const {
  const double horizon = breakpoints_.back();
  require_domain(a, horizon, "PwaFunction::integrate");
  require_domain(b, horizon, "PwaFunction::integrate");
  if (a > b) {
    throw std::domain_error("PwaFunction::integrate: reversed interval");
  }
  if (a == b) return 0.0;
  double total = 0.0;
  double left_t = a;
  double left_v = eval(a);
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), a);
  for (; it != breakpoints_.end() && *it < b; ++it) {
    std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
    total += 0.5 * (left_v + values_[i]) * (*it - left_t);
    left_t = *it;
    left_v = values_[i];
  }
  total += 0.5 * (left_v + eval(b)) * (b - left_t);
  return total;
}

double PwaFunction::slope(std::size_t segment) const {
  if (segment + 1 >= breakpoints_.size()) {
    throw std::out_of_range("PwaFunction::slope: segment index");
  }
  return (values_[segment + 1] - values_[segment]) /
         (breakpoints_[segment + 1] - breakpoints_[segment]);
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("TimeGrid: need at least two points");
  }
  if (points_.front() != 0.0) {
    throw std::invalid_argument("TimeGrid: first point must be 0");
  }
  deltas_.resize(points_.size() - 1);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    deltas_[i] = points_[i + 1] - points_[i];
    if (!(deltas_[i] > 0.0)) {
      throw std::invalid_argument("TimeGrid: points not strictly increasing");
    }
  }
}

std::size_t TimeGrid::segment_index(double t) const {
  require_domain(t, points_.back(), "TimeGrid::segment_index");
  if (t == points_.back()) return points_.size() - 2;
  auto it = std::upper_bound(points_.begin(), points_.end(), t);
  return static_cast<std::size_t>(it - points_.begin()) - 1;
}

double TimeGrid::gamma(double t) const {
  require_domain(t, points_.back(), "TimeGrid::gamma");
  if (t == points_.back()) return 1.0;
  std::size_t k = segment_index(t);
  return (t - points_[k]) / deltas_[k];
}

std::vector<double> merge_points(const std::vector<std::vector<double>>& sets,
                                 double tol) {
  if (sets.empty()) {
    throw std::domain_error("merge_points: empty input");
  }
  std::vector<double> all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  if (all.empty()) {
    throw std::domain_error("merge_points: no points");
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  out.push_back(all.front());
  for (double p : all) {
    if (p - out.back() > tol) out.push_back(p);
  }
  // Keep the true right endpoint even if a near-duplicate absorbed it.
  if (out.back() != all.back() && all.back() - out.back() <= tol) {
    out.back() = all.back();
  }
  return out;
}

TimeGrid merge_breakpoints(const std::vector<PwaFunction>& fs, double tol) {
  if (fs.empty()) {
    throw std::domain_error("merge_breakpoints: empty function list");
  }
  const double horizon = fs.front().domain_end();
  std::vector<std::vector<double>> sets;
  sets.reserve(fs.size());
  for (const auto& f : fs) {
    if (std::abs(f.domain_end() - horizon) > tol) {
      throw std::domain_error("merge_breakpoints: functions do not share a domain");
    }
    sets.push_back(f.breakpoints());
  }
  auto merged = merge_points(sets, tol);
  merged.back() = horizon;
  return TimeGrid(std::move(merged));
}

PwaFunction resample(const PwaFunction& f, const TimeGrid& grid, double tol) {
  const auto& pts = grid.points();
  for (double b : f.breakpoints()) {
    auto it = std::lower_bound(pts.begin(), pts.end(), b - tol);
    if (it == pts.end() || std::abs(*it - b) > tol) {
      throw std::domain_error("resample: grid is missing a breakpoint of f");
    }
  }
  const double horizon = f.domain_end();
  if (std::abs(grid.horizon() - horizon) > tol) {
    throw std::domain_error("resample: grid horizon differs from f");
  }
  std::vector<double> values;
  values.reserve(pts.size());
  for (double p : pts) {
    values.push_back(f.eval(std::clamp(p, 0.0, horizon)));
  }
  return PwaFunction(pts, std::move(values));
}

}  // namespace ctsched
