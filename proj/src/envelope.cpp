#include "ctsched/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ctsched/errors.hpp"

namespace ctsched {

namespace {

double abs_scale(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

struct Knot {
  double t;
  double v;
};

// Assembles a PWA function from unsorted knots, collapsing near-duplicate
// times. Conflicting values at a collapsed time mean the step transition
// cannot be realized within the ramp limits.
PwaFunction assemble_knots(std::vector<Knot> knots, double time_tol,
                           double value_tol, const char* who) {
  std::stable_sort(knots.begin(), knots.end(),
                   [](const Knot& a, const Knot& b) { return a.t < b.t; });
  std::vector<double> pts, vals;
  pts.reserve(knots.size());
  vals.reserve(knots.size());
  for (const Knot& k : knots) {
    if (!pts.empty() && k.t - pts.back() <= time_tol) {
      if (std::abs(k.v - vals.back()) > value_tol) {
        std::ostringstream msg;
        msg << who << ": conflicting envelope values " << vals.back() << " and "
            << k.v << " at t=" << k.t
            << " (step transition not connectable within ramp limits)";
        throw InfeasibleUncertaintyError(msg.str());
      }
      continue;
    }
    pts.push_back(k.t);
    vals.push_back(k.v);
  }
  // A transition landing within tol of the horizon must not shorten the domain.
  if (std::abs(pts.back() - knots.back().t) <= time_tol) {
    pts.back() = knots.back().t;
  }
  return PwaFunction(std::move(pts), std::move(vals));
}

// Upper cap and lower floor of the step bounds at time t. At an interior
// grid point the cap is the min of the adjacent steps and the floor the max,
// which is what continuity imposes on any member.
void step_caps_at(const StepBounds& b, double t, double time_tol, double* cap,
                  double* floor_v) {
  const auto& g = b.grid;
  const std::size_t n_int = b.upper.size();
  auto it = std::upper_bound(g.begin(), g.end(), t);
  std::size_t idx = (it == g.begin()) ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
  if (idx >= n_int) idx = n_int - 1;

  // Near a grid point both adjacent intervals constrain the value (continuity).
  std::size_t lo_int = idx, hi_int = idx;
  for (std::size_t k = idx; k <= idx + 1 && k < g.size(); ++k) {
    if (std::abs(g[k] - t) <= time_tol) {
      lo_int = (k == 0) ? 0 : std::min(k - 1, n_int - 1);
      hi_int = std::min(k, n_int - 1);
      break;
    }
  }
  *cap = std::min(b.upper[lo_int], b.upper[hi_int]);
  *floor_v = std::max(b.lower[lo_int], b.lower[hi_int]);
}

void check_envelope(const PwaFunction& f, const StepBounds& b,
                    const RampLimits& r, const char* who) {
  const double time_tol = breakpoint_tolerance(b.horizon());
  const double vtol =
      1e-7 * (1.0 + std::max(abs_scale(b.upper), abs_scale(b.lower)));
  const double stol = 1e-6 * (1.0 + std::max(std::abs(r.up), std::abs(r.down)));
  for (std::size_t s = 0; s + 1 < f.size(); ++s) {
    double sl = f.slope(s);
    if (sl > r.up + stol || sl < r.down - stol) {
      std::ostringstream msg;
      msg << who << ": envelope segment slope " << sl << " at t="
          << f.breakpoints()[s] << " outside ramp limits [" << r.down << ", "
          << r.up << "]";
      throw InfeasibleUncertaintyError(msg.str());
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    double cap, floor_v;
    step_caps_at(b, f.breakpoints()[i], time_tol, &cap, &floor_v);
    double v = f.values()[i];
    if (v > cap + vtol || v < floor_v - vtol) {
      std::ostringstream msg;
      msg << who << ": envelope value " << v << " at t=" << f.breakpoints()[i]
          << " escapes the step bounds [" << floor_v << ", " << cap
          << "] (uncertainty set is empty)";
      throw InfeasibleUncertaintyError(msg.str());
    }
  }
}

// Breakpoint induced by the step transition between intervals i and i+1.
// rise_rate handles non-negative jumps, fall_rate negative ones; the 0/0
// convention maps a zero jump onto the grid point itself.
double transition_time(double grid_prev, double grid_mid, double grid_next,
                       double jump, double rate_up, double rate_down,
                       bool toward_future_on_rise, const char* who) {
  double t;
  if (jump >= 0.0) {
    double offset;
    if (jump == 0.0) {
      offset = 0.0;
    } else if (rate_up > 0.0) {
      offset = jump / rate_up;
    } else {
      offset = std::numeric_limits<double>::infinity();
    }
    t = toward_future_on_rise ? grid_mid + offset : grid_mid - offset;
  } else {
    double offset;
    if (rate_down < 0.0) {
      offset = jump / rate_down;  // positive
    } else {
      offset = std::numeric_limits<double>::infinity();
    }
    t = toward_future_on_rise ? grid_mid - offset : grid_mid + offset;
  }
  const double tol = breakpoint_tolerance(grid_next);
  if (!(t >= grid_prev - tol && t <= grid_next + tol)) {
    std::ostringstream msg;
    msg << who << ": step jump " << jump << " at t=" << grid_mid
        << " needs a connecting time " << t << " outside (" << grid_prev
        << ", " << grid_next << "); ramp limits are too tight";
    throw InfeasibleUncertaintyError(msg.str());
  }
  return std::clamp(t, grid_prev, grid_next);
}

PwaFunction build_envelope(const StepBounds& b, const RampLimits& r,
                           bool upper_side) {
  b.validate();
  if (!(r.down <= r.up)) {
    throw std::invalid_argument("RampLimits: down must not exceed up");
  }
  const auto& steps = upper_side ? b.upper : b.lower;
  const std::size_t n_int = steps.size();
  const char* who = upper_side ? "build_upper_envelope" : "build_lower_envelope";

  std::vector<Knot> knots;
  knots.reserve(2 * n_int + 1);
  knots.push_back({b.grid.front(), steps.front()});
  for (std::size_t i = 1; i < b.grid.size(); ++i) {
    double adj_prev = steps[i - 1];
    double adj_next = steps[std::min(i, n_int - 1)];
    double v = upper_side ? std::min(adj_prev, adj_next)
                          : std::max(adj_prev, adj_next);
    knots.push_back({b.grid[i], v});
  }
  for (std::size_t i = 0; i + 1 < n_int; ++i) {
    double jump = steps[i + 1] - steps[i];
    // The upper envelope realizes a rising cap after the grid point and a
    // falling cap before it; the lower envelope mirrors this.
    double tb = transition_time(b.grid[i], b.grid[i + 1], b.grid[i + 2], jump,
                                r.up, r.down, upper_side, who);
    double v = upper_side ? std::max(steps[i], steps[i + 1])
                          : std::min(steps[i], steps[i + 1]);
    knots.push_back({tb, v});
  }

  const double time_tol = breakpoint_tolerance(b.horizon());
  const double vtol = 1e-7 * (1.0 + abs_scale(steps));
  PwaFunction f = assemble_knots(std::move(knots), time_tol, vtol, who);
  check_envelope(f, b, r, who);
  return f;
}

}  // namespace

void StepBounds::validate() const {
  if (grid.size() < 2) {
    throw std::invalid_argument("StepBounds: need at least two grid points");
  }
  if (grid.front() != 0.0) {
    throw std::invalid_argument("StepBounds: grid must start at 0");
  }
  if (upper.size() != grid.size() - 1 || lower.size() != grid.size() - 1) {
    throw std::invalid_argument("StepBounds: need one bound pair per interval");
  }
  const double delta = (grid.back() - grid.front()) / double(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double d = grid[i + 1] - grid[i];
    if (!(d > 0.0)) {
      throw std::invalid_argument("StepBounds: grid not strictly increasing");
    }
    if (std::abs(d - delta) > 1e-6 * delta) {
      throw std::invalid_argument("StepBounds: grid not equally spaced");
    }
  }
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (!std::isfinite(upper[i]) || !std::isfinite(lower[i])) {
      throw std::invalid_argument("StepBounds: non-finite bound");
    }
    if (lower[i] > upper[i]) {
      std::ostringstream msg;
      msg << "StepBounds: lower bound " << lower[i] << " exceeds upper bound "
          << upper[i] << " on interval " << i;
      throw std::invalid_argument(msg.str());
    }
  }
}

PwaFunction build_upper_envelope(const StepBounds& b, const RampLimits& r) {
  return build_envelope(b, r, true);
}

PwaFunction build_lower_envelope(const StepBounds& b, const RampLimits& r) {
  return build_envelope(b, r, false);
}

DemandEnvelope build_envelope_set(const std::vector<LoadBounds>& loads) {
  if (loads.empty()) {
    throw std::invalid_argument("build_envelope_set: no loads");
  }
  const double horizon = loads.front().steps.horizon();
  const std::size_t n_points = loads.front().steps.grid.size();
  const double tol = breakpoint_tolerance(horizon);

  std::vector<PwaFunction> uppers, lowers;
  std::vector<RampLimits> ramps;
  for (std::size_t d = 0; d < loads.size(); ++d) {
    const auto& ld = loads[d];
    if (std::abs(ld.steps.horizon() - horizon) > tol ||
        ld.steps.grid.size() != n_points) {
      throw std::invalid_argument(
          "build_envelope_set: loads must share the horizon and N");
    }
    try {
      uppers.push_back(build_upper_envelope(ld.steps, ld.ramps));
      lowers.push_back(build_lower_envelope(ld.steps, ld.ramps));
    } catch (const InfeasibleUncertaintyError& e) {
      throw InfeasibleUncertaintyError("load " + std::to_string(d) + ": " +
                                       e.what());
    }
    ramps.push_back(ld.ramps);
  }

  std::vector<PwaFunction> all;
  all.reserve(2 * loads.size());
  for (const auto& f : uppers) all.push_back(f);
  for (const auto& f : lowers) all.push_back(f);
  TimeGrid grid = merge_breakpoints(all, tol);

  const std::size_t m = grid.size();
  const std::size_t n_loads = loads.size();
  DemandEnvelope env{
      {}, {}, std::move(ramps), grid, {}, {}, {}, {}, {}};
  for (std::size_t d = 0; d < n_loads; ++d) {
    env.upper.push_back(resample(uppers[d], grid, tol));
    env.lower.push_back(resample(lowers[d], grid, tol));
  }

  double scale = 0.0;
  for (std::size_t d = 0; d < n_loads; ++d) {
    scale = std::max(scale, abs_scale(env.upper[d].values()));
    scale = std::max(scale, abs_scale(env.lower[d].values()));
  }
  const double vtol = 1e-7 * (1.0 + scale);

  env.H.assign(m, std::vector<double>(n_loads, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t d = 0; d < n_loads; ++d) {
      double h = env.upper[d].values()[j] - env.lower[d].values()[j];
      if (h < -vtol) {
        std::ostringstream msg;
        msg << "load " << d << ": upper envelope dips below lower envelope at t="
            << grid.points()[j] << " (uncertainty set is empty)";
        throw InfeasibleUncertaintyError(msg.str());
      }
      env.H[j][d] = std::max(h, 0.0);
    }
  }

  env.upper_sum.assign(m - 1, std::vector<double>(n_loads, 0.0));
  env.lower_sum.assign(m - 1, std::vector<double>(n_loads, 0.0));
  env.ramp_hi.assign(m - 1, std::vector<double>(n_loads, 0.0));
  env.ramp_lo.assign(m - 1, std::vector<double>(n_loads, 0.0));
  for (std::size_t j = 0; j + 1 < m; ++j) {
    for (std::size_t d = 0; d < n_loads; ++d) {
      env.upper_sum[j][d] =
          env.upper[d].values()[j + 1] + env.upper[d].values()[j];
      env.lower_sum[j][d] =
          env.lower[d].values()[j + 1] + env.lower[d].values()[j];
      // A segment with coinciding envelopes at both ends admits exactly one
      // trajectory; its slope is then the only possible rate.
      if (env.H[j][d] <= vtol && env.H[j + 1][d] <= vtol) {
        double sl = env.upper[d].slope(j);
        env.ramp_hi[j][d] = sl;
        env.ramp_lo[j][d] = sl;
      } else {
        env.ramp_hi[j][d] = env.ramps[d].up;
        env.ramp_lo[j][d] = env.ramps[d].down;
      }
    }
  }
  return env;
}

std::string MembershipReport::describe() const {
  if (ok) return "member of the uncertainty set";
  std::ostringstream out;
  out << violations.size() << " violation(s):";
  std::size_t shown = 0;
  for (const auto& v : violations) {
    if (shown++ == 5) {
      out << " ...";
      break;
    }
    const char* what = nullptr;
    switch (v.kind) {
      case MembershipViolation::Kind::above_upper: what = "above upper envelope"; break;
      case MembershipViolation::Kind::below_lower: what = "below lower envelope"; break;
      case MembershipViolation::Kind::ramp_up: what = "ramp above limit"; break;
      case MembershipViolation::Kind::ramp_down: what = "ramp below limit"; break;
    }
    out << " [load " << v.load << " " << what << " by " << v.amount
        << " at t=" << v.time << "]";
  }
  return out.str();
}

MembershipReport validate_membership(const DemandEnvelope& env,
                                     const std::vector<PwaFunction>& traj,
                                     double tol) {
  if (traj.size() != env.num_loads()) {
    throw std::domain_error("validate_membership: wrong number of loads");
  }
  const double time_tol = breakpoint_tolerance(env.horizon());
  MembershipReport report;
  for (std::size_t d = 0; d < traj.size(); ++d) {
    if (std::abs(traj[d].domain_end() - env.horizon()) > time_tol) {
      throw std::domain_error("validate_membership: trajectory horizon mismatch");
    }
    TimeGrid merged =
        merge_breakpoints({traj[d], env.upper[d], env.lower[d]}, time_tol);
    for (double t : merged.points()) {
      double x = traj[d].eval(t);
      double hi = env.upper[d].eval(t);
      double lo = env.lower[d].eval(t);
      if (x > hi + tol) {
        report.violations.push_back({MembershipViolation::Kind::above_upper, d,
                                     t, x - hi});
      }
      if (x < lo - tol) {
        report.violations.push_back({MembershipViolation::Kind::below_lower, d,
                                     t, lo - x});
      }
    }
    for (std::size_t s = 0; s + 1 < traj[d].size(); ++s) {
      double sl = traj[d].slope(s);
      if (sl > env.ramps[d].up + tol) {
        report.violations.push_back({MembershipViolation::Kind::ramp_up, d,
                                     traj[d].breakpoints()[s],
                                     sl - env.ramps[d].up});
      }
      if (sl < env.ramps[d].down - tol) {
        report.violations.push_back({MembershipViolation::Kind::ramp_down, d,
                                     traj[d].breakpoints()[s],
                                     env.ramps[d].down - sl});
      }
    }
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace ctsched
