#include "ctsched/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "ctsched/errors.hpp"

namespace ctsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The source problem P: min c.x s.t. G x <= g, E x = e, x free, is solved
// through its dual in standard form,
//   min q.w  s.t.  A w = b, w >= 0,
// whose basis has only num_cols(P) rows. The columns of A are the rows of P:
// w = (u, v+, v-) with A = [G^T, E^T, -E^T], b = -c, q = (g, e, -e). The
// simplex multipliers of the dual's equality rows at optimality are exactly
// the primal solution x, and val(P) = -val(dual).
//
// Numerical safeguards: a deterministic tiny cost perturbation against
// degenerate cycling, a Harris-style two-pass ratio test, magnitude-scaled
// pricing gates, periodic refactorization, and basis repair (dependent
// columns replaced by artificials, feasibility restored by a phase-1 rerun).
class DualStandardForm {
 public:
  enum class Outcome { optimal, infeasible, unbounded };

  DualStandardForm(const LpProblem& p, const SolveOptions& opt)
      : p_(p),
        opt_(opt),
        n_(p.num_cols),
        m1_(p.ineq.size()),
        m2_(p.eq.size()),
        nc_(m1_ + 2 * m2_) {
    col_buf_.resize(n_);
    dir_buf_.resize(n_);
    max_pivots_ = opt.max_pivots > 0
                      ? opt.max_pivots
                      : 100000 + 400 * static_cast<std::int64_t>(n_) +
                            20 * static_cast<std::int64_t>(nc_);
    // Deterministic relative perturbation; breaks pivoting ties without
    // touching the reported numbers, which are recomputed from exact costs.
    pert_.resize(nc_);
    for (std::size_t j = 0; j < nc_; ++j) {
      double h = 0.5 + golden_fraction(j);
      pert_[j] = 1e-11 * (1.0 + std::abs(exact_cost(j))) * h;
    }
  }

  Outcome run(const std::vector<double>& b, bool bland_from_start) {
    sign_.assign(n_, 1.0);
    bflip_.assign(n_, 0.0);
    bscale_ = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      sign_[i] = (b[i] < 0.0) ? -1.0 : 1.0;
      bflip_[i] = sign_[i] * b[i];
      bscale_ = std::max(bscale_, bflip_[i]);
    }
    basis_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) basis_[i] = nc_ + i;
    binv_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) binv_[i * n_ + i] = 1.0;
    xb_ = bflip_;
    repairs_ = 0;

    const double phase1_tol = 1e-8 * (1.0 + bscale_);
    for (int round = 0; round < 24; ++round) {
      if (artificial_infeasibility() > phase1_tol) {
        Outcome out = iterate(true, bland_from_start);
        if (out != Outcome::optimal) {
          throw SolverFailureError("phase 1 cannot be unbounded");
        }
        std::size_t before = repairs_;
        refactor(true);
        if (artificial_infeasibility() > phase1_tol) {
          if (repairs_ == before) return Outcome::infeasible;
          continue;  // a repair disturbed feasibility: rerun phase 1
        }
      }
      Outcome out = iterate(false, bland_from_start);
      refactor(true);
      if (artificial_infeasibility() > phase1_tol) {
        continue;  // a repair disturbed feasibility: restore it and resume
      }
      return out;
    }
    throw SolverFailureError("basis repair loop did not stabilize");
  }

  double dual_objective() const { return phase_objective(false, false); }

  // x of the source problem, recovered from the simplex multipliers.
  std::vector<double> primal_solution() const {
    std::vector<double> y = price(false, false);
    for (std::size_t i = 0; i < n_; ++i) y[i] *= sign_[i];
    return y;
  }

 private:
  static double golden_fraction(std::size_t j) {
    double v = static_cast<double>(j + 1) * 0.6180339887498949;
    return v - std::floor(v);
  }

  double exact_cost(std::size_t j) const {
    if (j >= nc_) return 0.0;
    if (j < m1_) return p_.ineq_rhs[j];
    if (j < m1_ + m2_) return p_.eq_rhs[j - m1_];
    return -p_.eq_rhs[j - m1_ - m2_];
  }

  // Pivoting cost: phase-1 counts artificials, phase 2 uses perturbed costs.
  double column_cost(std::size_t j, bool phase1, bool perturbed) const {
    if (j >= nc_) return phase1 ? 1.0 : 0.0;
    if (phase1) return 0.0;
    return exact_cost(j) + (perturbed ? pert_[j] : 0.0);
  }

  // Writes the sign-flipped column j of A into col_buf_.
  void fetch_column(std::size_t j) {
    if (j >= nc_) {
      std::fill(col_buf_.begin(), col_buf_.end(), 0.0);
      col_buf_[j - nc_] = 1.0;
      return;
    }
    const std::vector<double>* src;
    double s = 1.0;
    if (j < m1_) {
      src = &p_.ineq[j];
    } else if (j < m1_ + m2_) {
      src = &p_.eq[j - m1_];
    } else {
      src = &p_.eq[j - m1_ - m2_];
      s = -1.0;
    }
    for (std::size_t i = 0; i < n_; ++i) col_buf_[i] = s * sign_[i] * (*src)[i];
  }

  double phase_objective(bool phase1, bool perturbed) const {
    double obj = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      obj += column_cost(basis_[i], phase1, perturbed) * xb_[i];
    }
    return obj;
  }

  double artificial_infeasibility() const {
    double v = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (basis_[i] >= nc_) v += std::max(xb_[i], 0.0);
    }
    return v;
  }

  std::vector<double> price(bool phase1, bool perturbed) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      double ck = column_cost(basis_[k], phase1, perturbed);
      if (ck == 0.0) continue;
      const double* row = binv_.data() + k * n_;
      for (std::size_t i = 0; i < n_; ++i) y[i] += ck * row[i];
    }
    return y;
  }

  // Rebuilds the basis inverse from scratch. With allow_repair, dependent
  // basis columns are replaced by artificials for the uncovered rows.
  void refactor(bool allow_repair) {
    for (int attempt = 0; attempt <= static_cast<int>(n_); ++attempt) {
      std::vector<double> work(n_ * n_);
      for (std::size_t k = 0; k < n_; ++k) {
        fetch_column(basis_[k]);
        for (std::size_t i = 0; i < n_; ++i) work[i * n_ + k] = col_buf_[i];
      }
      std::vector<double> inv(n_ * n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) inv[i * n_ + i] = 1.0;
      std::vector<std::size_t> perm(n_);
      for (std::size_t i = 0; i < n_; ++i) perm[i] = i;
      double scale = 0.0;
      for (double v : work) scale = std::max(scale, std::abs(v));
      const double singular_tol = 1e-13 * std::max(1.0, scale);

      bool repaired = false;
      for (std::size_t col = 0; col < n_ && !repaired; ++col) {
        std::size_t piv = col;
        double best = std::abs(work[col * n_ + col]);
        for (std::size_t r = col + 1; r < n_; ++r) {
          double v = std::abs(work[r * n_ + col]);
          if (v > best) {
            best = v;
            piv = r;
          }
        }
        if (best < singular_tol) {
          if (!allow_repair || repairs_ >= 64) {
            throw SolverFailureError("basis matrix is numerically singular");
          }
          // Column col of the basis depends on the previous ones; the row at
          // this elimination position lacks a pivot, so give it its
          // artificial and rebuild.
          basis_[col] = nc_ + perm[col];
          ++repairs_;
          repaired = true;
          break;
        }
        if (piv != col) {
          for (std::size_t c = 0; c < n_; ++c) {
            std::swap(work[piv * n_ + c], work[col * n_ + c]);
            std::swap(inv[piv * n_ + c], inv[col * n_ + c]);
          }
          std::swap(perm[piv], perm[col]);
        }
        double p = work[col * n_ + col];
        for (std::size_t c = 0; c < n_; ++c) {
          work[col * n_ + c] /= p;
          inv[col * n_ + c] /= p;
        }
        for (std::size_t r = 0; r < n_; ++r) {
          if (r == col) continue;
          double f = work[r * n_ + col];
          if (f == 0.0) continue;
          for (std::size_t c = 0; c < n_; ++c) {
            work[r * n_ + c] -= f * work[col * n_ + c];
            inv[r * n_ + c] -= f * inv[col * n_ + c];
          }
        }
      }
      if (repaired) continue;

      binv_ = std::move(inv);
      xb_.assign(n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        const double* row = binv_.data() + i * n_;
        double v = 0.0;
        for (std::size_t k = 0; k < n_; ++k) v += row[k] * bflip_[k];
        xb_[i] = v;
      }
      return;
    }
    throw SolverFailureError("basis repair did not produce an invertible basis");
  }

  // One simplex phase. Returns optimal when no reduced cost is negative.
  Outcome iterate(bool phase1, bool bland_from_start) {
    bool bland = bland_from_start;
    std::int64_t since_improve = 0;
    const std::int64_t stall_limit = 120 + 2 * static_cast<std::int64_t>(n_);
    double last_obj = kInf;
    std::vector<double> ys(n_);
    const bool trace = std::getenv("CTSCHED_SIMPLEX_TRACE") != nullptr;

    for (std::int64_t pivots = 0; pivots < max_pivots_; ++pivots) {
      if (pivots > 0 && pivots % 48 == 0) {
        std::size_t before = repairs_;
        refactor(true);
        if (!phase1 && repairs_ != before &&
            artificial_infeasibility() > 1e-8 * (1.0 + bscale_)) {
          // Let run() restore feasibility through phase 1.
          return Outcome::optimal;
        }
      }

      std::vector<double> y = price(phase1, true);
      for (std::size_t i = 0; i < n_; ++i) ys[i] = y[i] * sign_[i];

      // Entering column: most negative reduced cost (Dantzig), or the first
      // negative one in Bland mode. Eligibility is gated on a tolerance
      // scaled by the magnitude of the price dot product, so columns whose
      // true reduced cost is zero cannot re-enter on rounding noise.
      std::size_t enter = nc_;
      double best = 0.0;
      for (std::size_t j = 0; j < nc_; ++j) {
        double dot, mag;
        if (j < m1_) {
          row_dot_mag(p_.ineq[j], ys, &dot, &mag);
        } else if (j < m1_ + m2_) {
          row_dot_mag(p_.eq[j - m1_], ys, &dot, &mag);
        } else {
          row_dot_mag(p_.eq[j - m1_ - m2_], ys, &dot, &mag);
          dot = -dot;
        }
        double cost = column_cost(j, phase1, true);
        double r = cost - dot;
        double gate = opt_.opt_tol * (1.0 + std::abs(cost) + mag);
        if (r >= -gate) continue;
        if (enter == nc_ || r < best) {
          best = r;
          enter = j;
          if (bland) break;
        }
      }
      if (enter == nc_) return Outcome::optimal;

      fetch_column(enter);
      for (std::size_t i = 0; i < n_; ++i) {
        const double* row = binv_.data() + i * n_;
        double v = 0.0;
        for (std::size_t k = 0; k < n_; ++k) v += row[k] * col_buf_[k];
        dir_buf_[i] = v;
      }

      double dmax = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        dmax = std::max(dmax, std::abs(dir_buf_[i]));
      }
      const double piv_tol = 1e-9 * std::max(1.0, dmax);

      // Harris-style two-pass ratio test: find the tightest ratio with a
      // small feasibility slack, then take the numerically largest pivot
      // within that bound. Bland mode uses the exact least-index rule, which
      // is what guarantees termination.
      auto row_ratio = [&](std::size_t i, bool* ok) -> double {
        double d = dir_buf_[i];
        bool artificial = basis_[i] >= nc_;
        if (!phase1 && artificial && std::abs(d) > piv_tol) {
          *ok = true;  // pinned at zero: swap it out rather than move it
          return 0.0;
        }
        if (d > piv_tol) {
          *ok = true;
          return std::max(xb_[i], 0.0) / d;
        }
        *ok = false;
        return kInf;
      };

      std::size_t leave = n_;
      double theta = kInf;
      if (bland) {
        for (std::size_t i = 0; i < n_; ++i) {
          bool ok;
          double ratio = row_ratio(i, &ok);
          if (!ok) continue;
          double eps = 1e-12 * (1.0 + std::abs(theta));
          if (leave == n_ || ratio < theta - eps ||
              (ratio <= theta + eps && basis_[i] < basis_[leave])) {
            leave = i;
            theta = std::min(theta, ratio);
          }
        }
      } else {
        double bound = kInf;
        for (std::size_t i = 0; i < n_; ++i) {
          bool ok;
          double ratio = row_ratio(i, &ok);
          if (!ok) continue;
          double slack =
              1e-9 * (1.0 + std::abs(xb_[i])) / std::max(dir_buf_[i], piv_tol);
          bound = std::min(bound, ratio + slack);
        }
        double best_piv = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          bool ok;
          double ratio = row_ratio(i, &ok);
          if (!ok || ratio > bound) continue;
          double quality = std::abs(dir_buf_[i]);
          if (basis_[i] >= nc_) quality *= 4.0;  // clear artificials first
          if (leave == n_ || quality > best_piv) {
            best_piv = quality;
            leave = i;
            theta = ratio;
          }
        }
        if (leave != n_) theta = std::max(0.0, std::min(theta, bound));
      }
      if (leave == n_) {
        if (phase1) {
          throw SolverFailureError("phase 1 produced an unbounded direction");
        }
        return Outcome::unbounded;
      }

      pivot(enter, leave, theta);

      double obj = phase_objective(phase1, true);
      if (trace && pivots % 2000 == 0) {
        std::fprintf(stderr,
                     "  [simplex] phase=%d pivots=%lld obj=%.9g r=%.3e "
                     "theta=%.3e bland=%d repairs=%zu\n",
                     phase1 ? 1 : 2, static_cast<long long>(pivots), obj, best,
                     theta, static_cast<int>(bland), repairs_);
      }
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
        last_obj = obj;
        since_improve = 0;
        if (!bland_from_start) bland = false;
      } else if (!bland && ++since_improve > stall_limit) {
        bland = true;  // anti-cycling fallback until progress resumes
      }
    }
    throw SolverFailureError("pivot limit exceeded (" +
                             std::to_string(max_pivots_) + ")");
  }

  static void row_dot_mag(const std::vector<double>& row,
                          const std::vector<double>& ys, double* dot,
                          double* mag) {
    double s = 0.0, m = 0.0;
    const std::size_t n = row.size();
    for (std::size_t i = 0; i < n; ++i) {
      double term = row[i] * ys[i];
      s += term;
      m += std::abs(term);
    }
    *dot = s;
    *mag = m;
  }

  void pivot(std::size_t enter, std::size_t leave, double theta) {
    const double piv = dir_buf_[leave];
    basis_[leave] = enter;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == leave) continue;
      xb_[i] -= theta * dir_buf_[i];
      if (xb_[i] < 0.0 && xb_[i] > -1e-9 * (1.0 + bscale_)) xb_[i] = 0.0;
    }
    xb_[leave] = theta;

    double* prow = binv_.data() + leave * n_;
    for (std::size_t c = 0; c < n_; ++c) prow[c] /= piv;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == leave) continue;
      double f = dir_buf_[i];
      if (f == 0.0) continue;
      double* row = binv_.data() + i * n_;
      for (std::size_t c = 0; c < n_; ++c) row[c] -= f * prow[c];
    }
  }

  const LpProblem& p_;
  const SolveOptions& opt_;
  std::size_t n_, m1_, m2_, nc_;
  std::int64_t max_pivots_ = 0;
  double bscale_ = 0.0;
  std::size_t repairs_ = 0;
  std::vector<double> pert_;
  std::vector<double> sign_, bflip_;
  std::vector<std::size_t> basis_;
  std::vector<double> binv_, xb_;
  std::vector<double> col_buf_, dir_buf_;
};

void validate_problem(const LpProblem& p) {
  if (p.objective.size() != p.num_cols) {
    throw std::invalid_argument("LpProblem: objective length mismatch");
  }
  if (p.ineq.size() != p.ineq_rhs.size() || p.eq.size() != p.eq_rhs.size()) {
    throw std::invalid_argument("LpProblem: row/rhs count mismatch");
  }
  auto check_rows = [&](const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& rhs) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != p.num_cols) {
        throw std::invalid_argument("LpProblem: row width mismatch");
      }
      for (double v : rows[r]) {
        if (!std::isfinite(v)) {
          throw std::invalid_argument("LpProblem: non-finite coefficient");
        }
      }
      if (!std::isfinite(rhs[r])) {
        throw std::invalid_argument("LpProblem: non-finite right-hand side");
      }
    }
  };
  check_rows(p.ineq, p.ineq_rhs);
  check_rows(p.eq, p.eq_rhs);
  for (double v : p.objective) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("LpProblem: non-finite objective");
    }
  }
}

void verify_optimal(const LpProblem& p, const std::vector<double>& x,
                    double objective, const SolveOptions& opt) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw SolverFailureError("non-finite entry in recovered solution");
    }
  }
  for (std::size_t r = 0; r < p.ineq.size(); ++r) {
    double dot = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < p.num_cols; ++i) {
      dot += p.ineq[r][i] * x[i];
      mag += std::abs(p.ineq[r][i] * x[i]);
    }
    double slack_tol = opt.feas_tol + 1e-12 * (1.0 + mag + std::abs(p.ineq_rhs[r]));
    if (dot - p.ineq_rhs[r] > slack_tol) {
      throw SolverFailureError("recovered solution violates an inequality row by " +
                               std::to_string(dot - p.ineq_rhs[r]));
    }
  }
  for (std::size_t r = 0; r < p.eq.size(); ++r) {
    double dot = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < p.num_cols; ++i) {
      dot += p.eq[r][i] * x[i];
      mag += std::abs(p.eq[r][i] * x[i]);
    }
    double res_tol = opt.feas_tol + 1e-12 * (1.0 + mag + std::abs(p.eq_rhs[r]));
    if (std::abs(dot - p.eq_rhs[r]) > res_tol) {
      throw SolverFailureError("recovered solution violates an equality row by " +
                               std::to_string(std::abs(dot - p.eq_rhs[r])));
    }
  }
  double cx = 0.0, cmag = 0.0;
  for (std::size_t i = 0; i < p.num_cols; ++i) {
    cx += p.objective[i] * x[i];
    cmag += std::abs(p.objective[i] * x[i]);
  }
  if (std::abs(cx - objective) > 1e-8 * (1.0 + std::abs(objective)) + 1e-11 * cmag) {
    throw SolverFailureError("objective mismatch between primal and dual values");
  }
}

}  // namespace

LpSolution solve(const LpProblem& p, const SolveOptions& opt) {
  validate_problem(p);

  LpSolution sol;
  if (p.num_cols == 0) {
    for (double r : p.ineq_rhs) {
      if (r < -opt.feas_tol) return sol;  // infeasible
    }
    for (double r : p.eq_rhs) {
      if (std::abs(r) > opt.feas_tol) return sol;
    }
    sol.status = LpSolution::Status::optimal;
    sol.objective = 0.0;
    return sol;
  }

  DualStandardForm dual(p, opt);
  std::vector<double> b(p.num_cols);
  for (std::size_t i = 0; i < p.num_cols; ++i) b[i] = -p.objective[i];

  auto outcome = dual.run(b, false);
  if (outcome == DualStandardForm::Outcome::optimal) {
    sol.x = dual.primal_solution();
    double objective = -dual.dual_objective();
    verify_optimal(p, sol.x, objective, opt);
    double cx = 0.0;
    for (std::size_t i = 0; i < p.num_cols; ++i) cx += p.objective[i] * sol.x[i];
    sol.status = LpSolution::Status::optimal;
    sol.objective = cx;
    return sol;
  }
  if (outcome == DualStandardForm::Outcome::unbounded) {
    sol.status = LpSolution::Status::infeasible;
    return sol;
  }

  // The dual is infeasible: the source problem is unbounded if it is
  // feasible at all, which a homogeneous (Farkas) pass decides.
  std::vector<double> zero(p.num_cols, 0.0);
  auto farkas = dual.run(zero, true);
  if (farkas == DualStandardForm::Outcome::optimal) {
    sol.status = LpSolution::Status::unbounded;
  } else {
    sol.status = LpSolution::Status::infeasible;
  }
  return sol;
}

}  // namespace ctsched
