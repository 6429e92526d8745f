#include "ctsched/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctsched/errors.hpp"

namespace ctsched {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  return out;
}

}  // namespace

void write_series_csv(const std::string& path,
                      const std::vector<std::string>& names,
                      const std::vector<double>& times,
                      const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) {
    throw std::invalid_argument("write_series_csv: name/column count mismatch");
  }
  auto out = open_out(path);
  out << "t";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t r = 0; r < times.size(); ++r) {
    out << format_number(times[r]);
    for (const auto& col : columns) {
      out << "," << format_number(col[r]);
    }
    out << "\n";
  }
}

void write_rule(const std::string& path, const DecisionRule& rule) {
  auto out = open_out(path);
  out << "ctsched-rule 1\n";
  out << "dims " << rule.num_generators << " " << rule.num_loads << " "
      << rule.grid.size() << "\n";
  out << "grid";
  for (double t : rule.grid.points()) out << " " << format_number(t);
  out << "\n";
  out << "objective " << format_number(rule.objective) << "\n";
  out << "alpha";
  for (double a : rule.alpha) out << " " << format_number(a);
  out << "\n";
  for (const auto& b : rule.beta) {
    out << "beta";
    for (double v : b) out << " " << format_number(v);
    out << "\n";
  }
}

DecisionRule read_rule(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ArtifactMismatchError("cannot open rule file " + path);
  }
  auto fail = [&](const std::string& what) -> ArtifactMismatchError {
    return ArtifactMismatchError("rule file " + path + ": " + what);
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ctsched-rule" || version != 1) {
    throw fail("not a ctsched rule record (version 1)");
  }
  std::string key;
  std::size_t n_gen = 0, n_load = 0, m = 0;
  if (!(in >> key >> n_gen >> n_load >> m) || key != "dims" || n_gen == 0 ||
      m < 2) {
    throw fail("bad dims line");
  }
  if (!(in >> key) || key != "grid") throw fail("missing grid line");
  std::vector<double> pts(m);
  for (auto& t : pts) {
    if (!(in >> t)) throw fail("truncated grid line");
  }
  double objective = 0.0;
  if (!(in >> key >> objective) || key != "objective") {
    throw fail("missing objective line");
  }
  if (!(in >> key) || key != "alpha") throw fail("missing alpha line");
  std::vector<double> alpha(n_gen * n_load);
  for (auto& a : alpha) {
    if (!(in >> a)) throw fail("truncated alpha line");
  }
  std::vector<std::vector<double>> beta(m, std::vector<double>(n_gen));
  for (std::size_t j = 0; j < m; ++j) {
    if (!(in >> key) || key != "beta") throw fail("missing beta line");
    for (auto& v : beta[j]) {
      if (!(in >> v)) throw fail("truncated beta line");
    }
  }
  try {
    DecisionRule rule{n_gen, n_load, std::move(alpha), std::move(beta),
                      TimeGrid(std::move(pts)), objective};
    rule.validate();
    return rule;
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
}

void write_lp_text(const LpProblem& lp, const std::string& path) {
  auto out = open_out(path);
  const auto& lay = lp.layout;
  const bool named = lay.num_cols() == lp.num_cols && lp.num_cols > 0;
  auto var_name = [&](std::size_t c) -> std::string {
    if (named) {
      if (c < lay.G * lay.D) {
        return "a_" + std::to_string(c / lay.D) + "_" + std::to_string(c % lay.D);
      }
      std::size_t r = c - lay.G * lay.D;
      if (r < lay.G * lay.M) {
        return "b_" + std::to_string(r / lay.G) + "_" + std::to_string(r % lay.G);
      }
      r -= lay.G * lay.M;
      if (r < lay.eta_count) return "eta_" + std::to_string(r);
      return "z_" + std::to_string(r - lay.eta_count);
    }
    return "x_" + std::to_string(c);
  };
  auto write_terms = [&](std::ostream& os, const std::vector<double>& row) {
    bool first = true;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0.0) continue;
      double v = row[c];
      if (first) {
        os << format_number(v) << " " << var_name(c);
        first = false;
      } else {
        os << (v >= 0.0 ? " + " : " - ") << format_number(std::abs(v)) << " "
           << var_name(c);
      }
    }
    if (first) os << "0 " << var_name(0);
  };

  out << "\\ LP export\nMinimize\n obj: ";
  write_terms(out, lp.objective);
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.ineq.size(); ++r) {
    out << " c" << r << ": ";
    write_terms(out, lp.ineq[r]);
    out << " <= " << format_number(lp.ineq_rhs[r]) << "\n";
  }
  for (std::size_t r = 0; r < lp.eq.size(); ++r) {
    out << " e" << r << ": ";
    write_terms(out, lp.eq[r]);
    out << " = " << format_number(lp.eq_rhs[r]) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t c = 0; c < lp.num_cols; ++c) {
    out << " " << var_name(c) << " free\n";
  }
  out << "End\n";
}

}  // namespace ctsched
