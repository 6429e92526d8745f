#include "ctsched/system_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctsched {

void SystemModel::validate() const {
  const std::size_t g = num_generators();
  const std::size_t l = num_lines();
  if (g == 0) {
    throw std::invalid_argument("SystemModel: need at least one generator");
  }
  if (x_max.size() != g || x_min.size() != g || ramp_up.size() != g ||
      ramp_down.size() != g) {
    throw std::invalid_argument("SystemModel: generator vector length mismatch");
  }
  if (ptdf_gen.size() != l || ptdf_load.size() != l) {
    throw std::invalid_argument("SystemModel: PTDF row count mismatch");
  }
  for (std::size_t i = 0; i < g; ++i) {
    if (cost[i] < 0.0) {
      throw std::invalid_argument("SystemModel: negative cost coefficient");
    }
    if (x_min[i] > x_max[i]) {
      std::ostringstream msg;
      msg << "SystemModel: x_min " << x_min[i] << " exceeds x_max " << x_max[i]
          << " for generator " << i;
      throw std::invalid_argument(msg.str());
    }
    if (ramp_up[i] < 0.0 || ramp_down[i] > 0.0) {
      throw std::invalid_argument(
          "SystemModel: ramp_up must be >= 0 and ramp_down <= 0");
    }
  }
  for (std::size_t i = 0; i < l; ++i) {
    if (line_cap[i] < 0.0) {
      throw std::invalid_argument("SystemModel: negative line capacity");
    }
    if (ptdf_gen[i].size() != g || ptdf_load[i].size() != num_loads) {
      throw std::invalid_argument("SystemModel: PTDF column count mismatch");
    }
  }
}

std::string StackedInequalities::row_label(std::size_t p) const {
  if (p < n_gen_) return "x_max[" + std::to_string(p) + "]";
  p -= n_gen_;
  if (p < n_gen_) return "x_min[" + std::to_string(p) + "]";
  p -= n_gen_;
  if (p < n_line_) return "flow_fwd[" + std::to_string(p) + "]";
  p -= n_line_;
  if (p < n_line_) return "flow_rev[" + std::to_string(p) + "]";
  throw std::out_of_range("StackedInequalities::row_label");
}

StackedInequalities assemble(const SystemModel& sys) {
  sys.validate();
  const std::size_t g = sys.num_generators();
  const std::size_t l = sys.num_lines();
  const std::size_t d = sys.num_loads;
  const std::size_t rows = 2 * (g + l);

  StackedInequalities s;
  s.n_gen_ = g;
  s.n_line_ = l;
  s.A.assign(rows, std::vector<double>(g, 0.0));
  s.B.assign(rows, std::vector<double>(d, 0.0));
  s.a.assign(rows, 0.0);

  for (std::size_t i = 0; i < g; ++i) {
    s.A[i][i] = 1.0;
    s.a[i] = sys.x_max[i];
    s.A[g + i][i] = -1.0;
    s.a[g + i] = -sys.x_min[i];
  }
  for (std::size_t i = 0; i < l; ++i) {
    std::size_t fwd = 2 * g + i;
    std::size_t rev = 2 * g + l + i;
    for (std::size_t c = 0; c < g; ++c) {
      s.A[fwd][c] = sys.ptdf_gen[i][c];
      s.A[rev][c] = -sys.ptdf_gen[i][c];
    }
    for (std::size_t c = 0; c < d; ++c) {
      s.B[fwd][c] = sys.ptdf_load[i][c];
      s.B[rev][c] = -sys.ptdf_load[i][c];
    }
    s.a[fwd] = sys.line_cap[i];
    s.a[rev] = sys.line_cap[i];
  }
  return s;
}

}  // namespace ctsched
