#pragma once

#include <string>
#include <vector>

namespace ctsched {

// Generator, line and load parameters of the transmission system. PTDF
// matrices are taken as inputs; topology processing is out of scope.
struct SystemModel {
  std::vector<double> cost;       // G, currency/MWh, >= 0
  std::vector<double> x_max;      // G, MW
  std::vector<double> x_min;      // G, MW
  std::vector<double> ramp_up;    // G, MW/h, >= 0
  std::vector<double> ramp_down;  // G, MW/h, <= 0
  std::vector<double> line_cap;   // L, MW, >= 0
  std::vector<std::vector<double>> ptdf_gen;   // L x G
  std::vector<std::vector<double>> ptdf_load;  // L x D
  std::size_t num_loads = 0;

  std::size_t num_generators() const { return cost.size(); }
  std::size_t num_lines() const { return line_cap.size(); }

  void validate() const;
};

// The capacity and line-flow constraints stacked as A x + B xi <= a, with
// row blocks in fixed order: x <= x_max, -x <= -x_min, flow <= cap,
// -flow <= cap. Capacity rows carry zero B entries.
struct StackedInequalities {
  std::vector<std::vector<double>> A;  // 2(G+L) x G
  std::vector<std::vector<double>> B;  // 2(G+L) x D
  std::vector<double> a;               // 2(G+L)

  std::size_t rows() const { return a.size(); }
  // Names the physical constraint behind row p, for diagnostics.
  std::string row_label(std::size_t p) const;

 private:
  friend StackedInequalities assemble(const SystemModel&);
  std::size_t n_gen_ = 0;
  std::size_t n_line_ = 0;
};

StackedInequalities assemble(const SystemModel& sys);

}  // namespace ctsched
