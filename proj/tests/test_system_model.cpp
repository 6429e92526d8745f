#include <doctest.h>

#include <stdexcept>

#include "ctsched/simulate.hpp"
#include "ctsched/system_model.hpp"

using namespace ctsched;

namespace {

SystemModel one_gen() {
  SystemModel sys;
  sys.cost = {1.0};
  sys.x_max = {10.0};
  sys.x_min = {0.0};
  sys.ramp_up = {5.0};
  sys.ramp_down = {-5.0};
  sys.num_loads = 0;
  return sys;
}

}  // namespace

TEST_CASE("assemble stacks capacity rows for a single generator") {
  auto s = assemble(one_gen());
  REQUIRE(s.rows() == 2);
  CHECK(s.A[0] == std::vector<double>{1.0});
  CHECK(s.A[1] == std::vector<double>{-1.0});
  CHECK(s.a == std::vector<double>{10.0, 0.0});
  CHECK(s.B[0].empty());
  CHECK(s.row_label(0) == "x_max[0]");
  CHECK(s.row_label(1) == "x_min[0]");
}

TEST_CASE("assemble unfolds line limits into two signed rows") {
  SystemModel sys = one_gen();
  sys.num_loads = 1;
  sys.line_cap = {3.0};
  sys.ptdf_gen = {{1.0}};
  sys.ptdf_load = {{-0.5}};
  auto s = assemble(sys);
  REQUIRE(s.rows() == 4);
  CHECK(s.A[2] == std::vector<double>{1.0});
  CHECK(s.B[2] == std::vector<double>{-0.5});
  CHECK(s.a[2] == 3.0);
  CHECK(s.A[3] == std::vector<double>{-1.0});
  CHECK(s.B[3] == std::vector<double>{0.5});
  CHECK(s.a[3] == 3.0);
  CHECK(s.row_label(2) == "flow_fwd[0]");
  CHECK(s.row_label(3) == "flow_rev[0]");
}

TEST_CASE("stacked system is pointwise equivalent to the direct checks") {
  Rng rng(21);
  SystemModel sys;
  sys.cost = {3.0, 1.0, 2.0};
  sys.x_max = {5.0, 8.0, 2.0};
  sys.x_min = {0.5, 0.0, 0.0};
  sys.ramp_up = {1.0, 1.0, 1.0};
  sys.ramp_down = {-1.0, -1.0, -1.0};
  sys.num_loads = 2;
  sys.line_cap = {4.0, 2.5};
  sys.ptdf_gen = {{0.3, -0.2, 0.0}, {-0.1, 0.4, 0.9}};
  sys.ptdf_load = {{0.5, -0.5}, {0.2, 0.8}};
  auto s = assemble(sys);
  REQUIRE(s.rows() == 10);

  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(3), xi(2);
    for (auto& v : x) v = rng.uniform(-2.0, 10.0);
    for (auto& v : xi) v = rng.uniform(-5.0, 5.0);

    bool direct = true;
    for (int g = 0; g < 3; ++g) {
      direct = direct && x[g] <= sys.x_max[g] && x[g] >= sys.x_min[g];
    }
    for (int l = 0; l < 2; ++l) {
      double flow = 0.0;
      for (int g = 0; g < 3; ++g) flow += sys.ptdf_gen[l][g] * x[g];
      for (int d = 0; d < 2; ++d) flow += sys.ptdf_load[l][d] * xi[d];
      direct = direct && flow <= sys.line_cap[l] && -flow <= sys.line_cap[l];
    }

    bool stacked = true;
    for (std::size_t p = 0; p < s.rows(); ++p) {
      double lhs = 0.0;
      for (int g = 0; g < 3; ++g) lhs += s.A[p][g] * x[g];
      for (int d = 0; d < 2; ++d) lhs += s.B[p][d] * xi[d];
      stacked = stacked && lhs <= s.a[p];
    }
    CHECK(direct == stacked);
  }
}

TEST_CASE("system validation rejects inconsistent data") {
  auto sys = one_gen();
  sys.x_min = {11.0};
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  sys = one_gen();
  sys.cost = {-1.0};
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  sys = one_gen();
  sys.ramp_down = {1.0};
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  sys = one_gen();
  sys.line_cap = {1.0};
  sys.ptdf_gen = {{1.0, 2.0}};  // wrong width
  sys.ptdf_load = {{}};
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}
