#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracpol/error.hpp"
#include "fracpol/properties.hpp"
#include "fracpol/rearrange.hpp"

using namespace fracpol;

TEST_CASE("symmetric functions are fixed") {
  const Grid g = square_grid(16, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.8), g);
  GridFunction u = GridFunction::zeros(m);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (m[i]) u.values[i] = 1.0 - std::fabs(g.center(i)[0]) + 0.1 * g.center(i)[1];
  }
  const Polarizer H = Polarizer::make({1, 0, 0}, 0.0);
  CHECK(polarize_function(u, H) == u);
}

TEST_CASE("one-sided support is mirrored into H") {
  const Grid g = square_grid(16, 1.0);
  const Polarizer H = Polarizer::make({1, 0, 0}, 0.0);
  const DomainMask m = rasterize(make_ball({0.5, 0, 0}, 0.3), g);
  CaseGenerator gen(5);
  const GridFunction u = gen.random_nonneg_function(m);
  const GridFunction pu = polarize_function(u, H);
  const CellMirror cm = cell_mirror(H, g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.coords(i);
    if (cm.side(c[0]) < 0) {
      c[0] = static_cast<int>(cm.mirror(c[0]));
      CHECK(pu.values[i] == u.values[g.index(c[0], c[1])]);
    } else {
      CHECK(pu.values[i] == 0.0);
    }
  }
}

TEST_CASE("polarized values form the same multiset") {
  const Grid g = Grid::make(2, {-1.2, -1.2, 0}, 0.05, {48, 48, 1});
  const DomainMask m = rasterize(make_annulus(1.0, 0.3, {0.2, 0, 0}), g);
  CaseGenerator gen(11);
  const GridFunction u = gen.random_nonneg_function(m);
  for (double a : {-0.1, 0.05, 0.1}) {
    REQUIRE(mirrors_within_grid(m, Polarizer::make({1, 0, 0}, a)));
    const GridFunction pu = polarize_function(u, Polarizer::make({1, 0, 0}, a));
    std::vector<double> x = u.values, y = pu.values;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    CHECK(x == y);
    for (double q : {1.0, 2.0, 3.5}) {
      CHECK(std::fabs(norm_q(pu, q) - norm_q(u, q)) <= 1e-12 * norm_q(u, q));
    }
  }
}

TEST_CASE("norm_q") {
  const Grid g = square_grid(8, 1.0);  // spacing 0.25
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.9), g);
  GridFunction u = GridFunction::zeros(m);
  CHECK(norm_q(u, 2.0) == 0.0);
  const std::size_t i = g.index(4, 4);
  REQUIRE(m[i]);
  u.values[i] = 3.0;
  for (double q : {1.0, 2.0, 3.5}) {
    CHECK(norm_q(u, q) == doctest::Approx(3.0 * std::pow(0.25 * 0.25, 1.0 / q)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(norm_q(u, 0.5), Error);
}

TEST_CASE("negative values are rejected") {
  const Grid g = square_grid(8, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.9), g);
  GridFunction u = GridFunction::zeros(m);
  u.values[g.index(4, 4)] = -1.0;
  try {
    polarize_function(u, Polarizer::make({1, 0, 0}, 0.0));
    FAIL("expected NegativeInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeInput);
  }
}

TEST_CASE("GridFunction::make validates support") {
  const Grid g = square_grid(8, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.5), g);
  std::vector<double> v(g.cell_count(), 0.0);
  v[0] = 1.0;  // corner cell lies outside the ball
  CHECK_THROWS_AS(GridFunction::make(m, v), Error);
  CHECK_THROWS_AS(GridFunction::make(m, std::vector<double>(3, 0.0)), Error);
}

TEST_CASE("function text round trip") {
  const Grid g = Grid::make(2, {-1.2, -1.2, 0}, 0.1, {24, 24, 1});
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 1.0), g);
  CaseGenerator gen(3);
  const GridFunction u = gen.random_nonneg_function(m);
  std::stringstream ss;
  write_function_text(ss, u);
  const GridFunction back = read_function_text(ss);
  CHECK(back.grid == u.grid);
  CHECK(back.values == u.values);
  CHECK(back.support == u.support);
}
