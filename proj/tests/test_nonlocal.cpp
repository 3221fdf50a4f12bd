#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracpol/error.hpp"
#include "fracpol/nonlocal.hpp"
#include "fracpol/properties.hpp"
#include "fracpol/reduce.hpp"

using namespace fracpol;

namespace {

// Direct double sum over the padded box with u = 0 outside the grid.
struct BruteForce {
  const KernelTable& K;

  double w(const Point& x, const Point& y) const {
    const Grid& g = K.grid();
    const double d = g.dim, sp = K.params().s * K.params().p;
    double r2 = 0.0;
    for (int k = 0; k < g.dim; ++k) r2 += (x[k] - y[k]) * (x[k] - y[k]);
    return std::pow(r2, -(d + sp) / 2.0) * std::pow(g.cell_volume(), 2.0);
  }

  double tail(std::size_t i) const {
    const Grid& g = K.grid();
    const Grid& P = K.padded_grid();
    const Point x = g.center(i);
    double rho = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.dim; ++k) {
      rho = std::min(rho, x[k] - P.box_lo()[k]);
      rho = std::min(rho, P.box_hi()[k] - x[k]);
    }
    const double sp = K.params().s * K.params().p;
    return unit_sphere_measure(g.dim) * std::pow(rho, -sp) / sp;
  }

  // Values on the padded grid.
  std::vector<double> lift(const GridFunction& u) const {
    const Grid& P = K.padded_grid();
    const auto pc = K.pad_cells();
    std::vector<double> U(P.cell_count(), 0.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      const auto c = u.grid.coords(i);
      U[P.index(c[0] + pc[0], c[1] + pc[1], c[2] + pc[2])] = u.values[i];
    }
    return U;
  }

  double energy(const GridFunction& u) const {
    const Grid& P = K.padded_grid();
    const double p = K.params().p;
    const std::vector<double> U = lift(u);
    double e = 0.0;
    for (std::size_t a = 0; a < P.cell_count(); ++a) {
      for (std::size_t b = 0; b < P.cell_count(); ++b) {
        if (a == b || (U[a] == 0.0 && U[b] == 0.0)) continue;
        e += w(P.center(a), P.center(b)) * std::pow(std::fabs(U[a] - U[b]), p);
      }
    }
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      e += 2.0 * tail(i) * std::pow(std::fabs(u.values[i]), p) * u.grid.cell_volume();
    }
    return e;
  }

  std::vector<double> flux(const GridFunction& u) const {
    const Grid& g = K.grid();
    const Grid& P = K.padded_grid();
    const double p = K.params().p, dv = g.cell_volume();
    auto G = [p](double t) { return std::pow(std::fabs(t), p - 2.0) * t; };
    const std::vector<double> U = lift(u);
    std::vector<double> v(g.cell_count(), 0.0);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const Point x = g.center(i);
      double s = 0.0;
      for (std::size_t b = 0; b < P.cell_count(); ++b) {
        const Point y = P.center(b);
        double r2 = 0.0;
        for (int k = 0; k < g.dim; ++k) r2 += (x[k] - y[k]) * (x[k] - y[k]);
        if (r2 < 1e-12 * dv) continue;
        s += w(x, y) / dv * G(u.values[i] - U[b]);
      }
      v[i] = s + tail(i) * G(u.values[i]);
    }
    return v;
  }
};

GridFunction random_positive(const DomainMask& m, std::uint64_t seed) {
  CaseGenerator gen(seed);
  GridFunction u = GridFunction::zeros(m);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (m[i]) u.values[i] = gen.uniform(0.2, 1.0);
  }
  return u;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("critical exponent and parameter validation") {
  CHECK(critical_exponent(0.5, 2.0, 2) == doctest::Approx(4.0));
  CHECK(std::isinf(critical_exponent(0.9, 3.0, 2)));
  CHECK_NOTHROW(FracParams::make(0.5, 2.0, 3.9, 2));
  CHECK_NOTHROW(FracParams::make(0.9, 3.0, 100.0, 2));
  try {
    FracParams::make(0.5, 2.0, 4.0, 2);
    FAIL("expected SupercriticalQ");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SupercriticalQ);
    CHECK(std::string(e.what()).find("supercritical q: q=4, p*_s=4") != std::string::npos);
  }
  CHECK_THROWS_AS(FracParams::make(1.0, 2.0, 2.0, 2), Error);
  CHECK_THROWS_AS(FracParams::make(0.5, 1.0, 2.0, 2), Error);
  CHECK_THROWS_AS(FracParams::make(0.5, 2.0, 0.5, 2), Error);
}

TEST_CASE("kernel weights and tail") {
  const Grid g = square_grid(8, 1.0);
  const double h = g.spacing;
  const KernelTable K = build_kernel(g, FracParams::make(0.5, 2.0, 2.0, 2), 2.0);
  CHECK(K.weight(g.index(2, 3), g.index(3, 3)) == doctest::Approx(h).epsilon(1e-14));
  CHECK(K.weight({0, 0, 0}) == 0.0);
  CHECK(K.pad_cells()[0] == 4);
  CHECK(K.padded_grid().counts[0] == 16);

  BruteForce bf{K};
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    CHECK(rel(K.tail(i), bf.tail(i)) <= 1e-13);
  }
  // Radial exterior integral: 2 pi rho^{-sp} / (sp).
  CHECK(tail_coefficient(2.0, FracParams::make(0.5, 2.0, 2.0, 2)) ==
        doctest::Approx(2.0 * M_PI / 2.0).epsilon(1e-14));
  const FracParams fp = FracParams::make(0.4, 3.0, 2.0, 2);
  CHECK(tail_coefficient(3.0, fp) / tail_coefficient(1.5, fp) ==
        doctest::Approx(std::pow(2.0, -1.2)).epsilon(1e-14));
  // Doubling the padding factor doubles the padded half-width of an even grid.
  const KernelTable K4 = build_kernel(g, fp, 4.0);
  CHECK(K4.padded_grid().counts[0] == 2 * K.padded_grid().counts[0]);
}

TEST_CASE("padding sum matches direct summation") {
  const Grid g = Grid::make(2, {-1.0, -0.5, 0}, 0.25, {8, 4, 1});
  const KernelTable K = build_kernel(g, FracParams::make(0.3, 3.0, 2.0, 2), 2.0);
  BruteForce bf{K};
  const Grid& P = K.padded_grid();
  const auto pc = K.pad_cells();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    double s = 0.0;
    for (std::size_t b = 0; b < P.cell_count(); ++b) {
      const auto c = P.coords(b);
      const bool inGrid = c[0] >= pc[0] && c[0] < pc[0] + g.counts[0] && c[1] >= pc[1] &&
                          c[1] < pc[1] + g.counts[1];
      if (!inGrid) s += bf.w(g.center(i), P.center(b));
    }
    CHECK(rel(K.padding_sum(i), s) <= 1e-12);
  }
}

TEST_CASE("seminorm against the brute-force double sum") {
  const Grid g = square_grid(10, 1.0);
  const DomainMask m = rasterize(make_ball({0.05, -0.1, 0}, 0.8), g);
  for (double s : {0.3, 0.7}) {
    for (double p : {2.0, 3.0, 2.5}) {
      const KernelTable K = build_kernel(g, FracParams::make(s, p, 2.0, 2), 2.0);
      const GridFunction u = random_positive(m, 17);
      BruteForce bf{K};
      CHECK(rel(seminorm_p(u, K), bf.energy(u)) <= 1e-11);
    }
  }
}

TEST_CASE("single-cell indicator energy") {
  const Grid g = square_grid(12, 1.0);
  const KernelTable K = build_kernel(g, FracParams::make(0.5, 2.0, 2.0, 2), 2.0);
  const std::size_t i = g.index(4, 7);
  DomainMask m = DomainMask::empty(g);
  m.inside[i] = 1;
  GridFunction u = GridFunction::zeros(m);
  u.values[i] = 1.0;
  BruteForce bf{K};
  const Grid& P = K.padded_grid();
  double rowSum = 0.0;
  for (std::size_t b = 0; b < P.cell_count(); ++b) {
    const Point y = P.center(b), x = g.center(i);
    if (std::hypot(x[0] - y[0], x[1] - y[1]) < 1e-9) continue;
    rowSum += bf.w(x, y);
  }
  const double expected = 2.0 * rowSum + 2.0 * K.tail(i) * g.cell_volume();
  CHECK(rel(seminorm_p(u, K), expected) <= 1e-12);

  // p = 2 flux of the indicator.
  const std::vector<double> v = apply_fplap(u, K);
  const double dv = g.cell_volume();
  CHECK(rel(v[i], rowSum / dv + K.tail(i)) <= 1e-12);
  for (std::size_t j : {g.index(0, 0), g.index(5, 7), g.index(11, 2)}) {
    CHECK(rel(v[j], -K.weight(i, j) / dv) <= 1e-12);
  }
}

TEST_CASE("seminorm basics") {
  const Grid g = square_grid(12, 1.0);
  const DomainMask m = rasterize(make_annulus(0.9, 0.2, {0.1, 0, 0}), g);
  const KernelTable K = build_kernel(g, FracParams::make(0.6, 3.0, 2.0, 2), 2.0);
  CHECK(seminorm_p(GridFunction::zeros(m), K) == 0.0);
  const GridFunction u = random_positive(m, 4);
  GridFunction cu = u;
  for (auto& x : cu.values) x *= -2.5;
  CHECK(rel(seminorm_p(cu, K), std::pow(2.5, 3.0) * seminorm_p(u, K)) <= 1e-12);
}

TEST_CASE("fractional p-Laplacian against brute force") {
  const Grid g = square_grid(8, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.9), g);
  for (double p : {2.0, 3.0, 2.5}) {
    const KernelTable K = build_kernel(g, FracParams::make(0.5, p, 2.0, 2), 2.0);
    const GridFunction u = random_positive(m, 9);
    const std::vector<double> v = apply_fplap(u, K);
    const std::vector<double> ref = BruteForce{K}.flux(u);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(std::fabs(v[i] - ref[i]) <= 1e-11 * (std::fabs(ref[i]) + 1.0));
    }
    GridFunction neg = u;
    for (auto& x : neg.values) x = -x;
    const std::vector<double> vn = apply_fplap(neg, K);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(vn[i] == -v[i]);
    const std::vector<double> zero = apply_fplap(GridFunction::zeros(m), K);
    CHECK(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0.0; }));
  }
}

TEST_CASE("Rayleigh quotient") {
  const Grid g = square_grid(12, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.9), g);
  const KernelTable K = build_kernel(g, FracParams::make(0.5, 2.0, 3.0, 2), 2.0);
  const GridFunction u = random_positive(m, 21);
  const double r = rayleigh(u, K, 3.0);
  for (double c : {0.5, 3.0, -2.0}) {
    GridFunction cu = u;
    for (auto& x : cu.values) x *= c;
    CHECK(rel(rayleigh(cu, K, 3.0), r) <= 1e-12);
  }
  // Sign-changing function: |u| does not increase the quotient.
  GridFunction w = u;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    if (g.center(i)[0] > 0.1) w.values[i] = -w.values[i];
  }
  GridFunction a = w;
  for (auto& x : a.values) x = std::fabs(x);
  CHECK(rayleigh(a, K, 3.0) <= rayleigh(w, K, 3.0));
  try {
    rayleigh(GridFunction::zeros(m), K, 3.0);
    FAIL("expected ZeroFunction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroFunction);
  }
}

TEST_CASE("gradient matches central finite differences") {
  const Grid g = square_grid(12, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.95), g);
  CaseGenerator gen(77);
  for (double p : {2.0, 3.0}) {
    for (double q : {2.0, 3.0}) {
      const KernelTable K = build_kernel(g, FracParams::make(0.5, p, q, 2), 2.0);
      for (int c = 0; c < 4; ++c) {
        const GridFunction u = random_positive(m, 100 + c);
        std::vector<double> dir(u.values.size(), 0.0);
        for (std::size_t i = 0; i < dir.size(); ++i) {
          if (m[i]) dir[i] = gen.uniform(-1.0, 1.0);
        }
        const std::vector<double> grad = gradient_rayleigh(u, K, q);
        double gd = 0.0, gu = 0.0;
        for (std::size_t i = 0; i < dir.size(); ++i) {
          gd += grad[i] * dir[i];
          gu += grad[i] * u.values[i];
        }
        const double eps = 1e-6;
        GridFunction up = u, um = u;
        for (std::size_t i = 0; i < dir.size(); ++i) {
          up.values[i] += eps * dir[i];
          um.values[i] -= eps * dir[i];
        }
        const double fd = (rayleigh(up, K, q) - rayleigh(um, K, q)) / (2.0 * eps);
        CHECK(std::fabs(fd - gd) <= 1e-5 * std::fabs(gd));
        // Zero-homogeneity: g(u) . u = 0.
        CHECK(std::fabs(gu) <= 1e-10 * rayleigh(u, K, q));
      }
    }
  }
  const KernelTable K15 = build_kernel(g, FracParams::make(0.5, 1.5, 1.5, 2), 2.0);
  try {
    gradient_rayleigh(random_positive(m, 1), K15, 1.5);
    FAIL("expected UnsupportedP");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedP);
  }
}

TEST_CASE("evaluation is independent of the thread count") {
  const Grid g = square_grid(24, 1.0);
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.9), g);
  const KernelTable K = build_kernel(g, FracParams::make(0.5, 3.0, 2.0, 2), 2.0);
  const GridFunction u = random_positive(m, 8);
  const unsigned saved = thread_count();
  set_thread_count(1);
  const double e1 = seminorm_p(u, K);
  const std::vector<double> v1 = apply_fplap(u, K);
  set_thread_count(4);
  const double e4 = seminorm_p(u, K);
  const std::vector<double> v4 = apply_fplap(u, K);
  set_thread_count(saved);
  CHECK(e1 == e4);
  CHECK(v1 == v4);
}

TEST_CASE("tree_sum is order-fixed") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + i);
  const double a = tree_sum(v);
  CHECK(a == tree_sum(v));
  double naive = 0.0;
  for (double x : v) naive += x;
  CHECK(a == doctest::Approx(naive).epsilon(1e-13));
  CHECK(tree_sum(std::vector<double>{}) == 0.0);
}
