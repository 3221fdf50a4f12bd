#include "fracpol/properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracpol/nonlocal.hpp"

namespace fracpol {

void PropertyReport::record(const std::string& name, bool ok) {
  auto it = std::find_if(tallies.begin(), tallies.end(),
                         [&](const PropertyTally& t) { return t.name == name; });
  if (it == tallies.end()) {
    tallies.push_back({name, 0, 0});
    it = std::prev(tallies.end());
  }
  (ok ? it->passed : it->failed) += 1;
}

std::size_t PropertyReport::failures() const {
  std::size_t f = 0;
  for (const auto& t : tallies) f += t.failed;
  return f;
}

std::string PropertyReport::transcript() const {
  std::ostringstream os;
  for (const auto& t : tallies) {
    os << "PROP " << t.name << " passed=" << t.passed << " failed=" << t.failed << '\n';
  }
  return os.str();
}

void PropertyReport::merge(const PropertyReport& other) {
  for (const auto& t : other.tallies) {
    for (std::size_t k = 0; k < t.passed; ++k) record(t.name, true);
    for (std::size_t k = 0; k < t.failed; ++k) record(t.name, false);
  }
}

// ------------------------------------------------------------- generator

double CaseGenerator::uniform(double lo, double hi) {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

int CaseGenerator::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng_() % span);
}

namespace {

Point grid_center(const Grid& g) {
  Point c{0, 0, 0};
  for (int k = 0; k < g.dim; ++k) c[k] = g.origin[k] + 0.5 * g.counts[k] * g.spacing;
  return c;
}

}  // namespace

DomainMask CaseGenerator::random_ball_union(const Grid& g, double extent) {
  const Point c0 = grid_center(g);
  DomainMask m = DomainMask::empty(g);
  const int balls = integer(1, 4);
  for (int b = 0; b < balls; ++b) {
    const double r = uniform(0.12 * extent, 0.4 * extent);
    Point c = c0;
    for (int k = 0; k < g.dim; ++k) c[k] += uniform(-extent + r, extent - r);
    m = set_union(m, rasterize(make_ball(c, r), g));
  }
  return m;
}

GridFunction CaseGenerator::random_nonneg_function(const DomainMask& support) {
  GridFunction u = GridFunction::zeros(support);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double v = uniform(-0.3, 1.0);
    if (support.inside[i]) u.values[i] = std::max(0.0, v);
  }
  return u;
}

Polarizer CaseGenerator::random_compatible_polarizer(const Grid& g, double reach) {
  const int axis = integer(0, g.dim - 1);
  const bool positive = integer(0, 1) == 1;
  const int halfSteps = static_cast<int>(std::floor(reach / (0.5 * g.spacing) + 1e-9));
  const int k = integer(-halfSteps, halfSteps);
  const double plane = grid_center(g)[axis] + 0.5 * g.spacing * k;
  Point h{0, 0, 0};
  h[axis] = positive ? 1.0 : -1.0;
  return Polarizer{h, positive ? plane : -plane};
}

Grid square_grid(int n, double half) {
  return Grid::make(2, {-half, -half, 0.0}, 2.0 * half / n, {n, n, 1});
}

// --------------------------------------------------------------- oracles

namespace {

// Mirror index found from reflected point coordinates, independent of the
// integer bookkeeping used by the mask operations. npos when outside.
std::size_t mirror_by_point(const Grid& g, std::size_t i, const Polarizer& H) {
  const Point y = reflect_point(g.center(i), H);
  std::array<int, 3> c{0, 0, 0};
  for (int k = 0; k < g.dim; ++k) {
    const double f = (y[k] - g.origin[k]) / g.spacing - 0.5;
    const long idx = std::lround(f);
    if (idx < 0 || idx >= g.counts[k]) return static_cast<std::size_t>(-1);
    c[k] = static_cast<int>(idx);
  }
  return g.index(c[0], c[1], c[2]);
}

// sigma_H(m) & H subset of m, evaluated on cell-center coordinates.
bool invariant_by_points(const DomainMask& m, const Polarizer& H) {
  const Grid& g = m.grid;
  const double tol = 1e-9 * g.spacing;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (!(dot(g.center(i), H.h) < H.a - tol)) continue;
    const std::size_t j = mirror_by_point(g, i, H);
    if (j != static_cast<std::size_t>(-1) && m.inside[j] && !m.inside[i]) return false;
  }
  return true;
}

}  // namespace

PropertyReport run_set_identity_suite(std::uint64_t seed, int cases, int polarizersPerCase,
                                      int gridSize) {
  CaseGenerator gen(seed);
  const Grid g = square_grid(gridSize, 1.0);
  PropertyReport rep;
  for (int c = 0; c < cases; ++c) {
    // Shapes inside [-1/2, 1/2]^2 and hyperplanes within 1/4 of the center
    // keep every mirrored cell of the shape inside the grid.
    const DomainMask m = gen.random_ball_union(g, 0.5);
    const DomainMask ballMask = gen.random_ball_union(g, 0.5);
    for (int k = 0; k < polarizersPerCase; ++k) {
      const Polarizer H = gen.random_compatible_polarizer(g, 0.25);
      const DomainMask pm = polarize_mask(m, H);
      const DomainMask dm = dual_polarize_mask(m, H);
      const DomainMask rm = reflect_mask(m, H);

      rep.record("mirrors-within-grid", mirrors_within_grid(m, H));
      rep.record("reflect-involution", reflect_mask(rm, H) == m);
      rep.record("polarize-idempotent", polarize_mask(pm, H) == pm);
      rep.record("polarize-reflection-invariant", polarize_mask(rm, H) == pm);
      rep.record("dual-equals-reflected-polarization", dm == reflect_mask(pm, H));
      rep.record("complement-duality",
                 polarize_mask(complement(m), H, true) == complement(dm));

      const bool invariant = is_polarization_invariant(m, H);
      rep.record("invariance-criterion",
                 invariant == (pm == m) && invariant == invariant_by_points(m, H));

      // Hole rule: o and sigma_H(o) inside m.
      const DomainMask o = intersection(intersection(ballMask, m), rm);
      const bool holeOk = is_subset(o, m) && is_subset(reflect_mask(o, H), m);
      rep.record("hole-rule", holeOk && polarize_mask(difference(m, o), H) ==
                                            difference(pm, dual_polarize_mask(o, H)));

      const auto [A, B] = witness_sets(m, H);
      if (!(pm == m) && !(pm == rm)) {
        rep.record("witness-sets-nonempty", A.any() && B.any());
      } else if (pm == m) {
        rep.record("witness-A-empty-when-invariant", !A.any());
      }
      rep.record("cell-count-preserved", pm.count() == m.count() && dm.count() == m.count());
    }
  }
  return rep;
}

PropertyReport run_annulus_family_suite() {
  const double R = 1.0, r = 0.3;
  const Grid g = Grid::make(2, {-1.2, -1.2, 0.0}, 0.05, {48, 48, 1});
  PropertyReport rep;
  const DomainMask outer = rasterize(make_ball({0, 0, 0}, R), g);
  auto omega = [&](double t) { return rasterize(make_annulus(R, r, {t, 0, 0}), g); };

  for (int ti = 0; ti <= 6; ++ti) {
    const double t = 0.1 * ti;
    const DomainMask om = omega(t);
    const DomainMask hole = rasterize_closed(make_ball({t, 0, 0}, r), g);
    const DomainMask ball = rasterize(make_ball({t, 0, 0}, r), g);
    // Hyperplanes x1 = a on half-cell positions in [0, (R - r + t)/2).
    for (int k = 0;; ++k) {
      const double a = 0.025 * k;
      if (!(a < 0.5 * (R - r + t))) break;
      const Polarizer H{{1, 0, 0}, a};
      if (t >= a) {
        const DomainMask expect = rasterize(make_ball({2 * a - t, 0, 0}, r), g);
        rep.record("ball-moves-when-center-beyond-plane", polarize_mask(ball, H) == expect);
      } else {
        rep.record("ball-fixed-when-center-before-plane", polarize_mask(ball, H) == ball);
      }
      rep.record("ball-invariant-iff-center-before-plane",
                 is_polarization_invariant(ball, H) == (t <= a || ball == reflect_mask(ball, H)));
      rep.record("reflected-hole-inside-outer", is_subset(reflect_mask(hole, H), outer));
      const DomainMask pm = polarize_mask(om, H);
      if (a <= t) {
        rep.record("annulus-fixed-for-a-up-to-t", pm == om);
      } else {
        rep.record("annulus-hole-moves-to-2a-minus-t", pm == omega(2 * a - t));
        rep.record("annulus-not-invariant-beyond-t", !is_polarization_invariant(om, H));
      }
    }
  }
  return rep;
}

PropertyReport run_rearrangement_suite(std::uint64_t seed, int cases, int gridSize) {
  CaseGenerator gen(seed);
  const Grid g = square_grid(gridSize, 1.0);
  PropertyReport rep;
  for (int c = 0; c < cases; ++c) {
    const DomainMask support = gen.random_ball_union(g, 0.5);
    const GridFunction u = gen.random_nonneg_function(support);
    GridFunction v = u;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      if (support.inside[i]) v.values[i] += gen.uniform(0.0, 0.5);
    }
    const Polarizer H = gen.random_compatible_polarizer(g, 0.25);
    const GridFunction pu = polarize_function(u, H);
    const GridFunction pv = polarize_function(v, H);

    for (double q : {1.0, 2.0, 3.5}) {
      const double a = norm_q(u, q), b = norm_q(pu, q);
      rep.record("norm-preserved", std::fabs(a - b) <= 1e-12 * a);
    }
    std::vector<double> x = u.values, y = pu.values;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    rep.record("equimeasurable", x == y);

    const DomainMask pmask = polarize_mask(support, H);
    bool supportOk = pu.support == pmask;
    for (std::size_t i = 0; i < pu.values.size(); ++i) {
      if (pu.values[i] > 0.0 && !pmask.inside[i]) supportOk = false;
    }
    rep.record("support-contained", supportOk);

    bool ordered = true;
    for (std::size_t i = 0; i < pu.values.size(); ++i) {
      if (pu.values[i] > pv.values[i]) ordered = false;
    }
    rep.record("order-preserved", ordered);
    rep.record("idempotent", polarize_function(pu, H) == pu);
  }
  return rep;
}

PropertyReport run_polya_szego_suite(std::uint64_t seed, int cases, int gridSize,
                                     const std::vector<double>& sValues,
                                     const std::vector<double>& pValues, double padFactor) {
  CaseGenerator gen(seed);
  const Grid g = square_grid(gridSize, 1.0);
  std::vector<KernelTable> kernels;
  std::vector<std::string> labels;
  for (double s : sValues)
    for (double p : pValues) {
      kernels.push_back(build_kernel(g, FracParams::make(s, p, 1.0, 2), padFactor));
      std::ostringstream name;
      name << "seminorm-decreases(s=" << s << ",p=" << p << ")";
      labels.push_back(name.str());
    }
  PropertyReport rep;
  for (int c = 0; c < cases; ++c) {
    const DomainMask support = gen.random_ball_union(g, 1.0);
    const GridFunction u = gen.random_nonneg_function(support);
    // Hyperplanes through the box center: x_k = 0 with either orientation.
    const int axis = gen.integer(0, 1);
    Point h{0, 0, 0};
    h[axis] = gen.integer(0, 1) ? 1.0 : -1.0;
    const Polarizer H{h, 0.0};
    const GridFunction pu = polarize_function(u, H);
    for (double q : {1.0, 2.0, 3.5}) {
      const double a = norm_q(u, q), b = norm_q(pu, q);
      rep.record("norm-preserved", std::fabs(a - b) <= 1e-12 * a);
    }
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const double e0 = seminorm_p(u, kernels[k]);
      const double e1 = seminorm_p(pu, kernels[k]);
      rep.record(labels[k], e1 <= e0 + 1e-12 * e0);
    }
  }
  return rep;
}

}  // namespace fracpol
