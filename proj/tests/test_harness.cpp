#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracpol/error.hpp"
#include "fracpol/harness.hpp"

using namespace fracpol;

namespace {

const Grid kGrid48 = Grid::make(2, {-1.2, -1.2, 0}, 0.05, {48, 48, 1});

SweepConfig annulus_sweep(std::vector<double> samples) {
  SweepConfig c;
  c.outer = make_ball({0, 0, 0}, 1.0);
  c.hole = make_ball({0, 0, 0}, 0.3);
  c.samples = std::move(samples);
  c.grid = kGrid48;
  c.solver.fp = FracParams::make(0.5, 2.0, 2.0, 2);
  return c;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::InvalidArgument;
}

SweepRow row(double t, double lambda) { return {t, lambda, 10, 1e-8, true}; }

}  // namespace

TEST_CASE("classify") {
  const double tol = 1e-9;
  SweepReport r = classify("sweep-t", {row(0.2, 9.0), row(0.0, 10.0), row(0.1, 9.5)}, false, tol);
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);
  CHECK(r.rows.front().param == 0.0);
  CHECK(r.margin == doctest::Approx(0.5).epsilon(1e-12));

  r = classify("sweep-t", {row(0.0, 10.0), row(0.1, 10.0 - 1e-7), row(0.2, 9.0)}, false, tol);
  CHECK(r.verdict.kind == VerdictKind::Inconclusive);
  CHECK(r.verdict.index == 0);

  r = classify("sweep-t", {row(0.0, 10.0), row(0.1, 10.0 - 1e-7), row(0.2, 11.0)}, false, tol);
  CHECK(r.verdict.kind == VerdictKind::Violated);
  CHECK(r.verdict.index == 1);

  r = classify("sweep-rot", {row(0.0, 1.0), row(1.0, 2.0)}, true, tol);
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);

  r = classify("sweep-t", {row(0.3, 5.0)}, false, tol);
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);
  CHECK(std::isinf(r.margin));
}

TEST_CASE("translation sweep on the eccentric annulus") {
  const SweepReport r = sweep_translation(annulus_sweep({0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
  CHECK(r.mode == "sweep-t");
  CHECK(r.rows.size() == 7);
  CHECK(r.all_converged());
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);
  CHECK(r.margin > 0.0);
}

TEST_CASE("single-sample sweep is vacuously monotone") {
  const SweepReport r = sweep_translation(annulus_sweep({0.2}));
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);
  CHECK(std::isinf(r.margin));
}

TEST_CASE("square hole in an ellipse") {
  SweepConfig c = annulus_sweep({0.0, 0.1, 0.2, 0.3});
  c.outer = make_ellipse({0, 0, 0}, {1.1, 0.8, 1});
  c.hole = make_box({0, 0, 0}, {0.2, 0.2, 1});
  const SweepReport r = sweep_translation(c);
  CHECK(r.all_converged());
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);
}

TEST_CASE("sweep preconditions") {
  SweepConfig c = annulus_sweep({0.0, 0.8});
  CHECK(kind_of([&] { sweep_translation(c); }) == ErrorKind::HoleEscapesDomain);
  c = annulus_sweep({0.0, 0.1});
  c.hole = make_ball({0.1, 0, 0}, 0.3);
  CHECK(kind_of([&] { sweep_translation(c); }) == ErrorKind::AsymmetricInput);
  c = annulus_sweep({0.0});
  c.mode = RotateAbout{{0, 0, 0}, {1, 0, 0}};
  c.hole = make_ball({0.4, 0.1, 0}, 0.25);
  CHECK(kind_of([&] { sweep_rotation(c); }) == ErrorKind::AsymmetricInput);
}

TEST_CASE("symmetry checks") {
  CHECK(is_steiner_symmetric_e1(rasterize(make_ball({0, 0.2, 0}, 0.7), kGrid48)));
  CHECK(is_steiner_symmetric_e1(rasterize(make_ellipse({0, 0, 0}, {1.1, 0.8, 1}), kGrid48)));
  // Sections of an annulus are not intervals.
  CHECK_FALSE(is_steiner_symmetric_e1(rasterize(make_annulus(1.0, 0.3, {0, 0, 0}), kGrid48)));
  CHECK_FALSE(is_steiner_symmetric_e1(rasterize(make_ball({0.2, 0, 0}, 0.7), kGrid48)));
  const ShapeSpec hole = make_ball({0.4, 0, 0}, 0.25);
  CHECK(is_foliated_schwarz_symmetric(hole, rasterize_closed(hole, kGrid48), {0, 0, 0},
                                      {1, 0, 0}, true));
  const ShapeSpec off = make_ball({0.4, 0.1, 0}, 0.25);
  CHECK_FALSE(is_foliated_schwarz_symmetric(off, rasterize_closed(off, kGrid48), {0, 0, 0},
                                            {1, 0, 0}, true));
}

TEST_CASE("rotation sweep samples") {
  SweepConfig c = annulus_sweep({0.0});
  c.mode = RotateAbout{{0, 0, 0}, {1, 0, 0}};
  c.hole = make_ball({0.4, 0, 0}, 0.25);
  const SweepReport r = sweep_rotation(c);
  CHECK(r.mode == "sweep-rot");
  CHECK(r.verdict.kind == VerdictKind::StrictlyMonotone);
  CHECK(std::isinf(r.margin));

  // theta = pi and theta = 0 mirror each other about x1 = 0 on this grid.
  c.samples = {0.0, M_PI};
  const SweepReport both = sweep_rotation(c);
  CHECK(both.rows[0].lambda == doctest::Approx(both.rows[1].lambda).epsilon(1e-10));
}

TEST_CASE("Faber-Krahn under polarization") {
  const FracParams fp = FracParams::make(0.5, 2.0, 2.0, 2);
  SolverParams sp;
  sp.fp = fp;

  SUBCASE("strict drop") {
    // Grid centred on the hyperplane x1 = 0.2.
    const Grid g = Grid::make(2, {-1.0, -1.2, 0}, 0.05, {48, 48, 1});
    const KernelTable K = build_kernel(g, fp, 2.0);
    const Polarizer H = Polarizer::make({1, 0, 0}, 0.2);
    REQUIRE(padded_box_symmetric(K, H));
    const DomainMask m = rasterize(make_annulus(1.0, 0.3, {0.1, 0, 0}), g);
    CHECK(polarize_mask(m, H) == rasterize(make_annulus(1.0, 0.3, {0.3, 0, 0}), g));
    const FaberKrahnRecord rec = faber_krahn_check(m, H, K, sp);
    CHECK(rec.converged);
    CHECK(rec.strictExpected);
    CHECK(rec.nonStrictHolds);
    CHECK(rec.strictHolds);
    CHECK(rec.pass);
    CHECK(rec.lambdaPolarized < rec.lambdaOmega - rec.epsStrict);

    const EigenResult base = solve(m, K, sp);
    const ComparisonDiagnostic d = comparison_diagnostic(base.u, m, H);
    CHECK(d.posCells > 0);
  }

  SUBCASE("invariant domain") {
    const Grid g = Grid::make(2, {-1.15, -1.2, 0}, 0.05, {48, 48, 1});
    const KernelTable K = build_kernel(g, fp, 2.0);
    const Polarizer H = Polarizer::make({1, 0, 0}, 0.05);
    const DomainMask m = rasterize(make_annulus(1.0, 0.3, {0.1, 0, 0}), g);
    const FaberKrahnRecord rec = faber_krahn_check(m, H, K, sp);
    CHECK_FALSE(rec.strictExpected);
    CHECK(std::isnan(rec.lambdaPolarized));
    CHECK(std::fabs(rec.rayleighPolarized - rec.lambdaOmega) <= 1e-12 * rec.lambdaOmega);
    CHECK(rec.pass);
  }

  SUBCASE("ball centred on the hyperplane") {
    const Grid g = Grid::make(2, {-1.2, -1.2, 0}, 0.1, {24, 24, 1});
    const KernelTable K = build_kernel(g, fp, 2.0);
    const Polarizer H = Polarizer::make({1, 0, 0}, 0.0);
    const DomainMask m = rasterize(make_ball({0, 0.1, 0}, 0.8), g);
    const FaberKrahnRecord rec = faber_krahn_check(m, H, K, sp);
    CHECK_FALSE(rec.strictExpected);
    CHECK(rec.nonStrictHolds);
    CHECK(rec.pass);
    const EigenResult base = solve(m, K, sp);
    CHECK(comparison_diagnostic(base.u, m, H).posCells == 0);
  }

  SUBCASE("asymmetric padded box is rejected") {
    const KernelTable K = build_kernel(kGrid48, fp, 2.0);
    const DomainMask m = rasterize(make_annulus(1.0, 0.3, {0.1, 0, 0}), kGrid48);
    CHECK(kind_of([&] { faber_krahn_check(m, Polarizer::make({1, 0, 0}, 0.2), K, sp); }) ==
          ErrorKind::IncompatiblePolarizer);
  }
}

TEST_CASE("comparison diagnostic on symmetric data") {
  const Grid g = Grid::make(2, {-1.0, -1.0, 0}, 0.1, {20, 20, 1});
  const DomainMask m = rasterize(make_ball({0, 0, 0}, 0.9), g);
  GridFunction u = GridFunction::zeros(m);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (m[i]) u.values[i] = 1.0 - std::hypot(g.center(i)[0], g.center(i)[1]);
  }
  const ComparisonDiagnostic d = comparison_diagnostic(u, m, Polarizer::make({1, 0, 0}, 0.0));
  CHECK(d.fractionZero == 1.0);
  CHECK(d.posCells == 0);
}

TEST_CASE("CSV and SVG output") {
  const SweepReport one = classify("sweep-t", {row(0.0, 3.5)}, false, 1e-9);
  const std::string csv = csv_text(one);
  CHECK(csv == "param,lambda,iterations,gradNorm,converged\n0,3.5,10,1e-08,1\n");

  std::vector<SweepRow> rows;
  for (int k = 0; k < 7; ++k) rows.push_back(row(0.1 * k, 10.0 - k));
  const SweepReport seven = classify("sweep-t", rows, false, 1e-9);
  CHECK(csv_text(seven) == csv_text(classify("sweep-t", rows, false, 1e-9)));
  const std::string svg = svg_text(seven);
  CHECK(svg.find("<svg") != std::string::npos);
  const auto start = svg.find("points=\"");
  REQUIRE(start != std::string::npos);
  const auto end = svg.find('"', start + 8);
  const std::string pts = svg.substr(start + 8, end - start - 8);
  CHECK(std::count(pts.begin(), pts.end(), ',') == 7);
  CHECK(svg == svg_text(seven));
}
