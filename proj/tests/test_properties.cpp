#include <doctest.h>

#include "fracpol/properties.hpp"

using namespace fracpol;

TEST_CASE("set identities on a small batch") {
  const PropertyReport r = run_set_identity_suite(3, 20, 5, 32);
  INFO(r.transcript());
  CHECK(r.ok());
  CHECK(r.tallies.size() >= 9);
}

TEST_CASE("annulus family") {
  const PropertyReport r = run_annulus_family_suite();
  INFO(r.transcript());
  CHECK(r.ok());
}

TEST_CASE("function rearrangement on a small batch") {
  const PropertyReport r = run_rearrangement_suite(5, 20, 16);
  INFO(r.transcript());
  CHECK(r.ok());
}

TEST_CASE("seminorm decreases under polarization") {
  const PropertyReport r = run_polya_szego_suite(9, 10, 12, {0.3, 0.8}, {2.0, 3.0});
  INFO(r.transcript());
  CHECK(r.ok());
}

TEST_CASE("transcripts are reproducible and seed-dependent") {
  const std::string a = run_set_identity_suite(42, 10, 4, 32).transcript();
  CHECK(a == run_set_identity_suite(42, 10, 4, 32).transcript());
  CHECK(a.rfind("PROP ", 0) == 0);
  CaseGenerator g1(1), g2(1), g3(2);
  const Grid grid = square_grid(32, 1.0);
  const DomainMask m1 = g1.random_ball_union(grid, 0.5);
  CHECK(m1 == g2.random_ball_union(grid, 0.5));
  CHECK(m1.any());
  CHECK_FALSE(m1 == g3.random_ball_union(grid, 0.5));
}

TEST_CASE("report bookkeeping") {
  PropertyReport r;
  r.record("a", true);
  r.record("a", false);
  r.record("b", true);
  CHECK(r.failures() == 1);
  CHECK(r.transcript() == "PROP a passed=1 failed=1\nPROP b passed=1 failed=0\n");
  PropertyReport s;
  s.record("b", true);
  r.merge(s);
  CHECK(r.tallies[1].passed == 2);
}

TEST_CASE("random polarizers are grid-compatible and stay near the center") {
  CaseGenerator gen(8);
  const Grid g = square_grid(32, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Polarizer H = gen.random_compatible_polarizer(g, 0.25);
    CHECK(grid_compatible(H, g));
    CHECK(std::abs(H.a) <= 0.25 + 1e-12);
  }
}
