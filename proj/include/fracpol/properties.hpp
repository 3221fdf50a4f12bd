#pragma once

// Randomized property suites for mask polarization, function polarization
// and the discrete Polya-Szego inequality. Every suite is a pure function of
// its seed.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fracpol/geometry.hpp"
#include "fracpol/rearrange.hpp"

namespace fracpol {

struct PropertyTally {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct PropertyReport {
  std::vector<PropertyTally> tallies;

  void record(const std::string& name, bool ok);
  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
  /// One `PROP <name> passed=<n> failed=<m>` line per property.
  std::string transcript() const;
  void merge(const PropertyReport& other);
};

/// Deterministic sampling helpers shared by the suites and tests.
class CaseGenerator {
 public:
  explicit CaseGenerator(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi);
  int integer(int lo, int hi);  // inclusive
  /// Union of 1-4 balls fully inside [-extent, extent]^2.
  DomainMask random_ball_union(const Grid& g, double extent);
  /// Clamped random field on `support`: values U(-0.3, 1) clipped at zero.
  GridFunction random_nonneg_function(const DomainMask& support);
  /// Axis-aligned polarizer whose hyperplane lies on a half-cell position
  /// within [-reach, reach] of the grid center.
  Polarizer random_compatible_polarizer(const Grid& g, double reach);

 private:
  std::mt19937_64 rng_;
};

/// Square 2-D grid [-half, half]^2 with n cells per side.
Grid square_grid(int n, double half);

/// Polarization identities (involution, idempotence, duality, complement,
/// hole rule, invariance criterion, witness sets, cell-count preservation)
/// on random ball unions.
PropertyReport run_set_identity_suite(std::uint64_t seed, int cases = 200,
                                      int polarizersPerCase = 10, int gridSize = 32);

/// Polarization of balls and of the eccentric annulus family on a 48x48
/// grid over [-1.2, 1.2]^2 (R = 1, r = 0.3).
PropertyReport run_annulus_family_suite();

/// Function polarization: norm preservation, support, order, idempotence,
/// equimeasurability.
PropertyReport run_rearrangement_suite(std::uint64_t seed, int cases = 100, int gridSize = 24);

/// seminorm_p(P_H u) <= seminorm_p(u) for polarizers through the padded-box
/// center, over the given (s, p) grid.
PropertyReport run_polya_szego_suite(std::uint64_t seed, int cases, int gridSize,
                                     const std::vector<double>& sValues,
                                     const std::vector<double>& pValues,
                                     double padFactor = 2.0);

}  // namespace fracpol
