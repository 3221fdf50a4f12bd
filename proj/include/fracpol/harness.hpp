#pragma once

// Experiment drivers: hole translation/rotation sweeps, the Faber-Krahn
// check under polarization, a comparison-principle diagnostic and the
// CSV/SVG emitters.

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracpol/eigensolver.hpp"
#include "fracpol/geometry.hpp"
#include "fracpol/nonlocal.hpp"

namespace fracpol {

struct TranslateE1 {};

/// Rotation of the hole about `point`; the ray point + R^+ axis is the
/// symmetry ray of outer and hole.
struct RotateAbout {
  Point point{};
  Point axis{1.0, 0.0, 0.0};
};

using SweepMode = std::variant<TranslateE1, RotateAbout>;

struct SweepConfig {
  ShapeSpec outer;
  ShapeSpec hole;
  SweepMode mode = TranslateE1{};
  std::vector<double> samples;
  Grid grid;
  SolverParams solver;
  int seeds = 3;
  double padFactor = 2.0;
};

struct SweepRow {
  double param = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double gradNorm = 0.0;
  bool converged = false;
};

enum class VerdictKind { StrictlyMonotone, Violated, Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::StrictlyMonotone;
  std::size_t index = 0;  // first offending pair (Violated / Inconclusive)
};

std::string to_string(VerdictKind kind);

struct SweepReport {
  std::string mode;  // "sweep-t" or "sweep-rot"
  std::vector<SweepRow> rows;
  Verdict verdict;
  /// Smallest step in the expected direction; +inf with fewer than two rows.
  double margin = std::numeric_limits<double>::infinity();
  bool all_converged() const;
};

/// Classifies consecutive differences against eps_strict. `increasing`
/// selects the expected direction.
SweepReport classify(std::string mode, std::vector<SweepRow> rows, bool increasing,
                     double tolRel);

/// Hole translated by t e1 for every sample; lambda must decrease strictly.
SweepReport sweep_translation(const SweepConfig& cfg);
/// Hole rotated about the mode's point; lambda must increase strictly.
SweepReport sweep_rotation(const SweepConfig& cfg);

/// Mask of outer minus the closed hole; throws HoleEscapesDomain unless the
/// hole cells keep a one-cell gap inside the outer mask.
DomainMask hole_domain_mask(const ShapeSpec& outer, const ShapeSpec& hole, const Grid& g);

/// Steiner symmetry about {x1 = 0}: P_a(M) = M for grid-compatible a >= 0
/// and P^a(M) = M for a <= 0.
bool is_steiner_symmetric_e1(const DomainMask& m);
/// Foliated Schwarz symmetry about the ray a + R^+ eta, tested on a fan of
/// eight polarizers whose boundary contains a. Grid-compatible members are
/// checked on the mask; the others on the analytic shape at cell centers.
bool is_foliated_schwarz_symmetric(const ShapeSpec& s, const DomainMask& m, const Point& a,
                                   const Point& eta, bool closedShape);

struct FaberKrahnRecord {
  double lambdaOmega = 0.0;
  double rayleighPolarized = 0.0;
  /// NaN unless strictExpected.
  double lambdaPolarized = std::numeric_limits<double>::quiet_NaN();
  bool strictExpected = false;
  bool nonStrictHolds = false;
  bool strictHolds = false;
  bool pass = false;
  bool converged = false;
  double epsStrict = 0.0;
};

/// True when the padded box of K is mapped onto itself by sigma_H.
bool padded_box_symmetric(const KernelTable& K, const Polarizer& H);

FaberKrahnRecord faber_krahn_check(const DomainMask& m, const Polarizer& H,
                                   const KernelTable& K, const SolverParams& sp, int seeds = 3);

struct ComparisonDiagnostic {
  std::size_t zeroCells = 0;
  std::size_t posCells = 0;
  double minGap = std::numeric_limits<double>::infinity();
  double fractionZero = 1.0;
};

ComparisonDiagnostic comparison_diagnostic(const GridFunction& u, const DomainMask& m,
                                           const Polarizer& H);

void emit_csv(const SweepReport& report, const std::string& path);
void emit_svg(const SweepReport& report, const std::string& path);
std::string csv_text(const SweepReport& report);
std::string svg_text(const SweepReport& report);

}  // namespace fracpol
