#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "fracpol/geometry.hpp"

namespace fracpol {

/// Real values per cell, zero outside `support` (nonlocal Dirichlet condition).
struct GridFunction {
  Grid grid;
  DomainMask support;
  std::vector<double> values;

  /// Zero function on `support`.
  static GridFunction zeros(const DomainMask& support);
  /// Throws InvalidArgument on size mismatch, non-finite values or nonzero
  /// values outside the support.
  static GridFunction make(const DomainMask& support, std::vector<double> values);

  bool is_nonnegative() const;
  double max_value() const;

  friend bool operator==(const GridFunction&, const GridFunction&) = default;
};

/// Two-point rearrangement: max on the H side of each mirrored pair, min on
/// the other. Requires u >= 0 (NegativeInput otherwise).
GridFunction polarize_function(const GridFunction& u, const Polarizer& H);

/// (sum |u_i|^q dV)^(1/q) with a fixed-topology reduction.
double norm_q(const GridFunction& u, double q);
/// Same, on a raw value vector with cell volume `dv`.
double norm_q(std::span<const double> values, double dv, double q);

// Mask text block followed by one value per in-support cell, row-major,
// 17 significant digits.
void write_function_text(std::ostream& os, const GridFunction& u);
GridFunction read_function_text(std::istream& is);

}  // namespace fracpol
