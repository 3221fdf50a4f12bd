#include "fracpol/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "fracpol/error.hpp"
#include "fracpol/reduce.hpp"

namespace fracpol {

GridFunction GridFunction::zeros(const DomainMask& support) {
  return {support.grid, support, std::vector<double>(support.grid.cell_count(), 0.0)};
}

GridFunction GridFunction::make(const DomainMask& support, std::vector<double> values) {
  if (values.size() != support.grid.cell_count()) {
    throw Error(ErrorKind::InvalidArgument, "value count does not match the grid");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::InvalidArgument, "grid function values must be finite");
    }
    if (!support.inside[i] && values[i] != 0.0) {
      throw Error(ErrorKind::InvalidArgument, "grid function must vanish outside its support");
    }
  }
  return {support.grid, support, std::move(values)};
}

bool GridFunction::is_nonnegative() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
}

double GridFunction::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

GridFunction polarize_function(const GridFunction& u, const Polarizer& H) {
  const Grid& g = u.grid;
  const CellMirror cm = cell_mirror(H, g);
  if (!u.is_nonnegative()) {
    throw Error(ErrorKind::NegativeInput, "polarization requires a nonnegative function");
  }
  GridFunction r{g, polarize_mask(u.support, H), std::vector<double>(g.cell_count(), 0.0)};
  // Pairs are visited once, from the H-side cell, in lexicographic order.
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.coords(i);
    const int side = cm.side(c[cm.axis]);
    if (side == 0) {
      r.values[i] = u.values[i];
      continue;
    }
    if (side > 0) {
      const long mi = cm.mirror(c[cm.axis]);
      // Complement-side cells whose mirror is outside pair with zero.
      if (mi < 0 || mi >= g.counts[cm.axis]) r.values[i] = std::min(u.values[i], 0.0);
      continue;
    }
    const long mi = cm.mirror(c[cm.axis]);
    if (mi < 0 || mi >= g.counts[cm.axis]) {
      r.values[i] = std::max(u.values[i], 0.0);
      continue;
    }
    c[cm.axis] = static_cast<int>(mi);
    const std::size_t j = g.index(c[0], c[1], c[2]);
    r.values[i] = std::max(u.values[i], u.values[j]);
    r.values[j] = std::min(u.values[i], u.values[j]);
  }
  return r;
}

double norm_q(std::span<const double> values, double dv, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::InvalidArgument, "norm exponent q must lie in [1, inf)");
  }
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = std::abs(values[i]);
    terms[i] = q == 1.0 ? a : (q == 2.0 ? a * a : std::pow(a, q));
  }
  const double s = tree_sum(terms) * dv;
  return q == 1.0 ? s : (q == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / q));
}

double norm_q(const GridFunction& u, double q) {
  return norm_q(u.values, u.grid.cell_volume(), q);
}

void write_function_text(std::ostream& os, const GridFunction& u) {
  write_mask_text(os, u.support);
  char buf[40];
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (!u.support.inside[i]) continue;
    std::snprintf(buf, sizeof buf, "%.17g", u.values[i]);
    os << buf << '\n';
  }
}

GridFunction read_function_text(std::istream& is) {
  DomainMask m = read_mask_text(is);
  std::vector<double> values(m.grid.cell_count(), 0.0);
  std::string token;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!m.inside[i]) continue;
    if (!(is >> token)) throw Error(ErrorKind::ParseError, "function body: missing value");
    try {
      values[i] = std::stod(token);
    } catch (...) {
      throw Error(ErrorKind::ParseError, "function body: bad value '" + token + "'");
    }
  }
  return GridFunction::make(m, std::move(values));
}

}  // namespace fracpol
