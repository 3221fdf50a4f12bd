#include "fracpol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fracpol/error.hpp"

namespace fracpol {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IncompatiblePolarizer: return "IncompatiblePolarizer";
    case ErrorKind::ShapeOutsideGrid: return "ShapeOutsideGrid";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ZeroFunction: return "ZeroFunction";
    case ErrorKind::UnsupportedP: return "UnsupportedP";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::SupercriticalQ: return "SupercriticalQ";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::HoleEscapesDomain: return "HoleEscapesDomain";
    case ErrorKind::AsymmetricInput: return "AsymmetricInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Polarizer Polarizer::make(const Point& h, double a) {
  if (std::abs(norm(h) - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "polarizer direction must be a unit vector");
  }
  if (!std::isfinite(a)) {
    throw Error(ErrorKind::InvalidArgument, "polarizer offset must be finite");
  }
  return Polarizer{h, a};
}

Point reflect_point(const Point& x, const Polarizer& H) {
  const double f = 2.0 * (dot(x, H.h) - H.a);
  return {x[0] - f * H.h[0], x[1] - f * H.h[1], x[2] - f * H.h[2]};
}

// ------------------------------------------------------------------ grid

Grid Grid::make(int dim, const Point& origin, double spacing, std::array<int, 3> counts) {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  }
  Grid g;
  g.dim = dim;
  g.spacing = spacing;
  for (int k = 0; k < 3; ++k) {
    if (k < dim) {
      if (counts[k] < 1) {
        throw Error(ErrorKind::InvalidArgument, "grid counts must be positive");
      }
      g.counts[k] = counts[k];
      g.origin[k] = origin[k];
    } else {
      g.counts[k] = 1;
      g.origin[k] = 0.0;
    }
  }
  const double total = static_cast<double>(g.counts[0]) * g.counts[1] * g.counts[2];
  if (total > static_cast<double>(kMaxCells)) {
    throw Error(ErrorKind::InvalidArgument, "grid exceeds 2^20 cells");
  }
  return g;
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
  std::array<int, 3> c{0, 0, 0};
  c[0] = static_cast<int>(idx % counts[0]);
  idx /= counts[0];
  c[1] = static_cast<int>(idx % counts[1]);
  c[2] = static_cast<int>(idx / counts[1]);
  return c;
}

Point Grid::center(std::size_t idx) const {
  const auto c = coords(idx);
  Point x{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) x[k] = origin[k] + (c[k] + 0.5) * spacing;
  return x;
}

double Grid::cell_volume() const { return std::pow(spacing, dim); }

Point Grid::box_hi() const {
  Point hi = origin;
  for (int k = 0; k < dim; ++k) hi[k] = origin[k] + counts[k] * spacing;
  return hi;
}

// --------------------------------------------------------- compatibility

namespace {

std::optional<CellMirror> try_cell_mirror(const Polarizer& H, const Grid& g) {
  int axis = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(H.h[k]) > 1e-12) {
      if (axis >= 0) return std::nullopt;
      axis = k;
    }
  }
  if (axis < 0 || axis >= g.dim) return std::nullopt;
  if (std::abs(std::abs(H.h[axis]) - 1.0) > 1e-12) return std::nullopt;
  const bool positive = H.h[axis] > 0.0;
  const double plane = positive ? H.a : -H.a;
  const double twice = 2.0 * (plane - g.origin[axis]) / g.spacing;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > 1e-9 * std::max(1.0, std::abs(twice))) return std::nullopt;
  return CellMirror{axis, static_cast<long>(rounded), positive};
}

}  // namespace

int CellMirror::side(long i) const {
  // Cell center sits at (i + 1/2) spacings; the hyperplane at twice_plane / 2.
  const long c = 2 * i + 1;
  if (c == twice_plane) return 0;
  const bool below = c < twice_plane;
  return (below == h_positive) ? -1 : 1;
}

bool grid_compatible(const Polarizer& H, const Grid& g) {
  return try_cell_mirror(H, g).has_value();
}

CellMirror cell_mirror(const Polarizer& H, const Grid& g) {
  auto m = try_cell_mirror(H, g);
  if (!m) {
    throw Error(ErrorKind::IncompatiblePolarizer,
                "polarizer does not map cell centers onto cell centers");
  }
  return *m;
}

// ---------------------------------------------------------------- shapes

ShapeSpec make_ball(const Point& center, double radius) { return {Ball{center, radius}}; }

ShapeSpec make_annulus(double R, double r, const Point& holeCenter) {
  return {Annulus{R, r, holeCenter}};
}

ShapeSpec make_ellipse(const Point& center, const Point& semi, double angle) {
  return {Ellipse{center, semi, angle}};
}

ShapeSpec make_box(const Point& center, const Point& half, double angle) {
  return {Box{center, half, angle}};
}

ShapeSpec make_difference(ShapeSpec outer, ShapeSpec hole) {
  return {Difference{std::make_shared<const ShapeSpec>(std::move(outer)),
                     std::make_shared<const ShapeSpec>(std::move(hole))}};
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double dist(const Point& a, const Point& b) {
  return norm(Point{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

// Coordinates of x in the body frame of a shape rotated by `angle` in x1-x2.
Point to_local(const Point& x, const Point& c, double angle) {
  Point d{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
  if (angle == 0.0) return d;
  const double cs = std::cos(angle), sn = std::sin(angle);
  return {cs * d[0] + sn * d[1], -sn * d[0] + cs * d[1], d[2]};
}

enum class Closure { Open, Closed };

bool member(const ShapeSpec& s, const Point& x, int dim, Closure cl) {
  const bool closed = cl == Closure::Closed;
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            const double d = dist(x, b.center);
            return closed ? d <= b.radius : d < b.radius;
          },
          [&](const Annulus& a) {
            const double dOuter = norm(x);
            const double dHole = dist(x, a.holeCenter);
            return closed ? (dOuter <= a.R && dHole >= a.r) : (dOuter < a.R && dHole > a.r);
          },
          [&](const Ellipse& e) {
            const Point l = to_local(x, e.center, e.angle);
            double acc = 0.0;
            for (int k = 0; k < dim; ++k) acc += (l[k] / e.semi[k]) * (l[k] / e.semi[k]);
            return closed ? acc <= 1.0 : acc < 1.0;
          },
          [&](const Box& b) {
            const Point l = to_local(x, b.center, b.angle);
            for (int k = 0; k < dim; ++k) {
              const double v = std::abs(l[k]);
              if (closed ? v > b.half[k] : v >= b.half[k]) return false;
            }
            return true;
          },
          [&](const Difference& d) {
            const Closure inv = closed ? Closure::Open : Closure::Closed;
            return member(*d.outer, x, dim, cl) && !member(*d.hole, x, dim, inv);
          },
      },
      s.shape);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive");
  }
}

}  // namespace

void validate(const ShapeSpec& s, int dim) {
  std::visit(Overloaded{
                 [&](const Ball& b) { require_positive(b.radius, "ball radius"); },
                 [&](const Annulus& a) {
                   require_positive(a.R, "annulus R");
                   require_positive(a.r, "annulus r");
                   if (!(norm(a.holeCenter) + a.r < a.R)) {
                     throw Error(ErrorKind::InvalidArgument,
                                 "annulus hole must lie strictly inside B_R(0)");
                   }
                 },
                 [&](const Ellipse& e) {
                   for (int k = 0; k < dim; ++k) require_positive(e.semi[k], "ellipse semi-axis");
                 },
                 [&](const Box& b) {
                   for (int k = 0; k < dim; ++k) require_positive(b.half[k], "box half-width");
                 },
                 [&](const Difference& d) {
                   if (!d.outer || !d.hole) {
                     throw Error(ErrorKind::InvalidArgument, "difference needs outer and hole");
                   }
                   validate(*d.outer, dim);
                   validate(*d.hole, dim);
                 },
             },
             s.shape);
}

bool contains_open(const ShapeSpec& s, const Point& x, int dim) {
  return member(s, x, dim, Closure::Open);
}

bool contains_closed(const ShapeSpec& s, const Point& x, int dim) {
  return member(s, x, dim, Closure::Closed);
}

std::pair<Point, Point> bounding_box(const ShapeSpec& s, int dim) {
  auto around = [dim](const Point& c, const Point& r) {
    Point lo{0, 0, 0}, hi{0, 0, 0};
    for (int k = 0; k < dim; ++k) {
      lo[k] = c[k] - r[k];
      hi[k] = c[k] + r[k];
    }
    return std::pair{lo, hi};
  };
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            return around(b.center, Point{b.radius, b.radius, b.radius});
          },
          [&](const Annulus& a) { return around(Point{0, 0, 0}, Point{a.R, a.R, a.R}); },
          [&](const Ellipse& e) {
            if (e.angle == 0.0 || dim < 2) return around(e.center, e.semi);
            const double cs = std::cos(e.angle), sn = std::sin(e.angle);
            Point r = e.semi;
            r[0] = std::hypot(e.semi[0] * cs, e.semi[1] * sn);
            r[1] = std::hypot(e.semi[0] * sn, e.semi[1] * cs);
            return around(e.center, r);
          },
          [&](const Box& b) {
            if (b.angle == 0.0 || dim < 2) return around(b.center, b.half);
            const double cs = std::abs(std::cos(b.angle)), sn = std::abs(std::sin(b.angle));
            Point r = b.half;
            r[0] = b.half[0] * cs + b.half[1] * sn;
            r[1] = b.half[0] * sn + b.half[1] * cs;
            return around(b.center, r);
          },
          [&](const Difference& d) { return bounding_box(*d.outer, dim); },
      },
      s.shape);
}

namespace {

Point add(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

Point rotate_about(const Point& x, const Point& pivot, double theta) {
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double dx = x[0] - pivot[0], dy = x[1] - pivot[1];
  return {pivot[0] + cs * dx - sn * dy, pivot[1] + sn * dx + cs * dy, x[2]};
}

}  // namespace

ShapeSpec translated(const ShapeSpec& s, const Point& offset) {
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return ShapeSpec{Ball{add(b.center, offset), b.radius}}; },
          [&](const Annulus& a) {
            // An annulus is anchored at the origin; translate it as a difference.
            return make_difference(make_ball(offset, a.R),
                                   make_ball(add(a.holeCenter, offset), a.r));
          },
          [&](const Ellipse& e) {
            return ShapeSpec{Ellipse{add(e.center, offset), e.semi, e.angle}};
          },
          [&](const Box& b) { return ShapeSpec{Box{add(b.center, offset), b.half, b.angle}}; },
          [&](const Difference& d) {
            return make_difference(translated(*d.outer, offset), translated(*d.hole, offset));
          },
      },
      s.shape);
}

ShapeSpec rotated(const ShapeSpec& s, const Point& pivot, double theta) {
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            return ShapeSpec{Ball{rotate_about(b.center, pivot, theta), b.radius}};
          },
          [&](const Annulus& a) {
            return make_difference(make_ball(rotate_about({0, 0, 0}, pivot, theta), a.R),
                                   make_ball(rotate_about(a.holeCenter, pivot, theta), a.r));
          },
          [&](const Ellipse& e) {
            return ShapeSpec{
                Ellipse{rotate_about(e.center, pivot, theta), e.semi, e.angle + theta}};
          },
          [&](const Box& b) {
            return ShapeSpec{Box{rotate_about(b.center, pivot, theta), b.half, b.angle + theta}};
          },
          [&](const Difference& d) {
            return make_difference(rotated(*d.outer, pivot, theta),
                                   rotated(*d.hole, pivot, theta));
          },
      },
      s.shape);
}

// ----------------------------------------------------------------- masks

std::size_t DomainMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

namespace {

DomainMask rasterize_impl(const ShapeSpec& s, const Grid& g, Closure cl) {
  validate(s, g.dim);
  const auto [lo, hi] = bounding_box(s, g.dim);
  const Point glo = g.box_lo(), ghi = g.box_hi();
  const double tol = 1e-12 * std::max(1.0, g.spacing * g.counts[0]);
  for (int k = 0; k < g.dim; ++k) {
    if (lo[k] < glo[k] - tol || hi[k] > ghi[k] + tol) {
      throw Error(ErrorKind::ShapeOutsideGrid, "shape bounding box leaves the grid box");
    }
  }
  DomainMask m = DomainMask::empty(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    m.inside[i] = member(s, g.center(i), g.dim, cl) ? 1 : 0;
  }
  return m;
}

void require_same_grid(const DomainMask& a, const DomainMask& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorKind::GridMismatch, "masks live on different grids");
}

// Visits every cell with its mirror index (or npos when outside the grid).
template <class F>
void for_each_pair(const Grid& g, const CellMirror& cm, F&& f) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.coords(i);
    const long mi = cm.mirror(c[cm.axis]);
    const int side = cm.side(c[cm.axis]);
    std::size_t j = npos;
    if (mi >= 0 && mi < g.counts[cm.axis]) {
      c[cm.axis] = static_cast<int>(mi);
      j = g.index(c[0], c[1], c[2]);
    }
    f(i, j, side);
  }
}

constexpr std::size_t kOutside = static_cast<std::size_t>(-1);

}  // namespace

DomainMask rasterize(const ShapeSpec& s, const Grid& g) {
  return rasterize_impl(s, g, Closure::Open);
}

DomainMask rasterize_closed(const ShapeSpec& s, const Grid& g) {
  return rasterize_impl(s, g, Closure::Closed);
}

DomainMask complement(const DomainMask& m) {
  DomainMask r = m;
  for (auto& v : r.inside) v = v ? 0 : 1;
  return r;
}

DomainMask intersection(const DomainMask& a, const DomainMask& b) {
  require_same_grid(a, b);
  DomainMask r = a;
  for (std::size_t i = 0; i < r.inside.size(); ++i) r.inside[i] = a.inside[i] & b.inside[i];
  return r;
}

DomainMask set_union(const DomainMask& a, const DomainMask& b) {
  require_same_grid(a, b);
  DomainMask r = a;
  for (std::size_t i = 0; i < r.inside.size(); ++i) r.inside[i] = a.inside[i] | b.inside[i];
  return r;
}

DomainMask difference(const DomainMask& a, const DomainMask& b) {
  require_same_grid(a, b);
  DomainMask r = a;
  for (std::size_t i = 0; i < r.inside.size(); ++i) {
    r.inside[i] = (a.inside[i] && !b.inside[i]) ? 1 : 0;
  }
  return r;
}

bool is_subset(const DomainMask& a, const DomainMask& b) {
  require_same_grid(a, b);
  for (std::size_t i = 0; i < a.inside.size(); ++i) {
    if (a.inside[i] && !b.inside[i]) return false;
  }
  return true;
}

DomainMask dilate(const DomainMask& m) {
  const Grid& g = m.grid;
  DomainMask r = DomainMask::empty(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (!m.inside[i]) continue;
    const auto c = g.coords(i);
    const int rz = g.dim > 2 ? 1 : 0, ry = g.dim > 1 ? 1 : 0;
    for (int dz = -rz; dz <= rz; ++dz)
      for (int dy = -ry; dy <= ry; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
          if (x < 0 || y < 0 || z < 0 || x >= g.counts[0] || y >= g.counts[1] ||
              z >= g.counts[2])
            continue;
          r.inside[g.index(x, y, z)] = 1;
        }
  }
  return r;
}

DomainMask reflect_mask(const DomainMask& m, const Polarizer& H, bool outside) {
  const CellMirror cm = cell_mirror(H, m.grid);
  DomainMask r = DomainMask::empty(m.grid);
  for_each_pair(m.grid, cm, [&](std::size_t i, std::size_t j, int) {
    r.inside[i] = j == kOutside ? outside : m.inside[j];
  });
  return r;
}

namespace {

DomainMask polarize_impl(const DomainMask& m, const Polarizer& H, bool outside, bool dual) {
  const CellMirror cm = cell_mirror(H, m.grid);
  DomainMask r = DomainMask::empty(m.grid);
  for_each_pair(m.grid, cm, [&](std::size_t i, std::size_t j, int side) {
    const bool self = m.inside[i] != 0;
    const bool other = j == kOutside ? outside : m.inside[j] != 0;
    if (side == 0) {
      r.inside[i] = self;
      return;
    }
    // Union lands on H for the polarization and on H^c for its dual.
    const bool unionSide = dual ? side > 0 : side < 0;
    r.inside[i] = unionSide ? (self || other) : (self && other);
  });
  return r;
}

}  // namespace

DomainMask polarize_mask(const DomainMask& m, const Polarizer& H, bool outside) {
  return polarize_impl(m, H, outside, false);
}

DomainMask dual_polarize_mask(const DomainMask& m, const Polarizer& H, bool outside) {
  return polarize_impl(m, H, outside, true);
}

std::pair<DomainMask, DomainMask> witness_sets(const DomainMask& m, const Polarizer& H) {
  const CellMirror cm = cell_mirror(H, m.grid);
  DomainMask a = DomainMask::empty(m.grid), b = DomainMask::empty(m.grid);
  for_each_pair(m.grid, cm, [&](std::size_t i, std::size_t j, int side) {
    if (side >= 0) return;
    const bool self = m.inside[i] != 0;
    const bool mirrored = j != kOutside && m.inside[j] != 0;
    a.inside[i] = (mirrored && !self) ? 1 : 0;
    b.inside[i] = (self && !mirrored) ? 1 : 0;
  });
  return {std::move(a), std::move(b)};
}

bool is_polarization_invariant(const DomainMask& m, const Polarizer& H) {
  const CellMirror cm = cell_mirror(H, m.grid);
  bool ok = true;
  for_each_pair(m.grid, cm, [&](std::size_t i, std::size_t j, int side) {
    if (side < 0 && j != kOutside && m.inside[j] && !m.inside[i]) ok = false;
  });
  return ok;
}

bool mirrors_within_grid(const DomainMask& m, const Polarizer& H) {
  const CellMirror cm = cell_mirror(H, m.grid);
  bool ok = true;
  for_each_pair(m.grid, cm, [&](std::size_t i, std::size_t j, int) {
    if (m.inside[i] && j == kOutside) ok = false;
  });
  return ok;
}

// ------------------------------------------------------------------- io

void write_mask_text(std::ostream& os, const DomainMask& m) {
  const Grid& g = m.grid;
  std::ostringstream header;
  header.precision(17);
  header << g.dim;
  for (int k = 0; k < g.dim; ++k) header << ' ' << g.counts[k];
  header << ' ' << g.spacing;
  for (int k = 0; k < g.dim; ++k) header << ' ' << g.origin[k];
  os << header.str() << '\n';
  std::string row(static_cast<std::size_t>(g.counts[0]), '0');
  for (int z = 0; z < g.counts[2]; ++z)
    for (int y = 0; y < g.counts[1]; ++y) {
      for (int x = 0; x < g.counts[0]; ++x) row[x] = m.inside[g.index(x, y, z)] ? '1' : '0';
      os << row << '\n';
    }
}

DomainMask read_mask_text(std::istream& is) {
  int dim = 0;
  if (!(is >> dim) || dim < 1 || dim > 3) {
    throw Error(ErrorKind::ParseError, "mask header: bad dimension");
  }
  std::array<int, 3> counts{1, 1, 1};
  Point origin{0, 0, 0};
  double spacing = 0.0;
  for (int k = 0; k < dim; ++k) is >> counts[k];
  is >> spacing;
  for (int k = 0; k < dim; ++k) is >> origin[k];
  if (!is) throw Error(ErrorKind::ParseError, "mask header: truncated");
  const Grid g = Grid::make(dim, origin, spacing, counts);
  DomainMask m = DomainMask::empty(g);
  std::string row;
  for (int z = 0; z < g.counts[2]; ++z)
    for (int y = 0; y < g.counts[1]; ++y) {
      if (!(is >> row) || row.size() != static_cast<std::size_t>(g.counts[0])) {
        throw Error(ErrorKind::ParseError, "mask body: bad row");
      }
      for (int x = 0; x < g.counts[0]; ++x) {
        if (row[x] != '0' && row[x] != '1') {
          throw Error(ErrorKind::ParseError, "mask body: expected 0/1");
        }
        m.inside[g.index(x, y, z)] = row[x] == '1' ? 1 : 0;
      }
    }
  return m;
}

}  // namespace fracpol
