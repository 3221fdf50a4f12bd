#pragma once

// Halfspace/reflection algebra, analytic shapes, rasterization to cell masks
// and polarization of masks.
//
// Masks live on a uniform cell grid. Mask-level operations accept only
// grid-compatible polarizers (axis-aligned, hyperplane on a cell face or a
// cell center), so every discrete identity below holds exactly.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace fracpol {

using Point = std::array<double, 3>;

double dot(const Point& a, const Point& b);
double norm(const Point& a);

/// Open affine halfspace {x : x.h < a}.
struct Polarizer {
  Point h{1.0, 0.0, 0.0};
  double a = 0.0;

  /// Validates |h| = 1 within 1e-12.
  static Polarizer make(const Point& h, double a);
  bool contains(const Point& x) const { return dot(x, h) < a; }
};

Point reflect_point(const Point& x, const Polarizer& H);

struct Grid {
  int dim = 2;
  Point origin{0.0, 0.0, 0.0};
  double spacing = 1.0;
  std::array<int, 3> counts{1, 1, 1};

  static constexpr std::size_t kMaxCells = std::size_t{1} << 20;

  /// Validates dim, spacing, counts and the desk-scale cell budget.
  static Grid make(int dim, const Point& origin, double spacing,
                   std::array<int, 3> counts);

  std::size_t cell_count() const {
    return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  }
  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(counts[0]) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(counts[1]) * k);
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Point center(std::size_t idx) const;
  double cell_volume() const;
  Point box_lo() const { return origin; }
  Point box_hi() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Mirror of cell indices across a grid-compatible hyperplane along `axis`:
/// index i maps to `twice_plane - 1 - i`, where `twice_plane` is 2(b-o)/spacing.
struct CellMirror {
  int axis = 0;
  long twice_plane = 0;
  bool h_positive = true;  // true: H = {x_axis < b}; false: H = {x_axis > b}

  long mirror(long i) const { return twice_plane - 1 - i; }
  /// -1: cell in H, 0: on the hyperplane, +1: in the complement.
  int side(long i) const;
};

bool grid_compatible(const Polarizer& H, const Grid& g);
/// Throws IncompatiblePolarizer when `H` is not grid-compatible.
CellMirror cell_mirror(const Polarizer& H, const Grid& g);

// ---------------------------------------------------------------- shapes

struct ShapeSpec;
using ShapePtr = std::shared_ptr<const ShapeSpec>;

struct Ball {
  Point center{};
  double radius = 0.0;
};

/// B_R(0) minus the closed ball B_r(holeCenter).
struct Annulus {
  double R = 1.0;
  double r = 0.0;
  Point holeCenter{};
};

/// Axis lengths `semi`, rotated by `angle` in the x1-x2 plane.
struct Ellipse {
  Point center{};
  Point semi{1.0, 1.0, 1.0};
  double angle = 0.0;
};

/// Axis-aligned box of half-widths `half`, rotated by `angle` in the x1-x2 plane.
struct Box {
  Point center{};
  Point half{1.0, 1.0, 1.0};
  double angle = 0.0;
};

/// `outer` minus the closure of `hole`.
struct Difference {
  ShapePtr outer;
  ShapePtr hole;
};

struct ShapeSpec {
  std::variant<Ball, Annulus, Ellipse, Box, Difference> shape;
};

ShapeSpec make_ball(const Point& center, double radius);
ShapeSpec make_annulus(double R, double r, const Point& holeCenter);
ShapeSpec make_ellipse(const Point& center, const Point& semi, double angle = 0.0);
ShapeSpec make_box(const Point& center, const Point& half, double angle = 0.0);
ShapeSpec make_difference(ShapeSpec outer, ShapeSpec hole);

/// Throws InvalidArgument on non-positive lengths or an annulus hole that
/// is not strictly inside B_R(0).
void validate(const ShapeSpec& s, int dim);

bool contains_open(const ShapeSpec& s, const Point& x, int dim);
bool contains_closed(const ShapeSpec& s, const Point& x, int dim);
std::pair<Point, Point> bounding_box(const ShapeSpec& s, int dim);

ShapeSpec translated(const ShapeSpec& s, const Point& offset);
/// Rotation by `theta` about `pivot` in the x1-x2 plane.
ShapeSpec rotated(const ShapeSpec& s, const Point& pivot, double theta);

// ----------------------------------------------------------------- masks

struct DomainMask {
  Grid grid;
  std::vector<std::uint8_t> inside;

  static DomainMask empty(const Grid& g) {
    return {g, std::vector<std::uint8_t>(g.cell_count(), 0)};
  }
  std::size_t count() const;
  bool any() const { return count() > 0; }
  bool operator[](std::size_t i) const { return inside[i] != 0; }

  friend bool operator==(const DomainMask&, const DomainMask&) = default;
};

/// Open-set membership of cell centers; throws ShapeOutsideGrid when the
/// shape's bounding box leaves the grid box.
DomainMask rasterize(const ShapeSpec& s, const Grid& g);
/// Closed-set membership (used for hole masks).
DomainMask rasterize_closed(const ShapeSpec& s, const Grid& g);

DomainMask complement(const DomainMask& m);
DomainMask intersection(const DomainMask& a, const DomainMask& b);
DomainMask set_union(const DomainMask& a, const DomainMask& b);
DomainMask difference(const DomainMask& a, const DomainMask& b);
bool is_subset(const DomainMask& a, const DomainMask& b);
/// Grows the mask by one cell in every direction (including diagonals).
DomainMask dilate(const DomainMask& m);

// Cells whose mirror falls outside the grid pair with `outside`.
DomainMask reflect_mask(const DomainMask& m, const Polarizer& H, bool outside = false);
DomainMask polarize_mask(const DomainMask& m, const Polarizer& H, bool outside = false);
DomainMask dual_polarize_mask(const DomainMask& m, const Polarizer& H, bool outside = false);

/// A_H = sigma_H(m) & ~m & H and B_H = m & sigma_H(~m) & H.
std::pair<DomainMask, DomainMask> witness_sets(const DomainMask& m, const Polarizer& H);

bool is_polarization_invariant(const DomainMask& m, const Polarizer& H);
/// True when every cell of `m` has its mirror inside the grid.
bool mirrors_within_grid(const DomainMask& m, const Polarizer& H);

// Text format: header `dims n1 [n2 [n3]] spacing o1 [o2 [o3]]`, then one
// row of 0/1 characters per x1-line, x2 (then x3) increasing.
void write_mask_text(std::ostream& os, const DomainMask& m);
DomainMask read_mask_text(std::istream& is);

}  // namespace fracpol
