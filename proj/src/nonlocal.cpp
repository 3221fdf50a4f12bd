#include "fracpol/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracpol/error.hpp"
#include "fracpol/reduce.hpp"
#include "fracpol/simd.hpp"

namespace fracpol {

double critical_exponent(double s, double p, int dim) {
  const double sp = s * p;
  if (sp >= dim) return std::numeric_limits<double>::infinity();
  return dim * p / (dim - sp);
}

double unit_sphere_measure(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw Error(ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
}

FracParams FracParams::make(double s, double p, double q, int dim) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidParams, "s must lie in (0,1)");
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidParams, "p must lie in (1,inf)");
  }
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::InvalidParams, "q must lie in [1,inf)");
  }
  if (dim < 1 || dim > 3) throw Error(ErrorKind::InvalidParams, "dimension must be 1, 2 or 3");
  const double crit = critical_exponent(s, p, dim);
  if (q >= crit) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "supercritical q: q=" << q << ", p*_s=" << crit;
    throw Error(ErrorKind::SupercriticalQ, msg.str());
  }
  return FracParams{s, p, q, dim};
}

double tail_coefficient(double rho, const FracParams& fp) {
  return unit_sphere_measure(fp.dim) * std::pow(rho, -fp.sp()) / fp.sp();
}

// ---------------------------------------------------------------- kernel

double KernelTable::weight(const std::array<int, 3>& o) const {
  std::size_t idx = 0;
  for (int k = 2; k >= 0; --k) {
    const int half = (extent_[k] - 1) / 2;
    if (o[k] < -half || o[k] > half) {
      throw Error(ErrorKind::InvalidArgument, "offset outside the padded box");
    }
    idx = idx * extent_[k] + static_cast<std::size_t>(o[k] + half);
  }
  return offset_weights_[idx];
}

double KernelTable::weight(std::size_t i, std::size_t j) const {
  const auto a = grid_.coords(i), b = grid_.coords(j);
  return weight({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

KernelTable build_kernel(const Grid& g, const FracParams& fp, double padFactor) {
  if (!(padFactor >= 1.0) || !std::isfinite(padFactor)) {
    throw Error(ErrorKind::InvalidParams, "padFactor must be >= 1");
  }
  if (fp.dim != g.dim) {
    throw Error(ErrorKind::InvalidParams, "parameter dimension does not match the grid");
  }
  KernelTable K;
  K.grid_ = g;
  K.params_ = fp;
  K.pad_factor_ = padFactor;

  std::array<int, 3> padded{1, 1, 1};
  Point porigin = g.origin;
  for (int k = 0; k < g.dim; ++k) {
    const double extra = (padFactor - 1.0) * g.counts[k] / 2.0;
    K.pad_cells_[k] = static_cast<int>(std::ceil(extra - 1e-9));
    padded[k] = g.counts[k] + 2 * K.pad_cells_[k];
    porigin[k] = g.origin[k] - K.pad_cells_[k] * g.spacing;
    K.extent_[k] = 2 * padded[k] - 1;
  }
  K.padded_ = Grid::make(g.dim, porigin, g.spacing, padded);

  const double dv = g.cell_volume();
  const double expo = -(g.dim + fp.sp());
  const double scale = std::pow(g.spacing, expo) * dv * dv;
  const std::size_t tableSize =
      static_cast<std::size_t>(K.extent_[0]) * K.extent_[1] * K.extent_[2];
  K.offset_weights_.assign(tableSize, 0.0);
  for (std::size_t idx = 0; idx < tableSize; ++idx) {
    std::size_t rem = idx;
    double r2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int half = (K.extent_[k] - 1) / 2;
      const int o = static_cast<int>(rem % K.extent_[k]) - half;
      rem /= K.extent_[k];
      r2 += static_cast<double>(o) * o;
    }
    if (r2 > 0.0) K.offset_weights_[idx] = std::pow(r2, 0.5 * expo) * scale;
  }

  const std::size_t n = g.cell_count();
  K.tail_.resize(n);
  K.rho_.resize(n);
  K.padding_sum_.resize(n);
  const Point plo = K.padded_.box_lo(), phi = K.padded_.box_hi();
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = g.center(i);
    double rho = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.dim; ++k) rho = std::min({rho, x[k] - plo[k], phi[k] - x[k]});
    K.rho_[i] = rho;
    K.tail_[i] = tail_coefficient(rho, fp);
  }

  // Interaction of each grid cell with the padding ring.
  const Grid& pg = K.padded_;
  std::vector<std::size_t> ring;
  for (std::size_t j = 0; j < pg.cell_count(); ++j) {
    const auto c = pg.coords(j);
    bool inGrid = true;
    for (int k = 0; k < g.dim; ++k) {
      const int local = c[k] - K.pad_cells_[k];
      if (local < 0 || local >= g.counts[k]) inGrid = false;
    }
    if (!inGrid) ring.push_back(j);
  }
  parallel_for(n, [&](std::size_t i) {
    auto ci = g.coords(i);
    for (int k = 0; k < g.dim; ++k) ci[k] += K.pad_cells_[k];
    std::vector<double> terms(ring.size());
    for (std::size_t r = 0; r < ring.size(); ++r) {
      const auto cj = pg.coords(ring[r]);
      terms[r] = K.weight({ci[0] - cj[0], ci[1] - cj[1], ci[2] - cj[2]});
    }
    K.padding_sum_[i] = tree_sum(terms);
  });
  return K;
}

// -------------------------------------------------------------- operator

namespace {

double kernel_g(double t, double p) {
  if (p == 2.0) return t;
  if (p == 3.0) return t * std::fabs(t);
  return t == 0.0 ? 0.0 : std::pow(std::fabs(t), p - 2.0) * t;
}

double abs_pow(double t, double p) {
  const double a = std::fabs(t);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

}  // namespace

DomainOperator::DomainOperator(const KernelTable& K, const DomainMask& mask)
    : mask_(mask), dv_(K.grid().cell_volume()), p_(K.params().p) {
  const Grid& g = K.grid();
  if (!(mask.grid == g)) throw Error(ErrorKind::GridMismatch, "mask grid differs from kernel grid");
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (mask.inside[i]) cells_.push_back(i);
  }
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (!mask.inside[i]) outside.push_back(i);
  }
  const std::size_t n = cells_.size();
  stride_ = simd::padded_length(n);
  w_.assign(n * stride_, 0.0);
  kappa_.assign(n, 0.0);
  std::vector<double> rowSums(n, 0.0);
  const double invDv = 1.0 / dv_;
  parallel_for(n, [&](std::size_t a) {
    const std::size_t i = cells_[a];
    double* row = w_.data() + a * stride_;
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a) row[b] = K.weight(i, cells_[b]) * invDv;
    }
    std::vector<double> ext(outside.size() + 1);
    for (std::size_t o = 0; o < outside.size(); ++o) ext[o] = K.weight(i, outside[o]);
    ext[outside.size()] = K.padding_sum(i);
    kappa_[a] = tree_sum(ext) * invDv + K.tail(i);
    rowSums[a] = tree_sum(std::span<const double>(row, n)) + kappa_[a];
  });
  for (double r : rowSums) max_row_sum_ = std::max(max_row_sum_, r);
}

DomainOperator::Evaluation DomainOperator::evaluate(std::span<const double> u) const {
  const std::size_t n = cells_.size();
  if (u.size() != n) throw Error(ErrorKind::GridMismatch, "vector length differs from operator");
  std::vector<double> padded(stride_, 0.0);
  std::copy(u.begin(), u.end(), padded.begin());
  const simd::PowerKind kind = simd::power_kind(p_);
  Evaluation ev;
  ev.flux.assign(n, 0.0);
  std::vector<double> energyTerms(n, 0.0);
  parallel_for(n, [&](std::size_t a) {
    const simd::RowSums rs =
        simd::pair_row(w_.data() + a * stride_, padded.data(), stride_, u[a], kind, p_);
    ev.flux[a] = rs.flux + kappa_[a] * kernel_g(u[a], p_);
    energyTerms[a] = rs.energy + 2.0 * kappa_[a] * abs_pow(u[a], p_);
  });
  ev.energy = tree_sum(energyTerms) * dv_;
  return ev;
}

std::vector<double> DomainOperator::gather(const GridFunction& u) const {
  std::vector<double> v(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) v[a] = u.values[cells_[a]];
  return v;
}

GridFunction DomainOperator::scatter(std::span<const double> u) const {
  GridFunction f = GridFunction::zeros(mask_);
  for (std::size_t a = 0; a < cells_.size(); ++a) f.values[cells_[a]] = u[a];
  return f;
}

// ------------------------------------------------------------ public ops

namespace {

void require_grid(const GridFunction& u, const KernelTable& K) {
  if (!(u.grid == K.grid()) || !(u.support.grid == K.grid()) ||
      u.values.size() != K.grid().cell_count()) {
    throw Error(ErrorKind::GridMismatch, "function grid differs from kernel grid");
  }
}

}  // namespace

double seminorm_p(const GridFunction& u, const KernelTable& K) {
  require_grid(u, K);
  const DomainOperator op(K, u.support);
  return op.evaluate(op.gather(u)).energy;
}

std::vector<double> apply_fplap(const GridFunction& u, const KernelTable& K) {
  require_grid(u, K);
  const DomainOperator op(K, u.support);
  const std::vector<double> active = op.gather(u);
  const auto ev = op.evaluate(active);
  const Grid& g = K.grid();
  const double p = K.params().p;
  const double invDv = 1.0 / g.cell_volume();
  std::vector<double> v(g.cell_count(), 0.0);
  for (std::size_t a = 0; a < op.size(); ++a) v[op.cells()[a]] = ev.flux[a];
  // Cells outside the support see only the support values.
  parallel_for(g.cell_count(), [&](std::size_t i) {
    if (u.support.inside[i]) return;
    std::vector<double> terms(op.size());
    for (std::size_t a = 0; a < op.size(); ++a) {
      terms[a] = K.weight(i, op.cells()[a]) * invDv * kernel_g(-active[a], p);
    }
    v[i] = tree_sum(terms);
  });
  return v;
}

double rayleigh(const GridFunction& u, const KernelTable& K, double q) {
  require_grid(u, K);
  const double nq = norm_q(u, q);
  if (!(nq > 0.0)) throw Error(ErrorKind::ZeroFunction, "Rayleigh quotient of the zero function");
  return seminorm_p(u, K) / std::pow(nq, K.params().p);
}

std::vector<double> gradient_rayleigh(const GridFunction& u, const KernelTable& K, double q) {
  require_grid(u, K);
  const double p = K.params().p;
  if (p < 2.0) {
    throw Error(ErrorKind::UnsupportedP, "gradient requires p >= 2");
  }
  const double nq = norm_q(u, q);
  if (!(nq > 0.0)) throw Error(ErrorKind::ZeroFunction, "gradient of the zero function");
  const double dv = K.grid().cell_volume();
  const double energy = seminorm_p(u, K);
  const std::vector<double> flux = apply_fplap(u, K);
  const double N = std::pow(nq, p);
  const double nqq = std::pow(nq, q);
  std::vector<double> g(flux.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ui = u.values[i];
    const double dualQ = ui == 0.0 ? 0.0 : std::pow(std::fabs(ui), q - 2.0) * ui;
    g[i] = (2.0 * p / N) * flux[i] * dv - (p * energy / N) * dualQ * dv / nqq;
  }
  return g;
}

}  // namespace fracpol
