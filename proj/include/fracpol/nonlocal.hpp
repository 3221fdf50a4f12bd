#pragma once

// Discrete Gagliardo seminorm, fractional p-Laplacian and Rayleigh quotient.
//
// Cells of the grid interact with every other cell of a padded box through
//   w_ij = |x_i - x_j|^{-(d+sp)} dV^2     (midpoint rule, i != j),
// and with the rest of R^d through a radial tail
//   tau_i = |S^{d-1}| rho_i^{-sp} / (sp),  rho_i = dist(x_i, padded boundary).
// The energy of u (zero outside the grid) is
//   E(u) = 2 sum_{i<j} w_ij |u_i - u_j|^p + 2 sum_i tau_i |u_i|^p dV,
// which is the p-th power of the seminorm.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fracpol/geometry.hpp"
#include "fracpol/rearrange.hpp"

namespace fracpol {

/// p*_s = dp/(d - sp) when sp < d, +inf otherwise.
double critical_exponent(double s, double p, int dim);
/// Surface measure of the unit sphere in R^d.
double unit_sphere_measure(int dim);

struct FracParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  int dim = 2;

  /// Throws InvalidParams (ranges) or SupercriticalQ (q >= p*_s).
  static FracParams make(double s, double p, double q, int dim);
  double sp() const { return s * p; }
  double critical() const { return critical_exponent(s, p, dim); }
};

/// Closed-form exterior integral of |x-y|^{-(d+sp)} beyond radius rho.
double tail_coefficient(double rho, const FracParams& fp);

class KernelTable {
 public:
  const Grid& grid() const { return grid_; }
  const FracParams& params() const { return params_; }
  double pad_factor() const { return pad_factor_; }
  /// Extra cells on each side of the grid, per axis.
  const std::array<int, 3>& pad_cells() const { return pad_cells_; }
  const Grid& padded_grid() const { return padded_; }

  /// Pair weight for a cell offset (zero at the origin).
  double weight(const std::array<int, 3>& offset) const;
  /// Pair weight between two grid cells.
  double weight(std::size_t i, std::size_t j) const;
  double tail(std::size_t i) const { return tail_[i]; }
  double rho(std::size_t i) const { return rho_[i]; }
  /// Sum of w_ij over padded-box cells j outside the grid.
  double padding_sum(std::size_t i) const { return padding_sum_[i]; }

 private:
  friend KernelTable build_kernel(const Grid&, const FracParams&, double);

  Grid grid_;
  Grid padded_;
  FracParams params_;
  double pad_factor_ = 2.0;
  std::array<int, 3> pad_cells_{0, 0, 0};
  std::array<int, 3> extent_{1, 1, 1};  // offset table size per axis
  std::vector<double> offset_weights_;
  std::vector<double> tail_;
  std::vector<double> rho_;
  std::vector<double> padding_sum_;
};

/// The padded box is padFactor times the grid box (rounded up to whole
/// cells), centred on it.
KernelTable build_kernel(const Grid& g, const FracParams& fp, double padFactor = 2.0);

/// Kernel restricted to the cells of one support mask, stored as dense
/// rows for the pair kernels. Cells outside the mask contribute through the
/// per-cell coefficient kappa_i = sum_{j not in mask} w_ij / dV + tau_i.
class DomainOperator {
 public:
  DomainOperator(const KernelTable& K, const DomainMask& mask);

  std::size_t size() const { return cells_.size(); }
  const std::vector<std::size_t>& cells() const { return cells_; }
  const DomainMask& mask() const { return mask_; }
  double cell_volume() const { return dv_; }
  double p() const { return p_; }
  double kappa(std::size_t a) const { return kappa_[a]; }
  /// Dense row of w_ij / dV for active cell a, padded with zeros.
  std::span<const double> row(std::size_t a) const {
    return {w_.data() + a * stride_, stride_};
  }
  /// max_a (sum_b w_ab / dV + kappa_a).
  double max_row_sum() const { return max_row_sum_; }

  struct Evaluation {
    double energy = 0.0;
    std::vector<double> flux;  // fractional p-Laplacian at active cells
  };
  Evaluation evaluate(std::span<const double> u) const;

  std::vector<double> gather(const GridFunction& u) const;
  GridFunction scatter(std::span<const double> u) const;

 private:
  DomainMask mask_;
  std::vector<std::size_t> cells_;
  std::size_t stride_ = 0;
  std::vector<double> w_;
  std::vector<double> kappa_;
  double dv_ = 1.0;
  double p_ = 2.0;
  double max_row_sum_ = 0.0;
};

/// E(u) = [u]^p_{s,p}.
double seminorm_p(const GridFunction& u, const KernelTable& K);
/// Fractional p-Laplacian at every grid cell.
std::vector<double> apply_fplap(const GridFunction& u, const KernelTable& K);
/// E(u) / ||u||_q^p; ZeroFunction when u vanishes.
double rayleigh(const GridFunction& u, const KernelTable& K, double q);
/// Gradient of the Rayleigh quotient with respect to every grid value.
/// Requires p >= 2 (UnsupportedP).
std::vector<double> gradient_rayleigh(const GridFunction& u, const KernelTable& K, double q);

}  // namespace fracpol
