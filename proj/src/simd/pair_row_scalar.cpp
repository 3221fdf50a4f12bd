#include <cmath>

#include "fracpol/simd.hpp"

namespace fracpol::simd::detail {

namespace {

inline double kernel_g(double t, PowerKind kind, double p) {
  switch (kind) {
    case PowerKind::Square: return t;
    case PowerKind::Cube: return t * std::fabs(t);
    case PowerKind::General: return t == 0.0 ? 0.0 : std::pow(std::fabs(t), p - 2.0) * t;
  }
  return 0.0;
}

}  // namespace

RowSums pair_row_scalar(const double* w, const double* u, std::size_t n, double ui,
                        PowerKind kind, double p) {
  double flux[kLanes] = {0.0, 0.0, 0.0, 0.0};
  double energy[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n; j += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double t = ui - u[j + l];
      const double wg = w[j + l] * kernel_g(t, kind, p);
      flux[l] = flux[l] + wg;
      energy[l] = energy[l] + wg * t;
    }
  }
  return {(flux[0] + flux[1]) + (flux[2] + flux[3]),
          (energy[0] + energy[1]) + (energy[2] + energy[3])};
}

}  // namespace fracpol::simd::detail
