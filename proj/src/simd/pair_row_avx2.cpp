// Compiled with -mavx2 only (no -mfma): products and sums must round exactly
// like the scalar reference.

#include "fracpol/simd.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace fracpol::simd::detail {

#if defined(__AVX2__)

bool avx2_compiled() { return true; }

RowSums pair_row_avx2(const double* w, const double* u, std::size_t n, double ui,
                      PowerKind kind, double p) {
  if (kind == PowerKind::General) return pair_row_scalar(w, u, n, ui, kind, p);

  const __m256d vui = _mm256_set1_pd(ui);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d flux = _mm256_setzero_pd();
  __m256d energy = _mm256_setzero_pd();
  if (kind == PowerKind::Square) {
    for (std::size_t j = 0; j < n; j += kLanes) {
      const __m256d t = _mm256_sub_pd(vui, _mm256_loadu_pd(u + j));
      const __m256d wg = _mm256_mul_pd(_mm256_loadu_pd(w + j), t);
      flux = _mm256_add_pd(flux, wg);
      energy = _mm256_add_pd(energy, _mm256_mul_pd(wg, t));
    }
  } else {
    for (std::size_t j = 0; j < n; j += kLanes) {
      const __m256d t = _mm256_sub_pd(vui, _mm256_loadu_pd(u + j));
      const __m256d g = _mm256_mul_pd(t, _mm256_andnot_pd(sign, t));
      const __m256d wg = _mm256_mul_pd(_mm256_loadu_pd(w + j), g);
      flux = _mm256_add_pd(flux, wg);
      energy = _mm256_add_pd(energy, _mm256_mul_pd(wg, t));
    }
  }
  alignas(32) double f[kLanes], e[kLanes];
  _mm256_store_pd(f, flux);
  _mm256_store_pd(e, energy);
  return {(f[0] + f[1]) + (f[2] + f[3]), (e[0] + e[1]) + (e[2] + e[3])};
}

#else

bool avx2_compiled() { return false; }

RowSums pair_row_avx2(const double* w, const double* u, std::size_t n, double ui,
                      PowerKind kind, double p) {
  return pair_row_scalar(w, u, n, ui, kind, p);
}

#endif

}  // namespace fracpol::simd::detail
