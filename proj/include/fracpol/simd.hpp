#pragma once

// Pair-interaction row kernels with a scalar reference and an AVX2 variant.
//
// For one row i of the dense interaction matrix the kernel returns
//   flux   = sum_j w_j G(u_i - u_j),
//   energy = sum_j w_j G(u_i - u_j) (u_i - u_j),   G(t) = |t|^{p-2} t.
// Rows are zero-padded to a multiple of kLanes. Both variants accumulate
// into kLanes interleaved partial sums and combine them as
// (l0 + l1) + (l2 + l3) without fused multiply-add, so they agree bit for bit.

#include <cstddef>
#include <string_view>

namespace fracpol::simd {

inline constexpr std::size_t kLanes = 4;

constexpr std::size_t padded_length(std::size_t n) {
  return (n + kLanes - 1) / kLanes * kLanes;
}

enum class Level { Scalar, Avx2 };
enum class PowerKind { Square, Cube, General };

PowerKind power_kind(double p);

struct RowSums {
  double flux = 0.0;
  double energy = 0.0;
};

/// Best level supported by this CPU (and compiled in).
Level detected_level();
/// Level used by `pair_row`; honours FRACPOL_SIMD=scalar|avx2 on first use.
Level active_level();
/// Throws InvalidArgument when the CPU does not support `level`.
void set_level(Level level);
std::string_view to_string(Level level);

RowSums pair_row(const double* w, const double* u, std::size_t n, double ui, PowerKind kind,
                 double p);

namespace detail {
RowSums pair_row_scalar(const double* w, const double* u, std::size_t n, double ui,
                        PowerKind kind, double p);
RowSums pair_row_avx2(const double* w, const double* u, std::size_t n, double ui,
                      PowerKind kind, double p);
bool avx2_compiled();
}  // namespace detail

}  // namespace fracpol::simd
