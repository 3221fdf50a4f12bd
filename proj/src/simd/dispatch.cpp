#include <atomic>
#include <cstdlib>
#include <string>

#include "fracpol/error.hpp"
#include "fracpol/simd.hpp"

namespace fracpol::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

// -1 = not yet resolved.
std::atomic<int> g_level{-1};

Level resolve_initial() {
  Level level = detected_level();
  if (const char* env = std::getenv("FRACPOL_SIMD")) {
    const std::string v(env);
    if (v == "scalar") level = Level::Scalar;
  }
  return level;
}

}  // namespace

PowerKind power_kind(double p) {
  if (p == 2.0) return PowerKind::Square;
  if (p == 3.0) return PowerKind::Cube;
  return PowerKind::General;
}

Level detected_level() {
  static const Level level =
      (detail::avx2_compiled() && cpu_has_avx2()) ? Level::Avx2 : Level::Scalar;
  return level;
}

Level active_level() {
  int v = g_level.load(std::memory_order_relaxed);
  if (v < 0) {
    v = static_cast<int>(resolve_initial());
    g_level.store(v, std::memory_order_relaxed);
  }
  return static_cast<Level>(v);
}

void set_level(Level level) {
  if (level == Level::Avx2 && detected_level() != Level::Avx2) {
    throw Error(ErrorKind::InvalidArgument, "AVX2 kernels are not available on this CPU");
  }
  g_level.store(static_cast<int>(level), std::memory_order_relaxed);
}

std::string_view to_string(Level level) {
  return level == Level::Avx2 ? "avx2" : "scalar";
}

RowSums pair_row(const double* w, const double* u, std::size_t n, double ui, PowerKind kind,
                 double p) {
  if (active_level() == Level::Avx2) return detail::pair_row_avx2(w, u, n, ui, kind, p);
  return detail::pair_row_scalar(w, u, n, ui, kind, p);
}

}  // namespace fracpol::simd
