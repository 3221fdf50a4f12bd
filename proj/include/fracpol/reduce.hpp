#pragma once

// Deterministic reductions and a small fork-join helper.
//
// Every floating-point sum in the library goes through `tree_sum`, whose
// association pattern depends only on the input length. Work splitting in
// `parallel_for` only decides which thread fills which output slot, so the
// results are bit-identical for any thread count.

#include <cstddef>
#include <functional>
#include <span>

namespace fracpol {

/// Pairwise sum with a fixed topology (sequential below 8 terms).
double tree_sum(std::span<const double> v);

/// Worker count from FRACPOL_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();
void set_thread_count(unsigned n);

/// Calls body(i) for i in [0, n); indices are split into contiguous chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracpol
