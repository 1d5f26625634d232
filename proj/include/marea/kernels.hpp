#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Reduction kernels behind the log-MGF evaluations. Each kernel has an
// OpenMP version and a plain serial reference; tests pin them against each
// other and bench/ compares their throughput.
//
// The OpenMP versions partition the input into fixed-size blocks, reduce each
// block serially, and combine block partials in index order. The result is
// therefore bit-identical for any thread count.

namespace marea::kernels {

inline constexpr std::size_t kBlock = 4096;
/// Inputs shorter than this stay on the calling thread.
inline constexpr std::size_t kParallelThreshold = 4 * kBlock;

/// Weighted support: distinct sample values with non-negative weights.
struct WeightedSupport {
  std::vector<double> values;
  std::vector<double> weights;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

/// Collapses integer samples into distinct values, each carrying
/// `weight_per_sample` times its multiplicity. Values come out ascending.
WeightedSupport compress(std::span<const std::uint64_t> samples, double weight_per_sample);

/// Appends `other` into `into`, merging equal values. Both must be ascending.
void merge_into(WeightedSupport& into, const WeightedSupport& other);

/// log( sum_i w_i * exp(scale * v_i) ), computed overflow-safely. Entries
/// with w_i == 0 are ignored; returns -inf when every weight is zero.
double log_sum_exp(const WeightedSupport& s, double scale);
double log_sum_exp_serial(const WeightedSupport& s, double scale);

/// Direct (non-log-space) sum_i w_i * exp(scale * v_i). Overflows for large
/// arguments; used only as an independent check.
double sum_exp_direct(const WeightedSupport& s, double scale);

}  // namespace marea::kernels
