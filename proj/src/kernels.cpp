#include "marea/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace marea::kernels {

WeightedSupport compress(std::span<const std::uint64_t> samples, double weight_per_sample) {
  std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedSupport out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.values.push_back(static_cast<double>(sorted[i]));
    out.weights.push_back(weight_per_sample * static_cast<double>(j - i));
    i = j;
  }
  return out;
}

void merge_into(WeightedSupport& into, const WeightedSupport& other) {
  WeightedSupport merged;
  merged.values.reserve(into.size() + other.size());
  merged.weights.reserve(into.size() + other.size());
  std::size_t a = 0, b = 0;
  while (a < into.size() || b < other.size()) {
    if (b == other.size() || (a < into.size() && into.values[a] < other.values[b])) {
      merged.values.push_back(into.values[a]);
      merged.weights.push_back(into.weights[a++]);
    } else if (a == into.size() || other.values[b] < into.values[a]) {
      merged.values.push_back(other.values[b]);
      merged.weights.push_back(other.weights[b++]);
    } else {
      merged.values.push_back(into.values[a]);
      merged.weights.push_back(into.weights[a++] + other.weights[b++]);
    }
  }
  into = std::move(merged);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double block_max(const double* v, const double* w, std::size_t n, double scale) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0.0) m = std::max(m, scale * v[i]);
  }
  return m;
}

double block_sum(const double* v, const double* w, std::size_t n, double scale, double shift) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0.0) acc += w[i] * std::exp(scale * v[i] - shift);
  }
  return acc;
}

}  // namespace

double log_sum_exp(const WeightedSupport& s, double scale) {
  const std::size_t n = s.size();
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  const double* v = s.values.data();
  const double* w = s.weights.data();
  std::vector<double> partial(blocks, kNegInf);

#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    partial[b] = block_max(v + lo, w + lo, std::min(kBlock, n - lo), scale);
  }
  double shift = kNegInf;
  for (double m : partial) shift = std::max(shift, m);
  if (shift == kNegInf) return kNegInf;

#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    partial[b] = block_sum(v + lo, w + lo, std::min(kBlock, n - lo), scale, shift);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return shift + std::log(total);
}

double log_sum_exp_serial(const WeightedSupport& s, double scale) {
  double shift = kNegInf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weights[i] > 0.0) shift = std::max(shift, scale * s.values[i]);
  }
  if (shift == kNegInf) return kNegInf;
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weights[i] > 0.0) total += s.weights[i] * std::exp(scale * s.values[i] - shift);
  }
  return shift + std::log(total);
}

double sum_exp_direct(const WeightedSupport& s, double scale) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += s.weights[i] * std::exp(scale * s.values[i]);
  return total;
}

}  // namespace marea::kernels
