#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "marea/kernels.hpp"
#include "marea/pmf.hpp"

namespace marea {

/// Bits arrived per TTI over the observation window.
struct ArrivalSampleSet {
  std::vector<std::uint64_t> samples;

  explicit ArrivalSampleSet(std::vector<std::uint64_t> s);
  std::size_t size() const { return samples.size(); }
  double mean() const;
};

/// Bits servable per TTI, one sample vector per number n of additional RBs
/// beyond the guarantee (n in [0, n_add]).
struct CapacitySampleSet {
  std::vector<std::vector<std::uint64_t>> per_n_samples;
  int n_min = 1;
  int n_add = 0;

  /// Throws InputError unless there are n_add + 1 nonempty sample vectors.
  void validate() const;
};

struct ThetaSearchParams {
  double theta_init = 1.0;
  double shrink = 0.9;
  double floor = 1e-9;
  double theta_cap = 64.0;
  int bisection_iters = 80;
  double bisection_rel_width = 1e-9;

  void validate() const;
};

struct DelayBoundResult {
  std::optional<double> theta_star;
  double w_ms = 0.0;  ///< +inf when theta_star is absent
  double k_prime_a_at_star = 0.0;
  double k_prime_s_at_star = 0.0;
  double epsilon = 0.0;
  bool bracketed = false;  ///< true when theta_star came from a sign-change bisection
};

/// Arrival side K'_a(theta) = log of the empirical MGF, precompiled once per
/// sample set so repeated evaluations only touch distinct values.
class ArrivalRate {
 public:
  explicit ArrivalRate(const ArrivalSampleSet& x_a);
  double operator()(double theta) const;
  double serial(double theta) const;
  double mean() const { return mean_; }
  const kernels::WeightedSupport& support() const { return support_; }

 private:
  kernels::WeightedSupport support_;
  double mean_ = 0.0;
};

/// Service side K'_s(theta) = -log of the pi-weighted negative MGF. Regions
/// with pi_n == 0 are dropped at construction.
class ServiceRate {
 public:
  ServiceRate(const CapacitySampleSet& x_s, const UtilizationPmf& pi);
  /// Builds directly from per-region supports (region n weight pi_n, sample
  /// weight 1/T_n already applied by the caller).
  explicit ServiceRate(kernels::WeightedSupport combined);
  double operator()(double theta) const;
  double serial(double theta) const;
  double weighted_mean() const;
  const kernels::WeightedSupport& support() const { return support_; }

 private:
  kernels::WeightedSupport support_;
};

/// K'_a(theta) = log[(1/T) sum_i exp(theta a_i)].
double arrival_log_mgf(const ArrivalSampleSet& x_a, double theta);

/// K'_s(theta) = -log[ sum_n (pi_n / T_n) sum_i exp(-theta s_i^n) ].
double service_log_neg_mgf(const CapacitySampleSet& x_s, const UtilizationPmf& pi, double theta);

struct ThetaSearchOutcome {
  std::optional<double> theta_star;
  bool bracketed = false;
  int evaluations = 0;
};

/// Largest theta with K'_a(theta) <= K'_s(theta): geometric shrink from
/// theta_init until the gap turns non-negative, then bisection on the
/// bracket. When the gap is already non-negative at theta_init the search
/// doubles upward and returns theta_cap if it never turns negative.
ThetaSearchOutcome find_theta_star(const ArrivalRate& k_a, const ServiceRate& k_s, const ThetaSearchParams& params);
std::optional<double> find_theta_star(const ArrivalSampleSet& x_a, const CapacitySampleSet& x_s,
                                      const UtilizationPmf& pi, const ThetaSearchParams& params = {});

/// W = -log(epsilon) / K'_s(theta*) * t_slot, in milliseconds.
DelayBoundResult delay_bound(const ArrivalRate& k_a, const ServiceRate& k_s, double epsilon, double t_slot_ms,
                             const ThetaSearchParams& params = {});
DelayBoundResult delay_bound(const ArrivalSampleSet& x_a, const CapacitySampleSet& x_s, const UtilizationPmf& pi,
                             double epsilon, double t_slot_ms, const ThetaSearchParams& params = {});

/// min(1, exp(-K'_s(theta*) * W_query / t_slot)).
double violation_bound(const DelayBoundResult& result, double w_query_ms, double t_slot_ms);

}  // namespace marea
