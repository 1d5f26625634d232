#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "marea/capacity.hpp"
#include "marea/martingale.hpp"
#include "marea/utilization.hpp"

namespace marea {

struct ServiceSpec {
  int id = 0;
  double w_th_ms = 1.0;
  double epsilon = 1e-3;

  void validate() const;
};

enum class UtilizationEstimator { empirical, gmm };

/// Everything the near-RT controller observed about one service over the
/// trailing window.
struct ServiceObservation {
  std::vector<std::uint64_t> arrivals;   ///< bits per TTI, last T_OBS TTIs
  ConcatPerRbVector x_con;               ///< transmitted packets, last T_OBS TTIs
  std::vector<std::uint32_t> rb_usage;   ///< RBs used per TTI, last T_OUT TTIs
  std::optional<GmmMixture> usage_gmm;   ///< fit of rb_usage, GMM estimator only
};

struct AllocationParams {
  ThetaSearchParams theta;
  double t_slot_ms = 1.0;
  UtilizationEstimator estimator = UtilizationEstimator::empirical;
  int max_iterations = 100000;
};

struct GuaranteedAllocation {
  std::vector<int> n_min;
  std::vector<double> w_est_ms;
  double objective = 0.0;
};

struct AllocationOutcome {
  GuaranteedAllocation allocation;
  /// Committed objective after every improving iteration.
  std::vector<double> objective_history;
  /// Candidate evaluations, including the final non-improving one.
  int iterations = 0;
};

struct BruteForceOutcome {
  GuaranteedAllocation allocation;
  std::uint64_t iterations = 0;
};

/// max_m w_est[m] / w_th[m]; +inf as soon as one estimate is infinite.
double objective(std::span<const double> w_est, std::span<const double> w_th);

/// pi for a candidate guarantee, from the estimator selected in `params`.
UtilizationPmf estimate_pmf(const ServiceObservation& obs, int n_min, int n_cell, UtilizationEstimator estimator);

/// Delay bound W(n_min) for one service, memoized per guarantee.
class ServiceEvaluator {
 public:
  ServiceEvaluator(const ServiceSpec& spec, const ServiceObservation& obs, int n_cell, const AllocationParams& params);

  const DelayBoundResult& evaluate(int n_min);
  /// Evaluation without the result cache; safe to call concurrently.
  DelayBoundResult compute(int n_min) const;

 private:
  /// Compressed group sums of x_con for one group size, unit weight per sample.
  const kernels::WeightedSupport& grouped(std::size_t group_size) const;

  const ServiceSpec& spec_;
  const ServiceObservation& obs_;
  int n_cell_;
  const AllocationParams& params_;
  ArrivalRate arrival_;
  std::map<int, DelayBoundResult> cache_;
  mutable std::mutex grouped_mutex_;
  mutable std::map<std::size_t, std::unique_ptr<kernels::WeightedSupport>> grouped_;
};

/// Near-RT RB allocation: start from an equal split, repeatedly move one
/// guaranteed RB from the least to the most stressed service while the
/// objective strictly improves.
AllocationOutcome allocate(std::span<const ServiceSpec> specs, std::span<const ServiceObservation> observations,
                           int n_cell, const AllocationParams& params);

/// W(n) for n in [1, n_max]: OpenMP over n, and the serial reference.
std::vector<double> delay_bound_table(const ServiceSpec& spec, const ServiceObservation& obs, int n_cell, int n_max,
                                      const AllocationParams& params);
std::vector<double> delay_bound_table_serial(const ServiceSpec& spec, const ServiceObservation& obs, int n_cell,
                                             int n_max, const AllocationParams& params);

/// Number of compositions of n into k positive parts, C(n-1, k-1).
std::uint64_t composition_count(int n, int k);

inline constexpr std::uint64_t kBruteForceLimit = 1'000'000;

/// Exhaustive search over every composition of n_cell into |M| positive parts.
/// Throws InputError when the count exceeds kBruteForceLimit.
BruteForceOutcome brute_force_allocate(std::span<const ServiceSpec> specs,
                                       std::span<const ServiceObservation> observations, int n_cell,
                                       const AllocationParams& params);

}  // namespace marea
