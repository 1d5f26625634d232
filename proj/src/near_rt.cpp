#include "marea/near_rt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "marea/error.hpp"

namespace marea {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void ServiceSpec::validate() const {
  if (!(w_th_ms > 0.0)) throw InputError("service " + std::to_string(id) + ": delay budget must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InputError("service " + std::to_string(id) + ": epsilon must lie in (0,1)");
  }
}

double objective(std::span<const double> w_est, std::span<const double> w_th) {
  if (w_est.size() != w_th.size()) throw InputError("objective: length mismatch");
  double g = -kInf;
  for (std::size_t m = 0; m < w_est.size(); ++m) {
    if (!(w_th[m] > 0.0)) throw InputError("objective: delay budgets must be positive");
    if (std::isinf(w_est[m])) return kInf;
    g = std::max(g, w_est[m] / w_th[m]);
  }
  return g;
}

UtilizationPmf estimate_pmf(const ServiceObservation& obs, int n_min, int n_cell, UtilizationEstimator estimator) {
  const int n_add = n_cell - n_min;
  if (n_add < 0) throw InputError("guarantee exceeds the cell");
  if (estimator == UtilizationEstimator::gmm) {
    if (!obs.usage_gmm) throw InputError("GMM estimator selected but no usage mixture was fitted");
    return region_probabilities(obs.usage_gmm->shifted(-static_cast<double>(n_min)), n_add);
  }
  std::vector<std::uint32_t> extra;
  extra.reserve(obs.rb_usage.size());
  for (auto u : obs.rb_usage) extra.push_back(u > static_cast<std::uint32_t>(n_min) ? u - n_min : 0);
  return empirical_pmf(extra, n_add);
}

ServiceEvaluator::ServiceEvaluator(const ServiceSpec& spec, const ServiceObservation& obs, int n_cell,
                                   const AllocationParams& params)
    : spec_(spec), obs_(obs), n_cell_(n_cell), params_(params), arrival_(ArrivalSampleSet(obs.arrivals)) {
  spec.validate();
  if (obs.x_con.empty()) throw InputError("service " + std::to_string(spec.id) + ": no capacity observations");
}

DelayBoundResult ServiceEvaluator::compute(int n_min) const {
  if (n_min <= 0 || n_min > n_cell_) throw InputError("guarantee outside [1, N_cell]");
  const auto pi = estimate_pmf(obs_, n_min, n_cell_, params_.estimator);
  kernels::WeightedSupport combined;
  for (std::size_t n = 0; n < pi.pi.size(); ++n) {
    if (pi.pi[n] <= 0.0) continue;
    kernels::WeightedSupport region = grouped(n + static_cast<std::size_t>(n_min));
    double samples = 0.0;
    for (double w : region.weights) samples += w;
    for (double& w : region.weights) w *= pi.pi[n] / samples;
    kernels::merge_into(combined, region);
  }
  return delay_bound(arrival_, ServiceRate(std::move(combined)), spec_.epsilon, params_.t_slot_ms, params_.theta);
}

const kernels::WeightedSupport& ServiceEvaluator::grouped(std::size_t group_size) const {
  {
    std::lock_guard lock(grouped_mutex_);
    if (auto it = grouped_.find(group_size); it != grouped_.end()) return *it->second;
  }
  auto support = std::make_unique<kernels::WeightedSupport>(kernels::compress(group_sums(obs_.x_con, group_size), 1.0));
  std::lock_guard lock(grouped_mutex_);
  // another thread may have won the race; either copy is identical
  return *grouped_.try_emplace(group_size, std::move(support)).first->second;
}

const DelayBoundResult& ServiceEvaluator::evaluate(int n_min) {
  auto it = cache_.find(n_min);
  if (it == cache_.end()) it = cache_.emplace(n_min, compute(n_min)).first;
  return it->second;
}

AllocationOutcome allocate(std::span<const ServiceSpec> specs, std::span<const ServiceObservation> observations,
                           int n_cell, const AllocationParams& params) {
  const int m_count = static_cast<int>(specs.size());
  if (m_count == 0) throw InputError("no services to allocate");
  if (observations.size() != specs.size()) throw InputError("one observation per service required");
  if (n_cell < m_count) throw InputError("fewer RBs than services");

  std::deque<ServiceEvaluator> evals;
  std::vector<double> w_th;
  for (int m = 0; m < m_count; ++m) {
    evals.emplace_back(specs[m], observations[m], n_cell, params);
    w_th.push_back(specs[m].w_th_ms);
  }

  std::vector<int> cand(static_cast<std::size_t>(m_count), n_cell / m_count);
  for (int m = 0; m < n_cell % m_count; ++m) ++cand[m];

  AllocationOutcome out;
  auto& best = out.allocation;
  double best_g = kInf;
  bool committed = false;
  std::vector<double> w_z(static_cast<std::size_t>(m_count));

  while (out.iterations < params.max_iterations) {
    ++out.iterations;
    for (int m = 0; m < m_count; ++m) w_z[m] = evals[m].evaluate(cand[m]).w_ms;
    const double g_z = objective(w_z, w_th);
    if (!(g_z < best_g)) {
      if (!committed) best = {cand, w_z, g_z};
      break;
    }
    best = {cand, w_z, g_z};
    best_g = g_z;
    committed = true;
    out.objective_history.push_back(g_z);
    if (m_count == 1) break;

    int most = 0;
    for (int m = 1; m < m_count; ++m) {
      if (w_z[m] / w_th[m] > w_z[most] / w_th[most]) most = m;
    }
    int donor = -1;
    for (int m = 0; m < m_count; ++m) {
      if (m == most || cand[m] <= 1) continue;
      if (donor < 0 || w_z[m] / w_th[m] < w_z[donor] / w_th[donor]) donor = m;
    }
    if (donor < 0) break;
    ++cand[most];
    --cand[donor];
  }
  return out;
}

std::vector<double> delay_bound_table(const ServiceSpec& spec, const ServiceObservation& obs, int n_cell, int n_max,
                                      const AllocationParams& params) {
  const ServiceEvaluator eval(spec, obs, n_cell, params);
  std::vector<double> table(static_cast<std::size_t>(std::max(0, n_max)));
#pragma omp parallel for schedule(dynamic)
  for (int n = 1; n <= n_max; ++n) table[n - 1] = eval.compute(n).w_ms;
  return table;
}

std::vector<double> delay_bound_table_serial(const ServiceSpec& spec, const ServiceObservation& obs, int n_cell,
                                             int n_max, const AllocationParams& params) {
  const ServiceEvaluator eval(spec, obs, n_cell, params);
  std::vector<double> table;
  for (int n = 1; n <= n_max; ++n) table.push_back(eval.compute(n).w_ms);
  return table;
}

std::uint64_t composition_count(int n, int k) {
  if (k <= 0 || n < k) return 0;
  // C(n-1, k-1) with exact intermediate division
  unsigned __int128 c = 1;
  const int top = n - 1;
  const int r = std::min(k - 1, top - (k - 1));
  for (int i = 1; i <= r; ++i) {
    c = c * static_cast<unsigned>(top - r + i) / static_cast<unsigned>(i);
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(c);
}

BruteForceOutcome brute_force_allocate(std::span<const ServiceSpec> specs,
                                       std::span<const ServiceObservation> observations, int n_cell,
                                       const AllocationParams& params) {
  const int m_count = static_cast<int>(specs.size());
  if (m_count == 0) throw InputError("no services to allocate");
  if (observations.size() != specs.size()) throw InputError("one observation per service required");
  if (n_cell < m_count) throw InputError("fewer RBs than services");
  const auto count = composition_count(n_cell, m_count);
  if (count > kBruteForceLimit) {
    throw InputError("brute force would enumerate " + std::to_string(count) + " allocations (limit " +
                     std::to_string(kBruteForceLimit) + ")");
  }

  const int n_max = n_cell - m_count + 1;
  std::vector<std::vector<double>> table;
  std::vector<double> w_th;
  for (int m = 0; m < m_count; ++m) {
    table.push_back(delay_bound_table(specs[m], observations[m], n_cell, n_max, params));
    w_th.push_back(specs[m].w_th_ms);
  }

  BruteForceOutcome out;
  std::vector<int> parts(static_cast<std::size_t>(m_count), 1);
  std::vector<double> w(static_cast<std::size_t>(m_count));
  double best_g = kInf;
  bool have = false;

  // odometer over the first |M|-1 parts; the last takes the remainder
  parts[m_count - 1] = n_cell - (m_count - 1);
  while (true) {
    for (int m = 0; m < m_count; ++m) w[m] = table[m][parts[m] - 1];
    const double g = objective(w, w_th);
    ++out.iterations;
    if (!have || g < best_g) {
      out.allocation = {parts, w, g};
      best_g = g;
      have = true;
    }
    int i = m_count - 2;
    while (i >= 0) {
      // advance part i if the last part can give one more RB
      if (parts[m_count - 1] > 1) {
        ++parts[i];
        --parts[m_count - 1];
        break;
      }
      // reset part i to 1, returning its RBs to the last part, and carry
      parts[m_count - 1] += parts[i] - 1;
      parts[i] = 1;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace marea
