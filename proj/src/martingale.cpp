#include "marea/martingale.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "marea/error.hpp"

namespace marea {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ArrivalSampleSet::ArrivalSampleSet(std::vector<std::uint64_t> s) : samples(std::move(s)) {
  if (samples.empty()) throw InputError("arrival sample set is empty");
}

double ArrivalSampleSet::mean() const {
  long double acc = 0;
  for (auto v : samples) acc += static_cast<long double>(v);
  return static_cast<double>(acc / static_cast<long double>(samples.size()));
}

void CapacitySampleSet::validate() const {
  if (n_add < 0) throw InputError("n_add must be non-negative");
  if (per_n_samples.size() != static_cast<std::size_t>(n_add) + 1) {
    throw InputError("capacity sample set has " + std::to_string(per_n_samples.size()) + " regions, expected " +
                     std::to_string(n_add + 1));
  }
  for (const auto& s : per_n_samples) {
    if (s.empty()) throw InputError("capacity sample set has an empty region");
  }
}

void ThetaSearchParams::validate() const {
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("shrink must lie in (0,1)");
  if (!(floor > 0.0 && floor < theta_init && theta_init <= theta_cap)) {
    throw InputError("theta parameters must satisfy 0 < floor < theta_init <= theta_cap");
  }
  if (bisection_iters <= 0) throw InputError("bisection_iters must be positive");
}

ArrivalRate::ArrivalRate(const ArrivalSampleSet& x_a)
    : support_(kernels::compress(x_a.samples, 1.0 / static_cast<double>(x_a.size()))), mean_(x_a.mean()) {}

double ArrivalRate::operator()(double theta) const { return kernels::log_sum_exp(support_, theta); }
double ArrivalRate::serial(double theta) const { return kernels::log_sum_exp_serial(support_, theta); }

ServiceRate::ServiceRate(const CapacitySampleSet& x_s, const UtilizationPmf& pi) {
  x_s.validate();
  if (pi.pi.size() != x_s.per_n_samples.size()) {
    throw InputError("utilization PMF has " + std::to_string(pi.pi.size()) + " entries, capacity samples have " +
                     std::to_string(x_s.per_n_samples.size()) + " regions");
  }
  pi.validate();
  for (std::size_t n = 0; n < pi.pi.size(); ++n) {
    if (pi.pi[n] <= 0.0) continue;
    const auto& s = x_s.per_n_samples[n];
    kernels::merge_into(support_, kernels::compress(s, pi.pi[n] / static_cast<double>(s.size())));
  }
}

ServiceRate::ServiceRate(kernels::WeightedSupport combined) : support_(std::move(combined)) {
  if (support_.empty()) throw InputError("service support is empty");
}

double ServiceRate::operator()(double theta) const { return -kernels::log_sum_exp(support_, -theta); }
double ServiceRate::serial(double theta) const { return -kernels::log_sum_exp_serial(support_, -theta); }

double ServiceRate::weighted_mean() const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    num += support_.weights[i] * support_.values[i];
    den += support_.weights[i];
  }
  return num / den;
}

double arrival_log_mgf(const ArrivalSampleSet& x_a, double theta) {
  if (!(theta > 0.0)) throw InputError("theta must be positive");
  return ArrivalRate(x_a)(theta);
}

double service_log_neg_mgf(const CapacitySampleSet& x_s, const UtilizationPmf& pi, double theta) {
  if (!(theta > 0.0)) throw InputError("theta must be positive");
  return ServiceRate(x_s, pi)(theta);
}

ThetaSearchOutcome find_theta_star(const ArrivalRate& k_a, const ServiceRate& k_s, const ThetaSearchParams& params) {
  params.validate();
  ThetaSearchOutcome out;
  auto gap = [&](double theta) {
    ++out.evaluations;
    return k_s(theta) - k_a(theta);
  };
  // invariant: gap(lo) >= 0, gap(hi) < 0
  auto bisect = [&](double lo, double hi) {
    for (int it = 0; it < params.bisection_iters && (hi - lo) > params.bisection_rel_width * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  };

  if (gap(params.theta_init) >= 0.0) {
    double lo = params.theta_init;
    while (lo < params.theta_cap) {
      const double hi = std::min(2.0 * lo, params.theta_cap);
      if (gap(hi) < 0.0) {
        out.theta_star = bisect(lo, hi);
        out.bracketed = true;
        return out;
      }
      lo = hi;
    }
    out.theta_star = params.theta_cap;
    return out;
  }

  double theta_old = params.theta_init;
  while (true) {
    const double theta_new = theta_old * params.shrink;
    if (gap(theta_new) >= 0.0) {
      out.theta_star = bisect(theta_new, theta_old);
      out.bracketed = true;
      return out;
    }
    theta_old = theta_new;
    if (theta_new < params.floor) return out;
  }
}

std::optional<double> find_theta_star(const ArrivalSampleSet& x_a, const CapacitySampleSet& x_s,
                                      const UtilizationPmf& pi, const ThetaSearchParams& params) {
  return find_theta_star(ArrivalRate(x_a), ServiceRate(x_s, pi), params).theta_star;
}

DelayBoundResult delay_bound(const ArrivalRate& k_a, const ServiceRate& k_s, double epsilon, double t_slot_ms,
                             const ThetaSearchParams& params) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0,1)");
  if (!(t_slot_ms > 0.0)) throw InputError("t_slot must be positive");
  DelayBoundResult r;
  r.epsilon = epsilon;
  const auto search = find_theta_star(k_a, k_s, params);
  r.bracketed = search.bracketed;
  if (search.theta_star) {
    const double theta = *search.theta_star;
    r.k_prime_a_at_star = k_a(theta);
    r.k_prime_s_at_star = k_s(theta);
    if (r.k_prime_s_at_star > 0.0) {
      r.theta_star = theta;
      r.w_ms = -std::log(epsilon) / r.k_prime_s_at_star * t_slot_ms;
      return r;
    }
  }
  r.w_ms = kInf;
  return r;
}

DelayBoundResult delay_bound(const ArrivalSampleSet& x_a, const CapacitySampleSet& x_s, const UtilizationPmf& pi,
                             double epsilon, double t_slot_ms, const ThetaSearchParams& params) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0,1)");
  return delay_bound(ArrivalRate(x_a), ServiceRate(x_s, pi), epsilon, t_slot_ms, params);
}

double violation_bound(const DelayBoundResult& result, double w_query_ms, double t_slot_ms) {
  if (!result.theta_star) throw UndefinedBoundError("no decay rate: the service cannot sustain the arrivals");
  if (!(w_query_ms >= 0.0)) throw InputError("query delay must be non-negative");
  return std::min(1.0, std::exp(-result.k_prime_s_at_star * w_query_ms / t_slot_ms));
}

}  // namespace marea
