#include "marea/utilization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "marea/error.hpp"

namespace marea {

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void GmmMixture::validate() const {
  if (components.empty()) throw InputError("mixture has no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) throw InputError("mixture weight outside (0,1]");
    if (!(c.stddev > 0.0)) throw InputError("mixture sigma must be positive");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights sum to " + std::to_string(total));
}

GmmMixture GmmMixture::shifted(double delta) const {
  GmmMixture out = *this;
  for (auto& c : out.components) c.mean += delta;
  return out;
}

double GmmMixture::pdf(double x) const {
  double p = 0.0;
  for (const auto& c : components) {
    const double z = (x - c.mean) / c.stddev;
    p += c.weight * std::exp(-0.5 * z * z) / (c.stddev * std::sqrt(2.0 * std::numbers::pi));
  }
  return p;
}

double GmmMixture::cdf(double x) const {
  double p = 0.0;
  for (const auto& c : components) p += c.weight * standard_normal_cdf((x - c.mean) / c.stddev);
  return p;
}

UtilizationPmf empirical_pmf(std::span<const std::uint32_t> extra_rb_usage, int n_add) {
  if (extra_rb_usage.empty()) throw InputError("no RB usage observations");
  if (n_add < 0) throw InputError("n_add must be non-negative");
  UtilizationPmf out;
  out.pi.assign(static_cast<std::size_t>(n_add) + 1, 0.0);
  std::vector<std::uint64_t> counts(out.pi.size(), 0);
  for (auto u : extra_rb_usage) ++counts[std::min<std::size_t>(u, static_cast<std::size_t>(n_add))];
  const double total = static_cast<double>(extra_rb_usage.size());
  for (std::size_t n = 0; n < counts.size(); ++n) out.pi[n] = static_cast<double>(counts[n]) / total;
  return out;
}

UtilizationPmf region_probabilities(const GmmMixture& gmm, int n_add) {
  gmm.validate();
  if (n_add < 0) throw InputError("n_add must be non-negative");
  UtilizationPmf out;
  out.pi.assign(static_cast<std::size_t>(n_add) + 1, 0.0);
  for (const auto& c : gmm.components) {
    // differences of the upper tail are accurate far right of the mean,
    // differences of the CDF far left; pick per region
    auto mass = [&](double lo, double hi) {
      const double zl = (lo - c.mean) / c.stddev;
      const double zh = (hi - c.mean) / c.stddev;
      if (zl > 0.0) return standard_normal_cdf(-zl) - standard_normal_cdf(-zh);
      return standard_normal_cdf(zh) - standard_normal_cdf(zl);
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_add; ++n) {
      const double lo = n == 0 ? -inf : n - 0.5;
      const double hi = n == n_add ? inf : n + 0.5;
      out.pi[static_cast<std::size_t>(n)] += c.weight * std::max(0.0, mass(lo, hi));
    }
  }
  double total = 0.0;
  for (double p : out.pi) total += p;
  for (double& p : out.pi) p /= total;
  return out;
}

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

// Per-sample log-sum-exp over components; fills responsibilities when `resp` is non-null.
double e_step(std::span<const double> x, const std::vector<GmmComponent>& comps, std::vector<double>* resp) {
  const std::size_t k = comps.size();
  std::vector<double> lp(k);
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      lp[c] = std::log(comps[c].weight) + log_normal_pdf(x[i], comps[c].mean, comps[c].stddev);
      m = std::max(m, lp[c]);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += std::exp(lp[c] - m);
    const double lse = m + std::log(s);
    ll += lse;
    if (resp) {
      for (std::size_t c = 0; c < k; ++c) (*resp)[i * k + c] = std::exp(lp[c] - lse);
    }
  }
  return ll;
}

std::vector<double> kmeanspp_centers(std::span<const double> x, int k, RngStream& rng) {
  std::vector<double> centers;
  centers.push_back(x[rng.uniform_int(0, x.size() - 1)]);
  std::vector<double> d2(x.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(centers.back());
      continue;
    }
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t pick = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += d2[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    centers.push_back(x[pick]);
  }
  return centers;
}

}  // namespace

GmmFit fit_gmm_em(std::span<const double> samples, const GmmFitOptions& options, RngStream& rng) {
  const int k = options.components;
  if (k <= 0) throw InputError("component count must be positive");
  if (samples.size() < static_cast<std::size_t>(k)) {
    throw InputError("need at least " + std::to_string(k) + " samples, got " + std::to_string(samples.size()));
  }
  const std::size_t n = samples.size();
  const double floor = options.sigma_floor;

  // hard assignment to the nearest seed gives the initial parameters
  const auto centers = kmeanspp_centers(samples, k, rng);
  std::vector<GmmComponent> comps(static_cast<std::size_t>(k));
  {
    std::vector<double> cnt(k, 0.0), sum(k, 0.0), sq(k, 0.0);
    for (double v : samples) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < centers.size(); ++c) {
        if (std::abs(v - centers[c]) < std::abs(v - centers[best])) best = c;
      }
      cnt[best] += 1.0;
      sum[best] += v;
      sq[best] += v * v;
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] == 0.0) {
        comps[c] = {1.0, centers[c], floor};
        cnt[c] = 1.0;
        continue;
      }
      const double mean = sum[c] / cnt[c];
      const double var = std::max(0.0, sq[c] / cnt[c] - mean * mean);
      comps[c] = {cnt[c], mean, std::max(floor, std::sqrt(var))};
    }
    double total = 0.0;
    for (auto& c : comps) total += c.weight;
    for (auto& c : comps) c.weight /= total;
  }

  GmmFit fit;
  std::vector<double> resp;
  double ll = e_step(samples, comps, nullptr);
  fit.log_likelihood.push_back(ll);
  for (int it = 0; it < options.max_iters; ++it) {
    const std::size_t kk = comps.size();
    resp.assign(n * kk, 0.0);
    e_step(samples, comps, &resp);

    std::vector<GmmComponent> next;
    for (std::size_t c = 0; c < kk; ++c) {
      double nk = 0.0, mu = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * kk + c];
        mu += resp[i * kk + c] * samples[i];
      }
      if (nk <= 1e-10 * static_cast<double>(n)) continue;  // component vanished
      mu /= nk;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = samples[i] - mu;
        var += resp[i * kk + c] * d * d;
      }
      var /= nk;
      next.push_back({nk / static_cast<double>(n), mu, std::max(floor, std::sqrt(var))});
    }
    double total = 0.0;
    for (auto& c : next) total += c.weight;
    for (auto& c : next) c.weight /= total;
    comps = std::move(next);

    const double ll_next = e_step(samples, comps, nullptr);
    fit.log_likelihood.push_back(ll_next);
    fit.iterations = it + 1;
    const double improvement = ll_next - ll;
    ll = ll_next;
    if (improvement < options.tol) break;
  }

  // merge components that converged onto each other
  std::vector<GmmComponent> merged;
  for (const auto& c : comps) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const GmmComponent& m) {
      return std::abs(m.mean - c.mean) <= 1e-9 * std::max(1.0, std::abs(c.mean)) &&
             std::abs(m.stddev - c.stddev) <= 1e-9 * c.stddev;
    });
    if (same != merged.end()) {
      same->weight += c.weight;
    } else {
      merged.push_back(c);
    }
  }
  fit.mixture.components = std::move(merged);
  return fit;
}

}  // namespace marea
