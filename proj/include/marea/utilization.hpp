#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "marea/pmf.hpp"
#include "marea/rng.hpp"

namespace marea {

struct GmmComponent {
  double weight = 1.0;
  double mean = 0.0;
  double stddev = 1.0;
};

struct GmmMixture {
  std::vector<GmmComponent> components;

  /// Throws InputError unless weights are in (0,1] summing to 1 (1e-9) and sigmas are positive.
  void validate() const;
  /// Same mixture with every mean moved by `delta`.
  GmmMixture shifted(double delta) const;
  double pdf(double x) const;
  double cdf(double x) const;
};

struct GmmFitOptions {
  int components = 3;
  int max_iters = 200;
  double tol = 1e-8;
  double sigma_floor = 1e-3;
};

struct GmmFit {
  GmmMixture mixture;
  /// Log-likelihood after each EM iteration (first entry: after initialization).
  std::vector<double> log_likelihood;
  int iterations = 0;
};

/// Normalized histogram of extra-RB usage; values above n_add land in bin n_add.
UtilizationPmf empirical_pmf(std::span<const std::uint32_t> extra_rb_usage, int n_add);

/// EM fit with k-means++ seeding drawn from `rng`. Components whose
/// responsibility vanishes are dropped and identical components merged, so
/// the result may have fewer than `components` entries.
GmmFit fit_gmm_em(std::span<const double> samples, const GmmFitOptions& options, RngStream& rng);

/// pi_n = mass of the mixture on (n - 0.5, n + 0.5]; region 0 extends to -inf
/// and region n_add to +inf. Renormalized to sum to 1.
UtilizationPmf region_probabilities(const GmmMixture& gmm, int n_add);

double standard_normal_cdf(double z);

}  // namespace marea
