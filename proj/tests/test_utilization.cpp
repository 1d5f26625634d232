#include <doctest.h>

#include <cmath>
#include <numeric>

#include "marea/error.hpp"
#include "marea/utilization.hpp"

using namespace marea;

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("empirical histogram") {
  const std::vector<std::uint32_t> a{0, 1, 2, 3};
  CHECK(empirical_pmf(a, 3).pi == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  const std::vector<std::uint32_t> b{0, 0, 0, 0};
  CHECK(empirical_pmf(b, 2).pi == std::vector<double>{1, 0, 0});
  const std::vector<std::uint32_t> c{5, 5};
  CHECK(empirical_pmf(c, 3).pi == std::vector<double>{0, 0, 0, 1});
  CHECK_THROWS_AS(empirical_pmf(std::vector<std::uint32_t>{}, 3), InputError);
}

TEST_CASE("EM on constant samples collapses to the sigma floor") {
  const std::vector<double> x(50, 3.0);
  RngStream rng(1, 0);
  GmmFitOptions opt;
  opt.components = 1;
  const auto fit = fit_gmm_em(x, opt, rng);
  REQUIRE(fit.mixture.components.size() == 1);
  CHECK(fit.mixture.components[0].mean == doctest::Approx(3.0));
  CHECK(fit.mixture.components[0].stddev == doctest::Approx(1e-3));

  opt.components = 3;
  RngStream rng2(1, 0);
  const auto fit3 = fit_gmm_em(x, opt, rng2);
  CHECK_NOTHROW(fit3.mixture.validate());
  CHECK(region_probabilities(fit3.mixture, 5).pi[3] >= 1 - 1e-6);
}

TEST_CASE("EM separates two clusters") {
  RngStream gen(11, 0);
  std::vector<double> x;
  for (int i = 0; i < 500; ++i) x.push_back(gen.normal(2.0, 0.1));
  for (int i = 0; i < 500; ++i) x.push_back(gen.normal(10.0, 0.1));
  RngStream rng(12, 0);
  GmmFitOptions opt;
  opt.components = 2;
  const auto fit = fit_gmm_em(x, opt, rng);
  REQUIRE(fit.mixture.components.size() == 2);
  auto c = fit.mixture.components;
  if (c[0].mean > c[1].mean) std::swap(c[0], c[1]);
  CHECK(std::abs(c[0].mean - 2.0) <= 0.1);
  CHECK(std::abs(c[1].mean - 10.0) <= 0.1);
  CHECK(std::abs(c[0].weight - 0.5) <= 0.05);
  CHECK(std::abs(c[1].weight - 0.5) <= 0.05);
  for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
    CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1] - 1e-9 * std::abs(fit.log_likelihood[i - 1]));
  }
}

TEST_CASE("more components than samples") {
  RngStream rng(1, 0);
  GmmFitOptions opt;
  opt.components = 3;
  CHECK_THROWS_AS(fit_gmm_em(std::vector<double>{1.0, 2.0}, opt, rng), InputError);
}

TEST_CASE("region probabilities") {
  const GmmMixture narrow{{{1.0, 3.0, 0.1}}};
  const auto p = region_probabilities(narrow, 6);
  CHECK(p.pi[3] >= 1 - 1e-6);
  for (int n = 0; n <= 6; ++n) {
    if (n != 3) CHECK(p.pi[n] <= 1e-6);
  }

  const GmmMixture standard{{{1.0, 0.0, 1.0}}};
  const auto q = region_probabilities(standard, 3);
  CHECK(q.pi[0] == doctest::Approx(phi(0.5)).epsilon(1e-9));
  CHECK(q.pi[1] == doctest::Approx(phi(1.5) - phi(0.5)).epsilon(1e-9));
  CHECK(q.pi[2] == doctest::Approx(phi(2.5) - phi(1.5)).epsilon(1e-9));
  CHECK(q.pi[3] == doctest::Approx(1 - phi(2.5)).epsilon(1e-9));
  CHECK(q.pi[0] == doctest::Approx(0.6915).epsilon(1e-4));
  CHECK(q.pi[1] == doctest::Approx(0.2417).epsilon(1e-3));
  CHECK(q.pi[2] == doctest::Approx(0.0606).epsilon(1e-3));
  CHECK(q.pi[3] == doctest::Approx(0.0062).epsilon(1e-2));

  const GmmMixture mix{{{0.3, 1.2, 0.7}, {0.7, 4.4, 2.0}}};
  const auto r = region_probabilities(mix, 5);
  CHECK(std::accumulate(r.pi.begin(), r.pi.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("standard normal CDF matches erf") {
  for (double z = -6; z <= 6; z += 0.25) CHECK(standard_normal_cdf(z) == doctest::Approx(phi(z)).epsilon(1e-12));
}

TEST_CASE("tiny-sigma fit agrees with the histogram") {
  const std::vector<std::uint32_t> usage(40, 2);
  const std::vector<double> x(usage.begin(), usage.end());
  RngStream rng(2, 0);
  GmmFitOptions opt;
  opt.components = 1;
  const auto gmm = fit_gmm_em(x, opt, rng).mixture;
  CHECK(region_probabilities(gmm, 4).pi[2] >= 1 - 1e-6);
  CHECK(empirical_pmf(usage, 4).pi[2] >= 1 - 1e-6);
}
