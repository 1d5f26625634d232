#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "marea/kernels.hpp"
#include "marea/rng.hpp"

using namespace marea;
using namespace marea::kernels;

TEST_CASE("compress sorts and counts") {
  const std::vector<std::uint64_t> s{5, 1, 5, 3, 1, 5};
  const auto w = compress(s, 0.5);
  CHECK(w.values == std::vector<double>{1, 3, 5});
  CHECK(w.weights == std::vector<double>{1.0, 0.5, 1.5});
}

TEST_CASE("merge keeps values unique and ascending") {
  auto a = compress(std::vector<std::uint64_t>{1, 4}, 1.0);
  merge_into(a, compress(std::vector<std::uint64_t>{2, 4, 9}, 0.25));
  CHECK(a.values == std::vector<double>{1, 2, 4, 9});
  CHECK(a.weights == std::vector<double>{1.0, 0.25, 1.25, 0.25});
}

TEST_CASE("log-sum-exp survives huge exponents") {
  WeightedSupport s{{1e6, 1e6 + 1}, {1.0, 1.0}};
  const double v = log_sum_exp(s, 1.0);
  CHECK(v == doctest::Approx(1e6 + 1 + std::log1p(std::exp(-1.0))));
  CHECK(std::isinf(log_sum_exp(WeightedSupport{{1, 2}, {0, 0}}, 1.0)));
}

TEST_CASE("parallel reduction matches the serial reference") {
  RngStream rng(3, 0);
  for (std::size_t n : {std::size_t{10}, kParallelThreshold - 1, kParallelThreshold, 5 * kBlock + 17}) {
    WeightedSupport s;
    for (std::size_t i = 0; i < n; ++i) {
      s.values.push_back(static_cast<double>(rng.uniform_int(0, 5000)));
      s.weights.push_back(rng.uniform01());
    }
    for (double scale : {-0.3, -1e-3, 1e-4, 0.02}) {
      const double serial = log_sum_exp_serial(s, scale);
      CHECK(log_sum_exp(s, scale) == doctest::Approx(serial).epsilon(1e-13));
      if (n <= kBlock) CHECK(log_sum_exp(s, scale) == serial);
      const double direct = sum_exp_direct(s, scale);
      if (std::isfinite(direct) && direct > 0) {
        CHECK(log_sum_exp_serial(s, scale) == doctest::Approx(std::log(direct)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("parallel reduction does not depend on the thread count") {
  RngStream rng(4, 0);
  WeightedSupport s;
  for (std::size_t i = 0; i < 9 * kBlock + 5; ++i) {
    s.values.push_back(static_cast<double>(rng.uniform_int(0, 100000)));
    s.weights.push_back(rng.uniform01());
  }
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = log_sum_exp(s, -0.001);
  omp_set_num_threads(4);
  const double four = log_sum_exp(s, -0.001);
  omp_set_num_threads(saved);
  CHECK(one == four);
}
