// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "marea/capacity.hpp"
#include "marea/kernels.hpp"
#include "marea/near_rt.hpp"
#include "marea/rng.hpp"

namespace {

using namespace marea;

kernels::WeightedSupport random_support(std::size_t n) {
  RngStream rng(42, 0);
  kernels::WeightedSupport s;
  for (std::size_t i = 0; i < n; ++i) {
    s.values.push_back(static_cast<double>(i) + rng.uniform01());
    s.weights.push_back(rng.uniform01() / static_cast<double>(n));
  }
  return s;
}

void BM_LogSumExpSerial(benchmark::State& st) {
  const auto s = random_support(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::log_sum_exp_serial(s, -0.013));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_LogSumExpParallel(benchmark::State& st) {
  const auto s = random_support(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::log_sum_exp(s, -0.013));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

BENCHMARK(BM_LogSumExpSerial)->RangeMultiplier(8)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_LogSumExpParallel)->RangeMultiplier(8)->Range(1 << 10, 1 << 22);

// One service with ~4000 TTIs of transmitted packets and usage history.
struct TableFixture {
  ServiceSpec spec{0, 10.0, 1e-3};
  ServiceObservation obs;
  AllocationParams params;
  int n_cell = 0;

  explicit TableFixture(int cells) : n_cell(cells) {
    RngStream rng(7, 1);
    for (int t = 0; t < 4000; ++t) {
      obs.arrivals.push_back(rng.uniform01() < 0.5 ? 0 : 200);
      const auto rbs = static_cast<std::uint32_t>(1 + rng.uniform01() * 8);
      obs.x_con.append({0, t, 10ull * rbs + static_cast<std::uint64_t>(rng.uniform01() * 5), rbs});
      if (t % 4 == 0) obs.rb_usage.push_back(static_cast<std::uint32_t>(rng.uniform01() * cells));
    }
  }
};

void BM_DelayBoundTableSerial(benchmark::State& st) {
  const TableFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(delay_bound_table_serial(f.spec, f.obs, f.n_cell, f.n_cell, f.params));
}

void BM_DelayBoundTableParallel(benchmark::State& st) {
  const TableFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(delay_bound_table(f.spec, f.obs, f.n_cell, f.n_cell, f.params));
}

BENCHMARK(BM_DelayBoundTableSerial)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DelayBoundTableParallel)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
