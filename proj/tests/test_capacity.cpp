#include <doctest.h>

#include <numeric>
#include <sstream>

#include "marea/capacity.hpp"
#include "marea/error.hpp"

using namespace marea;

namespace {

ConcatPerRbVector constant_vector(std::size_t len, std::uint64_t per_rb) {
  ConcatPerRbVector x;
  for (std::size_t i = 0; i < len; ++i) x.append({0, 0, per_rb, 1});
  return x;
}

std::vector<double> values(const std::vector<PerRbValue>& v) {
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.value());
  return out;
}

}  // namespace

TEST_CASE("expand packet") {
  CHECK(values(expand_packet({0, 0, 100, 4})) == std::vector<double>{25, 25, 25, 25});
  const auto thirds = expand_packet({0, 0, 100, 3});
  REQUIRE(thirds.size() == 3);
  for (const auto& t : thirds) CHECK(t == PerRbValue{100, 3});
  // exact: three entries of 100/3 add to exactly 100
  CHECK(thirds[0].bits * 3 == 100 * thirds[0].rbs);
  CHECK(values(expand_packet({0, 0, 1, 1})) == std::vector<double>{1});
  CHECK_THROWS_AS(expand_packet({0, 0, 100, 0}), InputError);
}

TEST_CASE("concatenation keeps transmission order") {
  const std::vector<PacketTxRecord> ab{{0, 0, 100, 4}, {0, 1, 60, 2}};
  CHECK(values(concat_window(ab).entries()) == std::vector<double>{25, 25, 25, 25, 30, 30});
  const std::vector<PacketTxRecord> ba{{0, 0, 60, 2}, {0, 1, 100, 4}};
  CHECK(values(concat_window(ba).entries()) == std::vector<double>{30, 30, 25, 25, 25, 25});
  CHECK(concat_window({}).empty());
  CHECK(concat_window(ab).size() == 6);
}

TEST_CASE("region count follows the cell") {
  const auto s = build_capacity_samples(constant_vector(100, 10), 10, 25);
  CHECK(s.n_add == 15);
  CHECK(s.per_n_samples.size() == 16);
  CHECK_THROWS_AS(build_capacity_samples(constant_vector(100, 10), 26, 25), InputError);
}

TEST_CASE("grouping discards the trailing partial group") {
  const auto s = build_capacity_samples(constant_vector(12, 10), 5, 5);
  CHECK(s.per_n_samples[0] == std::vector<std::uint64_t>{50, 50});
}

TEST_CASE("short windows extrapolate one sample") {
  ConcatPerRbVector x;
  for (std::uint64_t v : {10u, 20u, 30u, 40u}) x.append({0, 0, v, 1});
  bool degraded = false;
  CHECK(group_sums(x, 5, &degraded) == std::vector<std::uint64_t>{125});
  CHECK(degraded);
  const auto s = build_capacity_samples(x, 5, 5);
  CHECK(s.per_n_samples[0] == std::vector<std::uint64_t>{125});
}

TEST_CASE("group sums of fractional entries are exact") {
  // 100/3 per RB: three entries sum to exactly 100
  ConcatPerRbVector x;
  x.append({0, 0, 100, 3});
  x.append({0, 0, 100, 3});
  CHECK(group_sums(x, 3) == std::vector<std::uint64_t>{100, 100});
  CHECK(group_sums(x, 2) == std::vector<std::uint64_t>{67, 67, 67});
}

TEST_CASE("constant capacity gives constant samples") {
  const auto s = build_capacity_samples(constant_vector(997, 7), 3, 12);
  for (int n = 0; n <= s.n_add; ++n) {
    for (auto v : s.per_n_samples[n]) CHECK(v == static_cast<std::uint64_t>((n + 3) * 7));
  }
}

TEST_CASE("transmission records CSV") {
  std::istringstream in("tti,service_id,packet_bits,rbs_used\n0,0,100,4\n0,1,5,1\n3,0,60,2\n");
  const auto r = load_tx_records(in, 0);
  REQUIRE(r.size() == 2);
  CHECK(r[1].bits == 60);
  CHECK(r[1].rbs_used == 2);
  CHECK(r[1].tti == 3);
  std::istringstream bad("tti,service_id,packet_bits,rbs_used\n0,0,100,0\n");
  CHECK_THROWS(load_tx_records(bad, 0));
}
