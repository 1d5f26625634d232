#include <doctest.h>

#include <sstream>

#include "marea/error.hpp"
#include "marea/traces.hpp"

using namespace marea;

TEST_CASE("arrival trace gaps are zero-filled") {
  std::istringstream in("tti,service_id,bits\n0,0,100\n2,0,50\n");
  const auto t = load_arrival_trace(in, 0);
  CHECK(t.bits_per_tti == std::vector<std::uint64_t>{100, 0, 50});
}

TEST_CASE("arrival trace packet sizes") {
  std::istringstream in("tti,service_id,bits,packet_sizes\n0,0,100,60;40\n");
  const auto t = load_arrival_trace(in, 0);
  REQUIRE(t.size() == 1);
  CHECK(t.packets_at(0) == std::vector<std::uint64_t>{60, 40});
}

TEST_CASE("packet sizes must add up to the TTI bits") {
  std::istringstream in("tti,service_id,bits,packet_sizes\n0,0,100,60;50\n");
  CHECK_THROWS_AS(load_arrival_trace(in, 0), ValidationError);
}

TEST_CASE("negative bits are a validation error") {
  std::istringstream in("tti,service_id,bits\n0,0,-5\n");
  CHECK_THROWS_AS(load_arrival_trace(in, 0), ValidationError);
}

TEST_CASE("malformed rows report their line") {
  std::istringstream in("tti,service_id,bits\n0,0,100\n1,0,abc\n");
  try {
    load_arrival_trace(in, 0);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream dup("tti,service_id,bits\n3,0,1\n3,0,2\n");
  CHECK_THROWS_AS(load_arrival_trace(dup, 0), ParseError);
}

TEST_CASE("rows of other services are skipped") {
  std::istringstream in("tti,service_id,bits\n0,0,10\n0,1,99\n1,0,20\n");
  CHECK(load_arrival_trace(in, 0).bits_per_tti == std::vector<std::uint64_t>{10, 20});
}

TEST_CASE("traces wrap around past their end") {
  ArrivalTrace t;
  t.bits_per_tti = {1, 2, 3};
  CHECK(t.bits_at(4) == 2);
  CHECK(t.packets_at(3) == std::vector<std::uint64_t>{1});
  ChannelTrace c;
  c.bits_per_rb = {7, 9};
  CHECK(c.at(5) == 9);
}

TEST_CASE("zero-bit TTIs carry no packets") {
  ArrivalTrace t;
  t.bits_per_tti = {0};
  CHECK(t.packets_at(0).empty());
}

TEST_CASE("arrival trace round trip") {
  ArrivalTrace t;
  t.service_id = 2;
  t.bits_per_tti = {100, 0, 50, 30};
  t.packet_sizes_per_tti = {{60, 40}, {}, {50}, {10, 10, 10}};
  std::stringstream buf;
  write_arrival_trace(buf, t);
  CHECK(load_arrival_trace(buf, 2) == t);

  ArrivalTrace plain;
  plain.bits_per_tti = {5, 6, 0, 7};
  std::stringstream buf2;
  write_arrival_trace(buf2, plain);
  CHECK(load_arrival_trace(buf2, 0) == plain);
}

TEST_CASE("channel trace") {
  std::istringstream in("tti,service_id,bits_per_rb\n0,0,25\n3,0,30\n");
  CHECK(load_channel_trace(in, 0).bits_per_rb == std::vector<std::uint64_t>{25, 25, 25, 30});
  std::istringstream zero("tti,service_id,bits_per_rb\n0,0,0\n");
  CHECK_THROWS_AS(load_channel_trace(zero, 0), ValidationError);
}

TEST_CASE("synthetic draws") {
  RngStream rng(1, 0);
  CHECK(sample_arrival(SyntheticModel::constant(100), rng) == 100);
  CHECK(sample_bits_per_rb(SyntheticModel::constant(25), rng) == 25);
  CHECK(sample_arrival(SyntheticModel::empirical_table({42}, {1.0}), rng) == 42);
}

TEST_CASE("seeded streams repeat") {
  const auto m = SyntheticModel::uniform_integer(10, 20);
  RngStream a(17, 3), b(17, 3), c(18, 3);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = sample_bits_per_rb(m, a);
    CHECK(x == sample_bits_per_rb(m, b));
    CHECK(x >= 10);
    CHECK(x <= 20);
    differs |= x != sample_bits_per_rb(m, c);
  }
  CHECK(differs);
}

TEST_CASE("law of large numbers") {
  constexpr int n = 1'000'000;
  RngStream rng(5, 0);
  const auto arr = SyntheticModel::two_point(0, 0.5, 200, 0.5);
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_arrival(arr, rng));
  CHECK(sum / n == doctest::Approx(100.0).epsilon(0.01));

  const auto ch = SyntheticModel::two_point(10, 0.9, 50, 0.1);
  const double expected = 0.9 * 10 + 0.1 * 50;
  sum = 0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_bits_per_rb(ch, rng));
  CHECK(sum / n == doctest::Approx(expected).epsilon(0.01));
  CHECK(ch.mean() == doctest::Approx(expected));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SyntheticModel::two_point(0, 0.5, 200, 0.6).validate(false), ValidationError);
  CHECK_NOTHROW(SyntheticModel::two_point(0, 0.5, 200, 0.5).validate(false));
  CHECK_THROWS_AS(SyntheticModel::two_point(0, 0.5, 200, 0.5).validate(true), ValidationError);
  CHECK(model_kind_from_string(to_string(ModelKind::uniform_integer)) == ModelKind::uniform_integer);
}
