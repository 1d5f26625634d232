#include <doctest.h>

#include <cmath>
#include <sstream>

#include "marea/error.hpp"
#include "marea/output.hpp"
#include "marea/simulator.hpp"

using namespace marea;

namespace {

ServiceConfig service(int id, double w_th, SyntheticModel traffic, SyntheticModel channel) {
  ServiceConfig s;
  s.spec = {id, w_th, 1e-3};
  s.traffic = std::move(traffic);
  s.channel = std::move(channel);
  return s;
}

ScenarioConfig small(int n_cell, std::int64_t horizon) {
  ScenarioConfig c;
  c.n_cell = n_cell;
  c.t_obs = 200;
  c.t_out = 100;
  c.horizon = horizon;
  return c;
}

std::string csv_of(const Metrics& m) {
  std::ostringstream o;
  write_summary_csv(o, m);
  write_ccdf_csv(o, m);
  write_alloc_csv(o, m);
  return o.str();
}

}  // namespace

TEST_CASE("zero traffic") {
  auto c = small(10, 1000);
  c.services = {service(0, 5, SyntheticModel::constant(0), SyntheticModel::constant(10)),
                service(1, 5, SyntheticModel::constant(0), SyntheticModel::constant(10))};
  CellSimulation sim(c);
  while (!sim.finished()) {
    sim.step();
    CHECK(sim.queue(0).empty());
    CHECK(sim.queue(1).empty());
  }
  const auto m = sim.finish();
  for (const auto& s : m.services) {
    CHECK(s.violation_prob == 0.0);
    CHECK(s.packets == 0);
  }
}

TEST_CASE("dominating capacity gives one-slot delays") {
  auto c = small(4, 2000);
  c.services = {service(0, 5, SyntheticModel::constant(100), SyntheticModel::constant(25))};
  const auto m = run(c);
  const auto& s = m.services[0];
  CHECK(s.packets == static_cast<std::uint64_t>(c.horizon - c.t_obs));
  CHECK(s.max_ms == 1.0);
  CHECK(s.mean_ms == 1.0);
  CHECK(s.violation_prob == 0.0);
}

TEST_CASE("ref3 and marea coincide for one service") {
  auto c = small(8, 5000);
  c.services = {service(0, 4, SyntheticModel::two_point(0, 0.5, 200, 0.5), SyntheticModel::constant(30))};
  c.controller = ControllerKind::marea;
  const auto a = run(c);
  c.controller = ControllerKind::ref3;
  const auto b = run(c);
  CHECK(a.services[0].histogram.counts() == b.services[0].histogram.counts());
}

TEST_CASE("ref4 and marea coincide while every FSM stays in A") {
  auto c = small(30, 3000);
  c.services = {service(0, 50, SyntheticModel::uniform_integer(0, 60), SyntheticModel::constant(20)),
                service(1, 50, SyntheticModel::uniform_integer(0, 60), SyntheticModel::constant(20))};
  c.controller = ControllerKind::marea;
  CellSimulation sim(c);
  bool left_a = false;
  while (!sim.finished()) {
    sim.step();
    for (const auto& f : sim.fsm()) left_a |= f.state != FsmState::A;
  }
  REQUIRE_FALSE(left_a);
  const auto a = sim.finish();
  c.controller = ControllerKind::ref4;
  const auto b = run(c);
  CHECK(csv_of(a) == csv_of(b));
}

TEST_CASE("identical config and seed reproduce the metrics") {
  auto c = small(12, 3000);
  c.services = {service(0, 3, SyntheticModel::two_point(0, 0.6, 150, 0.4), SyntheticModel::uniform_integer(5, 15)),
                service(1, 6, SyntheticModel::uniform_integer(0, 90), SyntheticModel::constant(12)),
                service(2, 9, SyntheticModel::constant(40), SyntheticModel::two_point(8, 0.5, 16, 0.5))};
  for (auto kind : {ControllerKind::marea, ControllerKind::ref1, ControllerKind::ref2, ControllerKind::ref3,
                    ControllerKind::ref4}) {
    c.controller = kind;
    CHECK(csv_of(run(c)) == csv_of(run(c)));
  }
  c.estimator = UtilizationEstimator::gmm;
  c.controller = ControllerKind::marea;
  CHECK(csv_of(run(c)) == csv_of(run(c)));
  const auto base = csv_of(run(c));
  c.seed = 2;
  CHECK(csv_of(run(c)) != base);
}

TEST_CASE("ccdf is non-increasing and hits the violation probability at zero") {
  auto c = small(6, 6000);
  c.services = {service(0, 4, SyntheticModel::two_point(0, 0.5, 200, 0.5), SyntheticModel::constant(20))};
  const auto m = run(c);
  const auto& s = m.services[0];
  REQUIRE(s.ccdf.size() == 81);
  for (std::size_t i = 1; i < s.ccdf.size(); ++i) CHECK(s.ccdf[i].p <= s.ccdf[i - 1].p);
  CHECK(s.ccdf[20].x == 0.0);
  CHECK(s.ccdf[20].p == s.violation_prob);
  CHECK(s.ccdf[0].p == 1.0);
}

TEST_CASE("ccdf examples") {
  const std::vector<double> half(10, 5.0);
  const auto a = ccdf(half, 10.0);
  for (const auto& p : a) CHECK(p.p == (p.x < -0.5 ? 1.0 : 0.0));
  const std::vector<double> pair{5.0, 15.0};
  const auto b = ccdf(pair, 10.0);
  CHECK(b[20].p == 0.5);
  CHECK(b[0].p == 1.0);
  CHECK_THROWS_AS(ccdf(std::vector<double>{}, 10.0), InputError);
  const auto g = ccdf_grid();
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 3.0);
  CHECK(g.size() == 81);
}

TEST_CASE("qldr proportional split") {
  const std::vector<double> ones{1, 1, 1}, w{1, 1, 1};
  CHECK(qldr_allocate(ones, ones, w, 99) == std::vector<int>{33, 33, 33});
  const std::vector<double> q{2, 1, 1};
  CHECK(qldr_allocate(q, ones, w, 100) == std::vector<int>{50, 25, 25});
  const std::vector<double> zeros{0, 0, 0};
  CHECK(qldr_allocate(zeros, ones, w, 10) == std::vector<int>{4, 3, 3});
}

TEST_CASE("ref1 ignores guarantees") {
  auto c = small(10, 1500);
  c.controller = ControllerKind::ref1;
  c.services = {service(0, 5, SyntheticModel::uniform_integer(0, 150), SyntheticModel::constant(10)),
                service(1, 5, SyntheticModel::uniform_integer(0, 150), SyntheticModel::constant(10))};
  CellSimulation sim(c);
  while (!sim.finished()) {
    sim.step();
    if (sim.tti() > c.t_obs) CHECK(sim.rt_allocation() == std::vector<int>{0, 0});
    CHECK(sim.last_rbs_used()[0] + sim.last_rbs_used()[1] <= c.n_cell);
  }
}

TEST_CASE("packets pending past the budget at the horizon count as violations") {
  auto c = small(1, 400);
  c.controller = ControllerKind::ref3;
  // 300 bits per TTI into a 10-bit link: queue grows without bound
  c.services = {service(0, 5, SyntheticModel::constant(300), SyntheticModel::constant(10))};
  const auto m = run(c);
  CHECK(m.services[0].packets > 0);
  CHECK(m.services[0].violation_prob == 1.0);
}

TEST_CASE("anomalies scale arrivals over their range") {
  auto c = small(40, 600);
  c.services = {service(0, 5, SyntheticModel::constant(100), SyntheticModel::constant(10))};
  c.services[0].anomalies = {{300, 310, 3.0}};
  CellSimulation sim(c);
  std::uint64_t before = 0;
  while (!sim.finished()) {
    sim.step();
    const auto now = sim.bits_arrived(0);
    const auto expected = (sim.tti() - 1 >= 300 && sim.tti() - 1 < 310) ? 300u : 100u;
    CHECK(now - before == expected);
    before = now;
  }
}

TEST_CASE("trace sources replay cyclically") {
  auto c = small(10, 500);
  ServiceConfig s;
  s.spec = {0, 5, 1e-3};
  ArrivalTrace a;
  a.bits_per_tti = {10, 20, 30};
  ChannelTrace ch;
  ch.bits_per_rb = {5};
  s.traffic = a;
  s.channel = ch;
  c.services = {s};
  CellSimulation sim(c);
  for (int i = 0; i < 7; ++i) sim.step();
  CHECK(sim.bits_arrived(0) == 10 + 20 + 30 + 10 + 20 + 30 + 10);
}

TEST_CASE("scenario validation") {
  auto c = small(2, 1000);
  c.services = {service(0, 5, SyntheticModel::constant(1), SyntheticModel::constant(1)),
                service(1, 5, SyntheticModel::constant(1), SyntheticModel::constant(1)),
                service(2, 5, SyntheticModel::constant(1), SyntheticModel::constant(1))};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.n_cell = 3;
  CHECK_NOTHROW(c.validate());
  c.horizon = 250;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.horizon = 1000;
  c.services[1].channel = SyntheticModel::constant(0);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.services[1].channel = SyntheticModel::constant(1);
  c.services[1].spec.epsilon = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS_AS(controller_from_string("ref9"), InputError);
}

TEST_CASE("alloc rows follow the near-RT period") {
  auto c = small(12, 700);
  c.services = {service(0, 5, SyntheticModel::uniform_integer(0, 50), SyntheticModel::constant(10)),
                service(1, 8, SyntheticModel::uniform_integer(0, 50), SyntheticModel::constant(10))};
  const auto m = run(c);
  // decisions at 200, 300, ..., 600
  CHECK(m.allocations.size() == 5 * 2);
  CHECK(m.allocation_iterations.size() == 5);
  for (const auto& a : m.allocations) CHECK(a.n_min >= 1);
}
