#include "marea/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "marea/error.hpp"

namespace marea {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::marea: return "marea";
    case ControllerKind::ref1: return "ref1";
    case ControllerKind::ref2: return "ref2";
    case ControllerKind::ref3: return "ref3";
    case ControllerKind::ref4: return "ref4";
  }
  return "?";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "marea") return ControllerKind::marea;
  if (name == "ref1") return ControllerKind::ref1;
  if (name == "ref2") return ControllerKind::ref2;
  if (name == "ref3") return ControllerKind::ref3;
  if (name == "ref4") return ControllerKind::ref4;
  throw InputError("unknown controller '" + name + "' (expected marea, ref1, ref2, ref3 or ref4)");
}

const char* to_string(UtilizationEstimator e) { return e == UtilizationEstimator::gmm ? "gmm" : "empirical"; }

UtilizationEstimator estimator_from_string(const std::string& name) {
  if (name == "empirical") return UtilizationEstimator::empirical;
  if (name == "gmm") return UtilizationEstimator::gmm;
  throw InputError("unknown estimator '" + name + "' (expected empirical or gmm)");
}

ControllerStrategy controller_for(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::marea: return {true, false, true, true};
    case ControllerKind::ref1: return {false, false, true, false};
    case ControllerKind::ref2: return {false, true, false, false};
    case ControllerKind::ref3: return {true, false, false, false};
    case ControllerKind::ref4: return {true, false, true, false};
  }
  throw InputError("unknown controller");
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (n_cell <= 0) fail("n_cell must be positive");
  if (!(t_slot_ms > 0.0)) fail("t_slot_ms must be positive");
  if (t_obs <= 0 || t_out <= 0) fail("t_obs and t_out must be positive");
  if (horizon < static_cast<std::int64_t>(t_obs) + t_out) fail("horizon must be at least t_obs + t_out");
  if (services.empty()) fail("at least one service is required");
  if (static_cast<int>(services.size()) > n_cell) fail("more services than RBs");
  if (qldr_period <= 0) fail("qldr_period must be positive");
  if (gmm_components <= 0) fail("gmm_components must be positive");
  try {
    theta.validate();
  } catch (const InputError& e) {
    fail(e.what());
  }
  for (std::size_t m = 0; m < services.size(); ++m) {
    const auto& s = services[m];
    const std::string who = "service " + std::to_string(s.spec.id);
    if (s.spec.id != static_cast<int>(m)) fail(who + ": service ids must be 0..|M|-1 in order");
    try {
      s.spec.validate();
      RtThresholds::make(s.spec.w_th_ms, t_slot_ms, eta, tau);
    } catch (const InputError& e) {
      fail(e.what());
    }
    if (const auto* model = std::get_if<SyntheticModel>(&s.traffic)) model->validate(false);
    if (const auto* model = std::get_if<SyntheticModel>(&s.channel)) model->validate(true);
    if (const auto* tr = std::get_if<ArrivalTrace>(&s.traffic); tr && tr->bits_per_tti.empty()) {
      fail(who + ": arrival trace is empty");
    }
    if (const auto* tr = std::get_if<ChannelTrace>(&s.channel); tr && tr->bits_per_rb.empty()) {
      fail(who + ": channel trace is empty");
    }
    for (const auto& a : s.anomalies) {
      if (a.end < a.start || !(a.factor >= 0.0)) fail(who + ": anomaly needs start <= end and factor >= 0");
    }
  }
}

std::vector<int> qldr_allocate(std::span<const double> avg_queue_bits, std::span<const double> avg_bits_per_rb,
                               std::span<const double> w_th_ms, int n_cell) {
  const std::size_t m_count = avg_queue_bits.size();
  if (avg_bits_per_rb.size() != m_count || w_th_ms.size() != m_count || m_count == 0) {
    throw InputError("qldr_allocate: length mismatch");
  }
  std::vector<double> score(m_count, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (avg_bits_per_rb[m] > 0.0 && w_th_ms[m] > 0.0) score[m] = avg_queue_bits[m] / avg_bits_per_rb[m] / w_th_ms[m];
    total += score[m];
  }
  if (!(total > 0.0)) {
    std::fill(score.begin(), score.end(), 1.0);
    total = static_cast<double>(m_count);
  }
  std::vector<int> out(m_count);
  std::vector<double> frac(m_count);
  int assigned = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    const double quota = n_cell * score[m] / total;
    out[m] = static_cast<int>(std::floor(quota));
    frac[m] = quota - out[m];
    assigned += out[m];
  }
  std::vector<std::size_t> order(m_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < n_cell; k = (k + 1) % m_count, ++assigned) ++out[order[k]];
  return out;
}

std::vector<double> ccdf_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 80; ++k) g.push_back((k - 20) / 20.0);
  return g;
}

std::vector<CcdfPoint> ccdf(std::span<const double> delays_ms, double w_th_ms) {
  if (delays_ms.empty()) throw InputError("ccdf of an empty delay set");
  if (!(w_th_ms > 0.0)) throw InputError("delay budget must be positive");
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(delays_ms.size());
  for (double x : ccdf_grid()) {
    std::size_t above = 0;
    for (double w : delays_ms) above += (w - w_th_ms) / w_th_ms > x;
    out.push_back({x, static_cast<double>(above) / n});
  }
  return out;
}

void DelayHistogram::add(std::int64_t ttis, std::uint64_t count) {
  if (ttis < 0) throw InputError("negative delay");
  const auto i = static_cast<std::size_t>(ttis);
  if (counts_.size() <= i) counts_.resize(i + 1, 0);
  counts_[i] += count;
  total_ += count;
}

std::int64_t DelayHistogram::quantile(double q) const {
  if (total_ == 0) throw InputError("quantile of an empty histogram");
  const double target = q * static_cast<double>(total_);
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    acc += counts_[i];
    if (static_cast<double>(acc) >= target && acc > 0) return static_cast<std::int64_t>(i);
  }
  return static_cast<std::int64_t>(counts_.size()) - 1;
}

std::uint64_t DelayHistogram::count_above(double ms, double t_slot_ms) const {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (static_cast<double>(i) * t_slot_ms > ms) n += counts_[i];
  }
  return n;
}

std::uint64_t DelayHistogram::count_at_least(double ms, double t_slot_ms) const {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (static_cast<double>(i) * t_slot_ms >= ms) n += counts_[i];
  }
  return n;
}

std::vector<CcdfPoint> DelayHistogram::ccdf(double w_th_ms, double t_slot_ms) const {
  std::vector<CcdfPoint> out;
  if (total_ == 0) return out;
  const double n = static_cast<double>(total_);
  for (double x : ccdf_grid()) {
    std::uint64_t above = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if ((static_cast<double>(i) * t_slot_ms - w_th_ms) / w_th_ms > x) above += counts_[i];
    }
    out.push_back({x, static_cast<double>(above) / n});
  }
  return out;
}

void DelayHistogram::merge(const DelayHistogram& other) {
  if (counts_.size() < other.counts_.size()) counts_.resize(other.counts_.size(), 0);
  for (std::size_t i = 0; i < other.counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

CellSimulation::CellSimulation(ScenarioConfig config) : cfg_(std::move(config)), strategy_(controller_for(cfg_.controller)) {
  cfg_.validate();
  const std::size_t m_count = cfg_.services.size();
  queues_.resize(m_count);
  windows_.resize(m_count);
  delays_.resize(m_count);
  fsm_.assign(m_count, FsmRecord{});
  last_used_.assign(m_count, 0);
  bits_arrived_.assign(m_count, 0);
  bits_sent_.assign(m_count, 0);
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto& s = cfg_.services[m];
    traffic_rng_.emplace_back(cfg_.seed, 2 * m);
    channel_rng_.emplace_back(cfg_.seed, 2 * m + 1);
    thresholds_.push_back(RtThresholds::make(s.spec.w_th_ms, cfg_.t_slot_ms, cfg_.eta, cfg_.tau));
    q_t_.push_back(thresholds_.back().q_t);
    if (const auto* tr = std::get_if<ArrivalTrace>(&s.traffic)) {
      note_cyclic_extension("arrival trace of service " + std::to_string(m), tr->size(), cfg_.horizon);
    }
    if (const auto* tr = std::get_if<ChannelTrace>(&s.channel)) {
      note_cyclic_extension("channel trace of service " + std::to_string(m), tr->bits_per_rb.size(), cfg_.horizon);
    }
  }
  baseline_ = equal_split();
  rt_alloc_ = baseline_;
}

std::vector<int> CellSimulation::equal_split() const {
  const int m_count = static_cast<int>(cfg_.services.size());
  std::vector<int> out(static_cast<std::size_t>(m_count), cfg_.n_cell / m_count);
  for (int m = 0; m < cfg_.n_cell % m_count; ++m) ++out[m];
  return out;
}

void CellSimulation::set_debug_log(std::ostream* out) {
  debug_ = out;
  if (debug_) *debug_ << "tti,service_id,state,n_req,n_min_i,rbs_used,queue_bits,head_wait_ttis\n";
}

std::vector<std::uint64_t> CellSimulation::draw_arrivals(std::size_t m) {
  const auto& s = cfg_.services[m];
  std::vector<std::uint64_t> packets;
  if (const auto* model = std::get_if<SyntheticModel>(&s.traffic)) {
    const auto bits = sample_arrival(*model, traffic_rng_[m]);
    if (bits > 0) packets.push_back(bits);
  } else {
    packets = std::get<ArrivalTrace>(s.traffic).packets_at(tti_);
  }
  double factor = 1.0;
  for (const auto& a : s.anomalies) {
    if (tti_ >= a.start && tti_ < a.end) factor *= a.factor;
  }
  if (factor != 1.0) {
    std::vector<std::uint64_t> scaled;
    for (auto p : packets) {
      const auto v = static_cast<std::uint64_t>(std::llround(static_cast<double>(p) * factor));
      if (v > 0) scaled.push_back(v);
    }
    packets = std::move(scaled);
  }
  return packets;
}

std::uint64_t CellSimulation::draw_channel(std::size_t m) {
  const auto& s = cfg_.services[m];
  if (const auto* model = std::get_if<SyntheticModel>(&s.channel)) return sample_bits_per_rb(*model, channel_rng_[m]);
  return std::get<ChannelTrace>(s.channel).at(tti_);
}

std::vector<ServiceObservation> CellSimulation::observations() {
  std::vector<ServiceObservation> obs(queues_.size());
  for (std::size_t m = 0; m < queues_.size(); ++m) {
    const auto& w = windows_[m];
    auto& o = obs[m];
    o.arrivals.assign(w.arrivals.begin(), w.arrivals.end());
    if (o.arrivals.empty()) o.arrivals.push_back(0);
    for (const auto& r : w.tx) o.x_con.append(r);
    if (o.x_con.empty()) {
      // nothing transmitted: fall back to the channel as seen by one RB per TTI
      for (auto b : w.bits_per_rb) o.x_con.append({static_cast<int>(m), 0, b, 1});
    }
    o.rb_usage.assign(w.rb_usage.begin(), w.rb_usage.end());
    if (o.rb_usage.empty()) o.rb_usage.push_back(0);
    if (cfg_.estimator == UtilizationEstimator::gmm) {
      std::vector<double> x(o.rb_usage.begin(), o.rb_usage.end());
      GmmFitOptions opt;
      opt.components = std::min<int>(cfg_.gmm_components, static_cast<int>(x.size()));
      RngStream rng(cfg_.seed, 1'000'000 + static_cast<std::uint64_t>(period_) * 1024 + m);
      o.usage_gmm = fit_gmm_em(x, opt, rng).mixture;
    }
  }
  return obs;
}

void CellSimulation::near_rt_decision() {
  const auto obs = observations();
  std::vector<ServiceSpec> specs;
  for (const auto& s : cfg_.services) specs.push_back(s.spec);
  AllocationParams params;
  params.theta = cfg_.theta;
  params.t_slot_ms = cfg_.t_slot_ms;
  params.estimator = cfg_.estimator;
  const auto outcome = allocate(specs, obs, cfg_.n_cell, params);
  baseline_ = outcome.allocation.n_min;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    allocations_.push_back({period_, tti_, specs[m].id, baseline_[m], outcome.allocation.w_est_ms[m],
                            outcome.allocation.objective});
  }
  allocation_iterations_.push_back(outcome.iterations);
  objective_histories_.push_back(outcome.objective_history);
  ++period_;
}

void CellSimulation::qldr_decision() {
  const std::size_t m_count = queues_.size();
  std::vector<double> q(m_count), b(m_count), w_th(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto& w = windows_[m];
    q[m] = w.qldr_queue.empty() ? 0.0 : std::accumulate(w.qldr_queue.begin(), w.qldr_queue.end(), 0.0) /
                                            static_cast<double>(w.qldr_queue.size());
    b[m] = w.qldr_bprb.empty() ? 1.0 : std::accumulate(w.qldr_bprb.begin(), w.qldr_bprb.end(), 0.0) /
                                           static_cast<double>(w.qldr_bprb.size());
    w_th[m] = cfg_.services[m].spec.w_th_ms;
  }
  baseline_ = qldr_allocate(q, b, w_th, cfg_.n_cell);
  for (std::size_t m = 0; m < m_count; ++m) {
    allocations_.push_back({period_, tti_, cfg_.services[m].spec.id, baseline_[m], kInf * 0.0, kInf * 0.0});
  }
  ++period_;
}

void CellSimulation::step() {
  if (finished()) return;
  const std::size_t m_count = queues_.size();
  const bool warm = tti_ < cfg_.t_obs;

  if (!warm) {
    const std::int64_t since = tti_ - cfg_.t_obs;
    if (strategy_.martingale_guarantees && since % cfg_.t_out == 0) near_rt_decision();
    if (strategy_.qldr_guarantees && since % cfg_.qldr_period == 0) qldr_decision();
  }

  for (std::size_t m = 0; m < m_count; ++m) {
    for (auto p : draw_arrivals(m)) {
      queues_[m].push(tti_, p);
      bits_arrived_[m] += p;
    }
  }
  std::vector<std::uint64_t> bprb(m_count);
  for (std::size_t m = 0; m < m_count; ++m) bprb[m] = draw_channel(m);

  Sharing sharing = Sharing::none;
  if (warm) {
    rt_alloc_ = equal_split();
  } else if (!strategy_.martingale_guarantees && !strategy_.qldr_guarantees) {
    rt_alloc_.assign(m_count, 0);
    sharing = Sharing::edf;
  } else {
    rt_alloc_ = baseline_;
    if (strategy_.mitigation) {
      for (std::size_t m = 0; m < m_count; ++m) fsm_[m] = fsm_step(queues_[m].head_wait(tti_), fsm_[m], thresholds_[m]);
      rt_alloc_ = mitigate(baseline_, fsm_);
    }
    if (strategy_.sharing) sharing = Sharing::edf;
  }

  auto outcome = schedule_tti(queues_, rt_alloc_, bprb, q_t_, cfg_.n_cell, tti_, sharing);
  last_used_ = outcome.rbs_used;
  last_completed_ = std::move(outcome.completed);

  for (const auto& c : last_completed_) {
    const auto m = static_cast<std::size_t>(c.service);
    bits_sent_[m] += c.packet.size;
    auto& tx = windows_[m].tx;
    tx.push_back({c.service, tti_, c.packet.size, c.packet.rbs_touched});
    if (c.packet.arrival_tti >= cfg_.t_obs) delays_[m].add(tti_ - c.packet.arrival_tti + 1);
  }

  for (std::size_t m = 0; m < m_count; ++m) {
    auto& w = windows_[m];
    const auto arrived = std::accumulate(queues_[m].packets.begin(), queues_[m].packets.end(), std::uint64_t{0},
                                         [&](std::uint64_t acc, const Packet& p) {
                                           return p.arrival_tti == tti_ ? acc + p.size : acc;
                                         });
    // packets that arrived and completed within this TTI are no longer queued
    std::uint64_t arrived_done = 0;
    for (const auto& c : last_completed_) {
      if (static_cast<std::size_t>(c.service) == m && c.packet.arrival_tti == tti_) arrived_done += c.packet.size;
    }
    w.arrivals.push_back(arrived + arrived_done);
    if (w.arrivals.size() > static_cast<std::size_t>(cfg_.t_obs)) w.arrivals.pop_front();
    w.bits_per_rb.push_back(bprb[m]);
    if (w.bits_per_rb.size() > static_cast<std::size_t>(cfg_.t_obs)) w.bits_per_rb.pop_front();
    w.rb_usage.push_back(static_cast<std::uint32_t>(last_used_[m]));
    if (w.rb_usage.size() > static_cast<std::size_t>(cfg_.t_out)) w.rb_usage.pop_front();
    while (!w.tx.empty() && w.tx.front().tti <= tti_ - cfg_.t_obs) w.tx.pop_front();
    if (strategy_.qldr_guarantees) {
      w.qldr_queue.push_back(static_cast<double>(queues_[m].queued_bits));
      w.qldr_bprb.push_back(static_cast<double>(bprb[m]));
      if (w.qldr_queue.size() > static_cast<std::size_t>(cfg_.qldr_period)) {
        w.qldr_queue.pop_front();
        w.qldr_bprb.pop_front();
      }
    }
    if (debug_) {
      *debug_ << tti_ << ',' << cfg_.services[m].spec.id << ',' << to_char(fsm_[m].state) << ',' << fsm_[m].n_req
              << ',' << rt_alloc_[m] << ',' << last_used_[m] << ',' << queues_[m].queued_bits << ','
              << queues_[m].head_wait(tti_) << '\n';
    }
  }
  if (!warm) rbs_used_measured_ += static_cast<std::uint64_t>(std::accumulate(last_used_.begin(), last_used_.end(), 0));
  ++tti_;
}

Metrics CellSimulation::finish() {
  while (!finished()) step();
  Metrics out;
  out.measured_ttis = cfg_.horizon - cfg_.t_obs;
  out.rb_utilization = static_cast<double>(rbs_used_measured_) /
                       (static_cast<double>(out.measured_ttis) * static_cast<double>(cfg_.n_cell));
  out.allocations = allocations_;
  out.allocation_iterations = allocation_iterations_;
  out.objective_histories = objective_histories_;
  for (std::size_t m = 0; m < queues_.size(); ++m) {
    const auto& spec = cfg_.services[m].spec;
    DelayHistogram h = delays_[m];
    for (const auto& p : queues_[m].packets) {
      if (p.arrival_tti < cfg_.t_obs) continue;
      const auto age = cfg_.horizon - p.arrival_tti;
      if (static_cast<double>(age) * cfg_.t_slot_ms > spec.w_th_ms) h.add(age);
    }
    ServiceMetrics sm;
    sm.service_id = spec.id;
    sm.packets = h.total();
    if (h.total() > 0) {
      const double ts = cfg_.t_slot_ms;
      sm.violation_prob = static_cast<double>(h.count_above(spec.w_th_ms, ts)) / static_cast<double>(h.total());
      long double sum = 0;
      for (std::size_t i = 0; i < h.counts().size(); ++i) sum += static_cast<long double>(i) * h.counts()[i];
      sm.mean_ms = static_cast<double>(sum / h.total()) * ts;
      sm.p50_ms = static_cast<double>(h.quantile(0.5)) * ts;
      sm.p90_ms = static_cast<double>(h.quantile(0.9)) * ts;
      sm.p99_ms = static_cast<double>(h.quantile(0.99)) * ts;
      sm.p999_ms = static_cast<double>(h.quantile(0.999)) * ts;
      sm.max_ms = static_cast<double>(h.counts().size() - 1) * ts;
      sm.ccdf = h.ccdf(spec.w_th_ms, ts);
    }
    sm.histogram = std::move(h);
    out.services.push_back(std::move(sm));
  }
  return out;
}

Metrics run(const ScenarioConfig& config) {
  CellSimulation sim(config);
  return sim.finish();
}

}  // namespace marea
