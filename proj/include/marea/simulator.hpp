#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "marea/capacity.hpp"
#include "marea/near_rt.hpp"
#include "marea/rng.hpp"
#include "marea/rt_controller.hpp"
#include "marea/traces.hpp"

namespace marea {

/// Arrival-rate scaling by `factor` over TTIs [start, end).
struct Anomaly {
  std::int64_t start = 0;
  std::int64_t end = 0;
  double factor = 1.0;

  bool operator==(const Anomaly&) const = default;
};

using TrafficSource = std::variant<SyntheticModel, ArrivalTrace>;
using ChannelSource = std::variant<SyntheticModel, ChannelTrace>;

struct ServiceConfig {
  ServiceSpec spec;
  TrafficSource traffic;
  ChannelSource channel;
  std::vector<Anomaly> anomalies;
  /// Where trace sources came from, kept so configs can be written back out.
  std::string traffic_path;
  std::string channel_path;
};

enum class ControllerKind { marea, ref1, ref2, ref3, ref4 };

const char* to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);
const char* to_string(UtilizationEstimator e);
UtilizationEstimator estimator_from_string(const std::string& name);

/// What each controller switches on.
struct ControllerStrategy {
  bool martingale_guarantees = false;  ///< near-RT allocation every T_OUT
  bool qldr_guarantees = false;        ///< proportional allocation every qldr_period
  bool sharing = false;                ///< EDF over unused RBs
  bool mitigation = false;             ///< FSM + temporary guarantee moves
};

ControllerStrategy controller_for(ControllerKind kind);

struct ScenarioConfig {
  int n_cell = 25;
  double t_slot_ms = 1.0;
  int t_obs = 4000;
  int t_out = 1000;
  std::int64_t horizon = 100000;
  std::vector<ServiceConfig> services;
  ControllerKind controller = ControllerKind::marea;
  UtilizationEstimator estimator = UtilizationEstimator::empirical;
  double eta = 0.75;
  double tau = 0.3;
  std::uint64_t seed = 1;
  int qldr_period = 10;
  int gmm_components = 3;
  ThetaSearchParams theta;

  /// Throws ValidationError describing the first problem found.
  void validate() const;
};

/// Largest-remainder proportional split of n_cell by
/// score_m = (avg_queue_bits / avg_bits_per_rb) / w_th; equal split when all scores vanish.
std::vector<int> qldr_allocate(std::span<const double> avg_queue_bits, std::span<const double> avg_bits_per_rb,
                               std::span<const double> w_th_ms, int n_cell);

struct CcdfPoint {
  double x = 0.0;
  double p = 0.0;
};

/// Abscissae -1.00, -0.95, ..., 3.00.
std::vector<double> ccdf_grid();

/// P[(w - W_th) / W_th > x] over the grid.
std::vector<CcdfPoint> ccdf(std::span<const double> delays_ms, double w_th_ms);

/// Per-packet delays in whole TTIs.
class DelayHistogram {
 public:
  void add(std::int64_t ttis, std::uint64_t count = 1);
  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// Smallest delay d (TTIs) with P[w <= d] >= q.
  std::int64_t quantile(double q) const;
  /// Packets with delay * t_slot strictly above `ms`.
  std::uint64_t count_above(double ms, double t_slot_ms) const;
  /// Packets with delay * t_slot at or above `ms`.
  std::uint64_t count_at_least(double ms, double t_slot_ms) const;
  std::vector<CcdfPoint> ccdf(double w_th_ms, double t_slot_ms) const;
  void merge(const DelayHistogram& other);

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct ServiceMetrics {
  int service_id = 0;
  std::uint64_t packets = 0;
  double violation_prob = 0.0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p90_ms = 0.0;
  double p99_ms = 0.0;
  double p999_ms = 0.0;
  double max_ms = 0.0;
  std::vector<CcdfPoint> ccdf;
  DelayHistogram histogram;
};

struct AllocationRecord {
  int period = 0;
  std::int64_t tti = 0;
  int service_id = 0;
  int n_min = 0;
  double w_est_ms = 0.0;
  double objective = 0.0;
};

struct Metrics {
  std::vector<ServiceMetrics> services;
  double rb_utilization = 0.0;
  std::int64_t measured_ttis = 0;
  std::vector<AllocationRecord> allocations;
  /// Algorithm-2 iterations per near-RT decision.
  std::vector<int> allocation_iterations;
  /// Committed objective trajectory of every near-RT decision.
  std::vector<std::vector<double>> objective_histories;
};

/// Single-cell, TTI-granular simulation. Warm-up: the first T_OBS TTIs run
/// an equal static split without sharing and are excluded from metrics.
class CellSimulation {
 public:
  explicit CellSimulation(ScenarioConfig config);

  void step();
  bool finished() const { return tti_ >= cfg_.horizon; }
  /// Runs to the horizon (if needed) and computes metrics.
  Metrics finish();

  std::int64_t tti() const { return tti_; }
  const ScenarioConfig& config() const { return cfg_; }
  std::size_t service_count() const { return queues_.size(); }
  const ServiceQueue& queue(std::size_t m) const { return queues_[m]; }
  std::uint64_t bits_arrived(std::size_t m) const { return bits_arrived_[m]; }
  std::uint64_t bits_transmitted(std::size_t m) const { return bits_sent_[m]; }
  const std::vector<int>& baseline() const { return baseline_; }
  const std::vector<int>& rt_allocation() const { return rt_alloc_; }
  const std::vector<int>& last_rbs_used() const { return last_used_; }
  const std::vector<FsmRecord>& fsm() const { return fsm_; }
  const std::vector<CompletedPacket>& last_completed() const { return last_completed_; }

  /// Observations over the trailing windows, as the near-RT controller sees them.
  std::vector<ServiceObservation> observations();

  /// Per-TTI rows `tti,service_id,state,n_req,n_min_i,rbs_used,queue_bits,head_wait_ttis`.
  void set_debug_log(std::ostream* out);

 private:
  struct Window {
    std::deque<std::uint64_t> arrivals;      // last T_OBS
    std::deque<std::uint64_t> bits_per_rb;   // last T_OBS
    std::deque<std::uint32_t> rb_usage;      // last T_OUT
    std::deque<PacketTxRecord> tx;           // completion within last T_OBS
    std::deque<double> qldr_queue;           // last qldr_period
    std::deque<double> qldr_bprb;            // last qldr_period
  };

  void near_rt_decision();
  void qldr_decision();
  std::vector<std::uint64_t> draw_arrivals(std::size_t m);
  std::uint64_t draw_channel(std::size_t m);
  std::vector<int> equal_split() const;

  ScenarioConfig cfg_;
  ControllerStrategy strategy_;
  std::int64_t tti_ = 0;
  std::vector<ServiceQueue> queues_;
  std::vector<RngStream> traffic_rng_;
  std::vector<RngStream> channel_rng_;
  std::vector<RtThresholds> thresholds_;
  std::vector<int> q_t_;
  std::vector<FsmRecord> fsm_;
  std::vector<int> baseline_;
  std::vector<int> rt_alloc_;
  std::vector<int> last_used_;
  std::vector<CompletedPacket> last_completed_;
  std::vector<std::uint64_t> bits_arrived_;
  std::vector<std::uint64_t> bits_sent_;
  std::vector<Window> windows_;
  std::vector<DelayHistogram> delays_;
  std::uint64_t rbs_used_measured_ = 0;
  int period_ = 0;
  std::vector<AllocationRecord> allocations_;
  std::vector<int> allocation_iterations_;
  std::vector<std::vector<double>> objective_histories_;
  std::ostream* debug_ = nullptr;
};

Metrics run(const ScenarioConfig& config);

}  // namespace marea
