#include "marea/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marea/error.hpp"

namespace marea {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  // the midpoint of inf and inf must stay inf
  if (std::isinf(v[n / 2 - 1]) && std::isinf(v[n / 2])) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ValidationPoint validate_point(const ScenarioConfig& base, int n_min, int t_obs, int runs, std::int64_t measure_ttis,
                               int jobs) {
  if (base.services.size() != 1) throw InputError("model validation needs a single-service config");
  if (n_min <= 0 || t_obs <= 0 || runs <= 0 || measure_ttis <= 0) throw InputError("validation grid must be positive");

  ScenarioConfig cfg = base;
  cfg.n_cell = n_min;
  cfg.t_obs = t_obs;
  cfg.t_out = static_cast<int>(std::min<std::int64_t>(measure_ttis, std::numeric_limits<int>::max()));
  cfg.horizon = t_obs + measure_ttis;
  cfg.controller = ControllerKind::ref3;
  cfg.services[0].anomalies.clear();
  cfg.validate();

  const auto& spec = cfg.services[0].spec;
  std::vector<double> w_model(static_cast<std::size_t>(runs));
  std::vector<double> w_meas(static_cast<std::size_t>(runs));
  std::vector<DelayHistogram> hist(static_cast<std::size_t>(runs));

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs))
  for (int r = 0; r < runs; ++r) {
    ScenarioConfig c = cfg;
    c.seed = base.seed + static_cast<std::uint64_t>(r);
    const Metrics m = run(c);
    w_model[r] = m.allocations.empty() ? std::numeric_limits<double>::quiet_NaN() : m.allocations.front().w_est_ms;
    const auto& h = m.services[0].histogram;
    w_meas[r] = h.total() ? static_cast<double>(h.quantile(1.0 - spec.epsilon)) * c.t_slot_ms
                          : std::numeric_limits<double>::quiet_NaN();
    hist[r] = h;
  }

  ValidationPoint out;
  out.n_min = n_min;
  out.t_obs = t_obs;
  out.w_model_ms = median(w_model);
  out.w_measured_ms = median(w_meas);
  out.rel_err = std::abs(out.w_model_ms - out.w_measured_ms) / out.w_measured_ms;
  DelayHistogram pooled;
  for (const auto& h : hist) pooled.merge(h);
  out.packets = pooled.total();
  out.p_exceed = pooled.total() ? static_cast<double>(pooled.count_at_least(out.w_model_ms, cfg.t_slot_ms)) /
                                      static_cast<double>(pooled.total())
                                : 0.0;
  return out;
}

std::vector<ValidationPoint> validate_model(const ScenarioConfig& base, const ValidateGrid& grid, int jobs) {
  std::vector<ValidationPoint> rows;
  for (int n : grid.n_min) {
    for (int t : grid.t_obs) rows.push_back(validate_point(base, n, t, grid.runs, grid.measure_ttis, jobs));
  }
  return rows;
}

Table1Row table1_row(const ScenarioConfig& base, int n_cell) {
  ScenarioConfig cfg = base;
  cfg.n_cell = n_cell;
  cfg.controller = ControllerKind::marea;
  cfg.horizon = static_cast<std::int64_t>(cfg.t_obs) + cfg.t_out;
  cfg.validate();

  CellSimulation sim(cfg);
  for (int t = 0; t < cfg.t_obs; ++t) sim.step();
  const auto obs = sim.observations();
  std::vector<ServiceSpec> specs;
  for (const auto& s : cfg.services) specs.push_back(s.spec);
  AllocationParams params;
  params.theta = cfg.theta;
  params.t_slot_ms = cfg.t_slot_ms;
  params.estimator = cfg.estimator;

  const auto heuristic = allocate(specs, obs, n_cell, params);
  const auto brute = brute_force_allocate(specs, obs, n_cell, params);

  Table1Row row;
  row.n_cell = n_cell;
  row.heuristic_objective = heuristic.allocation.objective;
  row.brute_objective = brute.allocation.objective;
  if (row.heuristic_objective == row.brute_objective) {
    row.rel_err = 0.0;
  } else {
    row.rel_err = (row.heuristic_objective - row.brute_objective) / row.brute_objective;
  }
  row.heuristic_iterations = heuristic.iterations;
  row.brute_iterations = brute.iterations;
  row.heuristic_n_min = heuristic.allocation.n_min;
  row.brute_n_min = brute.allocation.n_min;
  row.heuristic_history = heuristic.objective_history;
  return row;
}

}  // namespace marea
