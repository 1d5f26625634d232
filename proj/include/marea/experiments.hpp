#pragma once

#include <cstdint>
#include <vector>

#include "marea/config.hpp"
#include "marea/simulator.hpp"

namespace marea {

/// One (N_min, T_OBS) grid point of the model-validation experiment.
struct ValidationPoint {
  int n_min = 0;
  int t_obs = 0;
  /// Median over runs of the bound computed from each run's warm-up window.
  double w_model_ms = 0.0;
  /// Median over runs of the measured (1 - epsilon) delay quantile.
  double w_measured_ms = 0.0;
  double rel_err = 0.0;
  /// Pooled fraction of packets with delay >= w_model_ms.
  double p_exceed = 0.0;
  std::uint64_t packets = 0;
};

/// Single service with exactly n_min dedicated RBs: one near-RT decision at
/// the end of a T_OBS warm-up, then `measure_ttis` measured TTIs. Runs use
/// seeds base.seed, base.seed + 1, ...; OpenMP spreads them over `jobs` threads.
ValidationPoint validate_point(const ScenarioConfig& base, int n_min, int t_obs, int runs, std::int64_t measure_ttis,
                               int jobs = 1);

std::vector<ValidationPoint> validate_model(const ScenarioConfig& base, const ValidateGrid& grid, int jobs = 1);

struct Table1Row {
  int n_cell = 0;
  double heuristic_objective = 0.0;
  double brute_objective = 0.0;
  double rel_err = 0.0;
  int heuristic_iterations = 0;
  std::uint64_t brute_iterations = 0;
  std::vector<int> heuristic_n_min;
  std::vector<int> brute_n_min;
  std::vector<double> heuristic_history;
};

/// Observations from a T_OBS warm-up of `base` resized to n_cell RBs, then
/// the heuristic and the exhaustive search on the same observations.
Table1Row table1_row(const ScenarioConfig& base, int n_cell);

}  // namespace marea
