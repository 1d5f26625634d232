#pragma once

#include <iosfwd>
#include <span>

#include "marea/experiments.hpp"
#include "marea/simulator.hpp"

namespace marea {

/// service_id,packets,violation_prob,mean_ms,p50_ms,p90_ms,p99_ms,p999_ms,max_ms,rb_utilization
void write_summary_csv(std::ostream& out, const Metrics& m);
/// service_id,x,ccdf
void write_ccdf_csv(std::ostream& out, const Metrics& m);
/// period,service_id,n_min,w_est_ms,objective
void write_alloc_csv(std::ostream& out, const Metrics& m);
/// n_min,t_obs,W_model_ms,W_measured_ms,rel_err
void write_validate_csv(std::ostream& out, std::span<const ValidationPoint> rows);
/// n_cell,heuristic_objective,brute_objective,rel_err,heuristic_iterations,brute_iterations,heuristic_n_min,brute_n_min
void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows);

}  // namespace marea
