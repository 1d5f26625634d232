#include "marea/output.hpp"

#include <ostream>
#include <string>

#include "marea/csv.hpp"

namespace marea {

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

void write_summary_csv(std::ostream& out, const Metrics& m) {
  using csv::number;
  out << "service_id,packets,violation_prob,mean_ms,p50_ms,p90_ms,p99_ms,p999_ms,max_ms,rb_utilization\n";
  for (const auto& s : m.services) {
    out << s.service_id << ',' << s.packets << ',' << number(s.violation_prob) << ',' << number(s.mean_ms) << ','
        << number(s.p50_ms) << ',' << number(s.p90_ms) << ',' << number(s.p99_ms) << ',' << number(s.p999_ms)
        << ',' << number(s.max_ms) << ',' << number(m.rb_utilization) << '\n';
  }
}

void write_ccdf_csv(std::ostream& out, const Metrics& m) {
  out << "service_id,x,ccdf\n";
  for (const auto& s : m.services) {
    for (const auto& p : s.ccdf) out << s.service_id << ',' << csv::number(p.x) << ',' << csv::number(p.p) << '\n';
  }
}

void write_alloc_csv(std::ostream& out, const Metrics& m) {
  out << "period,service_id,n_min,w_est_ms,objective\n";
  for (const auto& a : m.allocations) {
    out << a.period << ',' << a.service_id << ',' << a.n_min << ',' << csv::number(a.w_est_ms) << ','
        << csv::number(a.objective) << '\n';
  }
}

void write_validate_csv(std::ostream& out, std::span<const ValidationPoint> rows) {
  out << "n_min,t_obs,W_model_ms,W_measured_ms,rel_err\n";
  for (const auto& r : rows) {
    out << r.n_min << ',' << r.t_obs << ',' << csv::number(r.w_model_ms) << ',' << csv::number(r.w_measured_ms) << ','
        << csv::number(r.rel_err) << '\n';
  }
}

void write_table1_csv(std::ostream& out, std::span<const Table1Row> rows) {
  out << "n_cell,heuristic_objective,brute_objective,rel_err,heuristic_iterations,brute_iterations,heuristic_n_min,"
         "brute_n_min\n";
  for (const auto& r : rows) {
    out << r.n_cell << ',' << csv::number(r.heuristic_objective) << ',' << csv::number(r.brute_objective) << ','
        << csv::number(r.rel_err) << ',' << r.heuristic_iterations << ',' << r.brute_iterations << ','
        << join(r.heuristic_n_min) << ',' << join(r.brute_n_min) << '\n';
  }
}

}  // namespace marea
