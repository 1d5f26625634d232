#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "marea/config.hpp"
#include "marea/csv.hpp"
#include "marea/error.hpp"
#include "marea/experiments.hpp"
#include "marea/output.hpp"
#include "marea/simulator.hpp"

namespace fs = std::filesystem;
using namespace marea;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

/// Problems with the invocation itself (existing outputs, bad axes, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int jobs = 1;
  std::optional<std::string> controller;
  bool overwrite = false;
  std::string debug_log;
  std::vector<std::string> axes;
};

ConfigFile load(const Options& o) {
  auto cf = load_config(o.config);
  if (o.seed) cf.scenario.seed = *o.seed;
  if (o.controller) {
    try {
      cf.scenario.controller = controller_from_string(*o.controller);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }
  return cf;
}

/// Creates `dir` and refuses to clobber any of `names` unless allowed.
void prepare_outputs(const fs::path& dir, const std::vector<std::string>& names, bool overwrite) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (overwrite) return;
  for (const auto& n : names) {
    if (fs::exists(dir / n)) throw UsageError((dir / n).string() + " exists (pass --overwrite to replace it)");
  }
}

template <class Fn>
void write_file(const fs::path& p, Fn&& fn) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

void write_run_outputs(const fs::path& dir, const Metrics& m) {
  write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, m); });
  write_file(dir / "ccdf.csv", [&](std::ostream& o) { write_ccdf_csv(o, m); });
  write_file(dir / "alloc.csv", [&](std::ostream& o) { write_alloc_csv(o, m); });
}

const std::vector<std::string> kRunFiles = {"summary.csv", "ccdf.csv", "alloc.csv"};

int cmd_run(const Options& o) {
  const auto cf = load(o);
  std::vector<std::string> files = kRunFiles;
  if (!o.debug_log.empty()) files.push_back(o.debug_log);
  prepare_outputs(o.out, files, o.overwrite);
  CellSimulation sim(cf.scenario);
  std::ofstream debug;
  if (!o.debug_log.empty()) {
    debug.open(fs::path(o.out) / o.debug_log, std::ios::binary | std::ios::trunc);
    if (!debug) throw std::runtime_error("cannot write debug log");
    sim.set_debug_log(&debug);
  }
  const Metrics m = sim.finish();
  write_run_outputs(o.out, m);
  return 0;
}

struct Axis {
  std::string name;
  std::vector<std::string> values;
};

Axis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError("axis '" + spec + "' must look like name=v1,v2,...");
  }
  Axis a{spec.substr(0, eq), {}};
  for (auto v : csv::split(std::string_view(spec).substr(eq + 1))) {
    if (v.empty()) throw UsageError("axis '" + spec + "' has an empty value");
    a.values.emplace_back(v);
  }
  return a;
}

int cmd_sweep(const Options& o) {
  const auto cf = load(o);
  if (o.axes.empty()) throw UsageError("sweep needs at least one --axis");
  std::vector<Axis> axes;
  for (const auto& s : o.axes) axes.push_back(parse_axis(s));

  // Cartesian product, last axis varying fastest.
  std::vector<ScenarioConfig> points;
  std::vector<std::string> labels;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ScenarioConfig c = cf.scenario;
    std::string label;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      set_config_field(c, axes[k].name, axes[k].values[idx[k]]);
      label += (k ? "_" : "") + axes[k].name + "=" + axes[k].values[idx[k]];
    }
    try {
      c.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(label + ": " + e.what());
    }
    points.push_back(std::move(c));
    labels.push_back(label);
    std::size_t k = axes.size();
    while (k > 0 && ++idx[k - 1] == axes[k - 1].values.size()) idx[--k] = 0;
    if (k == 0) break;
  }

  prepare_outputs(o.out, {"sweep.csv"}, o.overwrite);
  for (const auto& l : labels) prepare_outputs(fs::path(o.out) / l, kRunFiles, o.overwrite);

  const int n = static_cast<int>(points.size());
  std::vector<std::string> errors(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, o.jobs))
  for (int i = 0; i < n; ++i) {
    try {
      write_run_outputs(fs::path(o.out) / labels[i], run(points[i]));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!errors[i].empty()) throw std::runtime_error(labels[i] + ": " + errors[i]);
  }
  write_file(fs::path(o.out) / "sweep.csv", [&](std::ostream& out) {
    out << "dir";
    for (const auto& a : axes) out << ',' << a.name;
    out << '\n';
    idx.assign(axes.size(), 0);
    for (const auto& l : labels) {
      out << l;
      for (std::size_t k = 0; k < axes.size(); ++k) out << ',' << axes[k].values[idx[k]];
      out << '\n';
      std::size_t k = axes.size();
      while (k > 0 && ++idx[k - 1] == axes[k - 1].values.size()) idx[--k] = 0;
    }
  });
  return 0;
}

int cmd_validate(const Options& o) {
  const auto cf = load(o);
  const auto& c = cf.scenario;
  if (c.services.size() != 1) throw ConfigError(o.config + ": validate-model needs a single-service config");
  ValidateGrid grid;
  if (cf.validate) {
    grid = *cf.validate;
  } else {
    grid.n_min = {c.n_cell};
    grid.t_obs = {c.t_obs};
    grid.measure_ttis = c.horizon - c.t_obs;
  }
  prepare_outputs(o.out, {"validate.csv"}, o.overwrite);
  const auto rows = validate_model(c, grid, o.jobs);
  write_file(fs::path(o.out) / "validate.csv", [&](std::ostream& out) { write_validate_csv(out, rows); });
  return 0;
}

int cmd_table1(const Options& o) {
  const auto cf = load(o);
  const auto& c = cf.scenario;
  const std::vector<int> grid = cf.table1 ? cf.table1->n_cell : std::vector<int>{c.n_cell};
  const int m = static_cast<int>(c.services.size());
  for (int n : grid) {
    if (n < m) throw ConfigError("table1: n_cell " + std::to_string(n) + " is below the service count");
    if (composition_count(n, m) > kBruteForceLimit) {
      throw ConfigError("table1: n_cell " + std::to_string(n) + " needs more than " +
                        std::to_string(kBruteForceLimit) + " brute-force candidates");
    }
  }
  prepare_outputs(o.out, {"table1.csv"}, o.overwrite);
  std::vector<Table1Row> rows(grid.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, o.jobs))
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) rows[i] = table1_row(c, grid[i]);
  write_file(fs::path(o.out) / "table1.csv", [&](std::ostream& out) { write_table1_csv(out, rows); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven single-cell RB orchestration simulator"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Scenario config (YAML)")->required();
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--controller", o.controller, "Override the controller (marea, ref1..ref4)");
    sub->add_flag("--overwrite", o.overwrite, "Replace existing output files");
    sub->add_option("--jobs", o.jobs, "Parallel jobs")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario; writes summary.csv, ccdf.csv, alloc.csv");
  common(run_cmd);
  run_cmd->add_option("--debug-log", o.debug_log, "Also write a per-TTI log with this file name into --out");
  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian sweep over config fields, one directory per point");
  common(sweep_cmd);
  sweep_cmd->add_option("--axis", o.axes, "name=v1,v2,... (repeatable)");
  auto* validate_cmd = app.add_subcommand("validate-model", "Model bound vs measured delay quantile; validate.csv");
  common(validate_cmd);
  auto* table1_cmd = app.add_subcommand("table1", "Heuristic vs exhaustive allocation; table1.csv");
  common(table1_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*validate_cmd) return cmd_validate(o);
    if (*table1_cmd) return cmd_table1(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
