#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "marea/simulator.hpp"

namespace marea {

/// Grid for the model-validation experiment.
struct ValidateGrid {
  std::vector<int> n_min;
  std::vector<int> t_obs;
  int runs = 10;
  std::int64_t measure_ttis = 1'000'000;

  bool operator==(const ValidateGrid&) const = default;
};

struct Table1Grid {
  std::vector<int> n_cell;

  bool operator==(const Table1Grid&) const = default;
};

/// A scenario plus the optional experiment sections.
struct ConfigFile {
  ScenarioConfig scenario;
  std::optional<ValidateGrid> validate;
  std::optional<Table1Grid> table1;
};

/// YAML. Trace paths are resolved against `base_dir`. Throws ConfigError.
ConfigFile parse_config(std::istream& in, const std::filesystem::path& base_dir);
ConfigFile load_config(const std::filesystem::path& path);

/// Writes a document that parse_config reads back to an equal ConfigFile.
/// Trace-backed sources are written as their recorded paths.
void write_config(std::ostream& out, const ConfigFile& config);

/// Applies `key=value` to a scalar scenario field (sweep axes). Service fields
/// use `services.<i>.<field>` with field in {w_th_ms, epsilon}.
void set_config_field(ScenarioConfig& config, const std::string& key, const std::string& value);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace marea
