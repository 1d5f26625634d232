#include "marea/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "marea/csv.hpp"
#include "marea/error.hpp"

namespace marea {

namespace {

namespace fs = std::filesystem;

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.is_null() ? std::string{} : " (line " + std::to_string(m.line + 1) + ")";
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& known, const std::string& section) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + section + where(kv.first));
  }
}

template <class T>
T get(const YAML::Node& map, const char* key, T fallback) {
  const auto n = map[key];
  if (!n) return fallback;
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'" + where(n));
  }
}

template <class T>
std::vector<T> get_list(const YAML::Node& map, const char* key) {
  const auto n = map[key];
  if (!n) return {};
  if (!n.IsSequence()) throw ConfigError(std::string("'") + key + "' must be a list" + where(n));
  try {
    return n.as<std::vector<T>>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("bad value in '") + key + "'" + where(n));
  }
}

SyntheticModel parse_model(const YAML::Node& n, const std::string& who) {
  reject_unknown(n, {"model", "values", "probs"}, who);
  SyntheticModel m;
  try {
    m.kind = model_kind_from_string(get<std::string>(n, "model", ""));
  } catch (const InputError& e) {
    throw ConfigError(who + ": " + e.what());
  }
  m.values = get_list<std::uint64_t>(n, "values");
  m.probs = get_list<double>(n, "probs");
  return m;
}

std::ifstream open_trace(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open trace " + p.string());
  return in;
}

TrafficSource parse_traffic(const YAML::Node& n, const fs::path& base, int id, std::string& path_out) {
  const std::string who = "services[" + std::to_string(id) + "].traffic";
  if (!n || !n.IsMap()) throw ConfigError(who + " is required");
  if (n["trace"]) {
    reject_unknown(n, {"trace"}, who);
    path_out = n["trace"].as<std::string>();
    auto in = open_trace(base / path_out);
    try {
      return load_arrival_trace(in, id);
    } catch (const std::exception& e) {
      throw ConfigError(path_out + ": " + e.what());
    }
  }
  return parse_model(n, who);
}

ChannelSource parse_channel(const YAML::Node& n, const fs::path& base, int id, std::string& path_out) {
  const std::string who = "services[" + std::to_string(id) + "].channel";
  if (!n || !n.IsMap()) throw ConfigError(who + " is required");
  if (n["trace"]) {
    reject_unknown(n, {"trace"}, who);
    path_out = n["trace"].as<std::string>();
    auto in = open_trace(base / path_out);
    try {
      return load_channel_trace(in, id);
    } catch (const std::exception& e) {
      throw ConfigError(path_out + ": " + e.what());
    }
  }
  return parse_model(n, who);
}

void emit_model(YAML::Emitter& e, const SyntheticModel& m) {
  e << YAML::BeginMap << YAML::Key << "model" << YAML::Value << to_string(m.kind);
  e << YAML::Key << "values" << YAML::Value << YAML::Flow << m.values;
  if (!m.probs.empty()) e << YAML::Key << "probs" << YAML::Value << YAML::Flow << m.probs;
  e << YAML::EndMap;
}

}  // namespace

ConfigFile parse_config(std::istream& in, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  reject_unknown(root,
                 {"n_cell", "t_slot_ms", "t_obs", "t_out", "horizon", "controller", "estimator", "eta", "tau", "seed",
                  "qldr_period", "gmm_components", "theta", "services", "validate", "table1"},
                 "config");

  ConfigFile out;
  auto& c = out.scenario;
  c.n_cell = get(root, "n_cell", c.n_cell);
  c.t_slot_ms = get(root, "t_slot_ms", c.t_slot_ms);
  c.t_obs = get(root, "t_obs", c.t_obs);
  c.t_out = get(root, "t_out", c.t_out);
  c.horizon = get(root, "horizon", c.horizon);
  c.eta = get(root, "eta", c.eta);
  c.tau = get(root, "tau", c.tau);
  c.seed = get(root, "seed", c.seed);
  c.qldr_period = get(root, "qldr_period", c.qldr_period);
  c.gmm_components = get(root, "gmm_components", c.gmm_components);
  try {
    c.controller = controller_from_string(get<std::string>(root, "controller", to_string(c.controller)));
    c.estimator = estimator_from_string(get<std::string>(root, "estimator", to_string(c.estimator)));
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }

  if (const auto t = root["theta"]) {
    reject_unknown(t, {"init", "shrink", "floor", "cap", "bisection_iters", "bisection_rel_width"}, "theta");
    c.theta.theta_init = get(t, "init", c.theta.theta_init);
    c.theta.shrink = get(t, "shrink", c.theta.shrink);
    c.theta.floor = get(t, "floor", c.theta.floor);
    c.theta.theta_cap = get(t, "cap", c.theta.theta_cap);
    c.theta.bisection_iters = get(t, "bisection_iters", c.theta.bisection_iters);
    c.theta.bisection_rel_width = get(t, "bisection_rel_width", c.theta.bisection_rel_width);
  }

  const auto services = root["services"];
  if (!services || !services.IsSequence()) throw ConfigError("'services' must be a non-empty list");
  for (std::size_t i = 0; i < services.size(); ++i) {
    const auto s = services[i];
    const std::string who = "services[" + std::to_string(i) + "]";
    reject_unknown(s, {"id", "w_th_ms", "epsilon", "traffic", "channel", "anomalies"}, who);
    ServiceConfig sc;
    sc.spec.id = get(s, "id", static_cast<int>(i));
    if (!s["w_th_ms"]) throw ConfigError(who + ".w_th_ms is required");
    sc.spec.w_th_ms = get(s, "w_th_ms", 0.0);
    sc.spec.epsilon = get(s, "epsilon", sc.spec.epsilon);
    sc.traffic = parse_traffic(s["traffic"], base_dir, sc.spec.id, sc.traffic_path);
    sc.channel = parse_channel(s["channel"], base_dir, sc.spec.id, sc.channel_path);
    if (const auto an = s["anomalies"]) {
      for (const auto& a : an) {
        reject_unknown(a, {"start", "end", "factor"}, who + ".anomalies");
        sc.anomalies.push_back({get<std::int64_t>(a, "start", 0), get<std::int64_t>(a, "end", 0),
                                get(a, "factor", 1.0)});
      }
    }
    c.services.push_back(std::move(sc));
  }

  if (const auto v = root["validate"]) {
    reject_unknown(v, {"n_min", "t_obs", "runs", "measure_ttis"}, "validate");
    ValidateGrid g;
    g.n_min = get_list<int>(v, "n_min");
    g.t_obs = get_list<int>(v, "t_obs");
    g.runs = get(v, "runs", g.runs);
    g.measure_ttis = get(v, "measure_ttis", g.measure_ttis);
    if (g.n_min.empty() || g.t_obs.empty() || g.runs <= 0 || g.measure_ttis <= 0) {
      throw ConfigError("validate needs non-empty n_min and t_obs lists and positive runs/measure_ttis");
    }
    out.validate = g;
  }
  if (const auto t = root["table1"]) {
    reject_unknown(t, {"n_cell"}, "table1");
    Table1Grid g;
    g.n_cell = get_list<int>(t, "n_cell");
    if (g.n_cell.empty()) throw ConfigError("table1.n_cell must be a non-empty list");
    out.table1 = g;
  }

  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return out;
}

ConfigFile load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return parse_config(in, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_config(std::ostream& out, const ConfigFile& config) {
  const auto& c = config.scenario;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "n_cell" << YAML::Value << c.n_cell;
  e << YAML::Key << "t_slot_ms" << YAML::Value << c.t_slot_ms;
  e << YAML::Key << "t_obs" << YAML::Value << c.t_obs;
  e << YAML::Key << "t_out" << YAML::Value << c.t_out;
  e << YAML::Key << "horizon" << YAML::Value << c.horizon;
  e << YAML::Key << "controller" << YAML::Value << to_string(c.controller);
  e << YAML::Key << "estimator" << YAML::Value << to_string(c.estimator);
  e << YAML::Key << "eta" << YAML::Value << c.eta;
  e << YAML::Key << "tau" << YAML::Value << c.tau;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "qldr_period" << YAML::Value << c.qldr_period;
  e << YAML::Key << "gmm_components" << YAML::Value << c.gmm_components;
  e << YAML::Key << "theta" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "init" << YAML::Value << c.theta.theta_init;
  e << YAML::Key << "shrink" << YAML::Value << c.theta.shrink;
  e << YAML::Key << "floor" << YAML::Value << c.theta.floor;
  e << YAML::Key << "cap" << YAML::Value << c.theta.theta_cap;
  e << YAML::Key << "bisection_iters" << YAML::Value << c.theta.bisection_iters;
  e << YAML::Key << "bisection_rel_width" << YAML::Value << c.theta.bisection_rel_width;
  e << YAML::EndMap;
  e << YAML::Key << "services" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : c.services) {
    e << YAML::BeginMap;
    e << YAML::Key << "id" << YAML::Value << s.spec.id;
    e << YAML::Key << "w_th_ms" << YAML::Value << s.spec.w_th_ms;
    e << YAML::Key << "epsilon" << YAML::Value << s.spec.epsilon;
    e << YAML::Key << "traffic" << YAML::Value;
    if (const auto* m = std::get_if<SyntheticModel>(&s.traffic)) {
      emit_model(e, *m);
    } else {
      e << YAML::BeginMap << YAML::Key << "trace" << YAML::Value << s.traffic_path << YAML::EndMap;
    }
    e << YAML::Key << "channel" << YAML::Value;
    if (const auto* m = std::get_if<SyntheticModel>(&s.channel)) {
      emit_model(e, *m);
    } else {
      e << YAML::BeginMap << YAML::Key << "trace" << YAML::Value << s.channel_path << YAML::EndMap;
    }
    if (!s.anomalies.empty()) {
      e << YAML::Key << "anomalies" << YAML::Value << YAML::BeginSeq;
      for (const auto& a : s.anomalies) {
        e << YAML::Flow << YAML::BeginMap << YAML::Key << "start" << YAML::Value << a.start << YAML::Key << "end"
          << YAML::Value << a.end << YAML::Key << "factor" << YAML::Value << a.factor << YAML::EndMap;
      }
      e << YAML::EndSeq;
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  if (config.validate) {
    const auto& g = *config.validate;
    e << YAML::Key << "validate" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_min" << YAML::Value << YAML::Flow << g.n_min;
    e << YAML::Key << "t_obs" << YAML::Value << YAML::Flow << g.t_obs;
    e << YAML::Key << "runs" << YAML::Value << g.runs;
    e << YAML::Key << "measure_ttis" << YAML::Value << g.measure_ttis;
    e << YAML::EndMap;
  }
  if (config.table1) {
    e << YAML::Key << "table1" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_cell" << YAML::Value << YAML::Flow << config.table1->n_cell;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  out << e.c_str() << '\n';
}

void set_config_field(ScenarioConfig& c, const std::string& key, const std::string& value) {
  auto as_int = [&]() -> std::int64_t {
    try {
      return csv::parse_i64(value, 0, key.c_str());
    } catch (const std::exception&) {
      throw ConfigError("axis " + key + ": '" + value + "' is not an integer");
    }
  };
  auto as_double = [&] {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != value.size() || value.empty()) throw ConfigError("axis " + key + ": '" + value + "' is not a number");
    return v;
  };
  try {
    if (key == "n_cell") c.n_cell = static_cast<int>(as_int());
    else if (key == "t_slot_ms") c.t_slot_ms = as_double();
    else if (key == "t_obs") c.t_obs = static_cast<int>(as_int());
    else if (key == "t_out") c.t_out = static_cast<int>(as_int());
    else if (key == "horizon") c.horizon = as_int();
    else if (key == "eta") c.eta = as_double();
    else if (key == "tau") c.tau = as_double();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(as_int());
    else if (key == "qldr_period") c.qldr_period = static_cast<int>(as_int());
    else if (key == "gmm_components") c.gmm_components = static_cast<int>(as_int());
    else if (key == "controller") c.controller = controller_from_string(value);
    else if (key == "estimator") c.estimator = estimator_from_string(value);
    else if (key.rfind("services.", 0) == 0) {
      const auto dot = key.find('.', 9);
      if (dot == std::string::npos) throw ConfigError("axis " + key + ": expected services.<i>.<field>");
      std::size_t i = 0;
      try {
        i = std::stoul(key.substr(9, dot - 9));
      } catch (const std::exception&) {
        throw ConfigError("axis " + key + ": bad service index");
      }
      if (i >= c.services.size()) throw ConfigError("axis " + key + ": no such service");
      const auto field = key.substr(dot + 1);
      if (field == "w_th_ms") c.services[i].spec.w_th_ms = as_double();
      else if (field == "epsilon") c.services[i].spec.epsilon = as_double();
      else throw ConfigError("axis " + key + ": unknown service field");
    } else {
      throw ConfigError("unknown sweep axis '" + key + "'");
    }
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto same_theta = [](const ThetaSearchParams& x, const ThetaSearchParams& y) {
    return x.theta_init == y.theta_init && x.shrink == y.shrink && x.floor == y.floor &&
           x.theta_cap == y.theta_cap && x.bisection_iters == y.bisection_iters &&
           x.bisection_rel_width == y.bisection_rel_width;
  };
  if (a.n_cell != b.n_cell || a.t_slot_ms != b.t_slot_ms || a.t_obs != b.t_obs || a.t_out != b.t_out ||
      a.horizon != b.horizon || a.controller != b.controller || a.estimator != b.estimator || a.eta != b.eta ||
      a.tau != b.tau || a.seed != b.seed || a.qldr_period != b.qldr_period ||
      a.gmm_components != b.gmm_components || !same_theta(a.theta, b.theta) ||
      a.services.size() != b.services.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.services.size(); ++i) {
    const auto& x = a.services[i];
    const auto& y = b.services[i];
    if (x.spec.id != y.spec.id || x.spec.w_th_ms != y.spec.w_th_ms || x.spec.epsilon != y.spec.epsilon ||
        x.traffic != y.traffic || x.channel != y.channel || x.anomalies != y.anomalies ||
        x.traffic_path != y.traffic_path || x.channel_path != y.channel_path) {
      return false;
    }
  }
  return true;
}

}  // namespace marea
