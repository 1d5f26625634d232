#include "marea/traces.hpp"

#include <cmath>
#include <iostream>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>

#include "marea/csv.hpp"
#include "marea/error.hpp"

namespace marea {

namespace {

std::size_t wrap(std::int64_t tti, std::size_t n) {
  const auto m = static_cast<std::int64_t>(n);
  return static_cast<std::size_t>(((tti % m) + m) % m);
}

// Reads the header line, skipping blank lines. Returns the column names.
std::vector<std::string> read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    std::vector<std::string> cols;
    for (auto f : csv::split(line)) cols.emplace_back(f);
    return cols;
  }
  throw ParseError(line_no, "missing header row");
}

void expect_columns(const std::vector<std::string>& got, std::initializer_list<const char*> want,
                    std::size_t optional_tail, std::size_t line_no) {
  const std::size_t required = want.size() - optional_tail;
  bool ok = got.size() >= required && got.size() <= want.size();
  std::size_t i = 0;
  for (const char* name : want) {
    if (!ok || i >= got.size()) break;
    ok = got[i] == name;
    ++i;
  }
  if (!ok) {
    std::string expected;
    for (const char* name : want) expected += std::string(expected.empty() ? "" : ",") + name;
    throw ParseError(line_no, "unexpected header, expected '" + expected + "'");
  }
}

}  // namespace

std::uint64_t ArrivalTrace::bits_at(std::int64_t tti) const {
  if (bits_per_tti.empty()) return 0;
  return bits_per_tti[wrap(tti, bits_per_tti.size())];
}

std::vector<std::uint64_t> ArrivalTrace::packets_at(std::int64_t tti) const {
  if (bits_per_tti.empty()) return {};
  const std::size_t i = wrap(tti, bits_per_tti.size());
  if (!packet_sizes_per_tti.empty() && !packet_sizes_per_tti[i].empty()) return packet_sizes_per_tti[i];
  if (bits_per_tti[i] == 0) return {};
  return {bits_per_tti[i]};
}

std::uint64_t ChannelTrace::at(std::int64_t tti) const {
  if (bits_per_rb.empty()) throw InputError("empty channel trace");
  return bits_per_rb[wrap(tti, bits_per_rb.size())];
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::constant: return "constant";
    case ModelKind::two_point: return "two-point";
    case ModelKind::uniform_integer: return "uniform-integer";
    case ModelKind::empirical_table: return "empirical-table";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "constant") return ModelKind::constant;
  if (name == "two-point") return ModelKind::two_point;
  if (name == "uniform-integer") return ModelKind::uniform_integer;
  if (name == "empirical-table") return ModelKind::empirical_table;
  throw InputError("unknown synthetic model kind '" + name + "'");
}

SyntheticModel SyntheticModel::constant(std::uint64_t v) { return {ModelKind::constant, {v}, {1.0}}; }

SyntheticModel SyntheticModel::two_point(std::uint64_t a, double pa, std::uint64_t b, double pb) {
  return {ModelKind::two_point, {a, b}, {pa, pb}};
}

SyntheticModel SyntheticModel::uniform_integer(std::uint64_t lo, std::uint64_t hi) {
  return {ModelKind::uniform_integer, {lo, hi}, {}};
}

SyntheticModel SyntheticModel::empirical_table(std::vector<std::uint64_t> values, std::vector<double> probs) {
  return {ModelKind::empirical_table, std::move(values), std::move(probs)};
}

void SyntheticModel::validate(bool strictly_positive) const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  switch (kind) {
    case ModelKind::constant:
      if (values.size() != 1) fail("constant model needs exactly one value");
      break;
    case ModelKind::two_point:
      if (values.size() != 2 || probs.size() != 2) fail("two-point model needs two values and two probabilities");
      break;
    case ModelKind::uniform_integer:
      if (values.size() != 2 || values[0] > values[1]) fail("uniform-integer model needs lo <= hi");
      break;
    case ModelKind::empirical_table:
      if (values.empty() || values.size() != probs.size()) fail("empirical-table needs matching values and probs");
      break;
  }
  if (kind == ModelKind::two_point || kind == ModelKind::empirical_table) {
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || p > 1.0) fail("probabilities must lie in [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) fail("probabilities must sum to 1");
  }
  if (strictly_positive) {
    for (auto v : values) {
      if (v == 0) fail("support must be strictly positive");
    }
  }
}

double SyntheticModel::mean() const {
  switch (kind) {
    case ModelKind::constant: return static_cast<double>(values.at(0));
    case ModelKind::uniform_integer: return 0.5 * (static_cast<double>(values.at(0)) + static_cast<double>(values.at(1)));
    default: {
      double m = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) m += probs[i] * static_cast<double>(values[i]);
      return m;
    }
  }
}

namespace {

std::uint64_t draw(const SyntheticModel& model, RngStream& rng) {
  switch (model.kind) {
    case ModelKind::constant:
      return model.values[0];
    case ModelKind::uniform_integer:
      return rng.uniform_int(model.values[0], model.values[1]);
    case ModelKind::two_point:
    case ModelKind::empirical_table: {
      const double u = rng.uniform01();
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < model.values.size(); ++i) {
        acc += model.probs[i];
        if (u < acc) return model.values[i];
      }
      return model.values.back();
    }
  }
  return 0;
}

}  // namespace

std::uint64_t sample_arrival(const SyntheticModel& model, RngStream& rng) { return draw(model, rng); }

std::uint64_t sample_bits_per_rb(const SyntheticModel& model, RngStream& rng) { return draw(model, rng); }

ArrivalTrace load_arrival_trace(std::istream& in, int service_id) {
  std::size_t line_no = 0;
  const auto header = read_header(in, line_no);
  expect_columns(header, {"tti", "service_id", "bits", "packet_sizes"}, 1, line_no);
  const bool has_sizes_col = header.size() == 4;

  ArrivalTrace trace;
  trace.service_id = service_id;
  bool any_sizes = false;
  std::int64_t last_tti = -1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() < 3 || f.size() > header.size()) throw ParseError(line_no, "wrong number of fields");
    const auto tti = static_cast<std::int64_t>(csv::parse_u64(f[0], line_no, "tti"));
    const auto sid = csv::parse_i64(f[1], line_no, "service_id");
    const auto bits = csv::parse_u64(f[2], line_no, "bits");
    if (sid != service_id) continue;
    if (tti <= last_tti) throw ParseError(line_no, "tti values must be strictly increasing per service");

    std::vector<std::uint64_t> sizes;
    if (has_sizes_col && f.size() == 4 && !f[3].empty()) {
      std::uint64_t sum = 0;
      for (auto part : csv::split(f[3], ';')) {
        const auto s = csv::parse_u64(part, line_no, "packet_sizes");
        if (s == 0) throw ValidationError("line " + std::to_string(line_no) + ": packet sizes must be positive");
        sizes.push_back(s);
        sum += s;
      }
      if (sum != bits) {
        throw ValidationError("line " + std::to_string(line_no) + ": packet sizes sum to " + std::to_string(sum) +
                              " but bits is " + std::to_string(bits));
      }
      any_sizes = true;
    }

    const auto idx = static_cast<std::size_t>(tti);
    trace.bits_per_tti.resize(idx + 1, 0);
    trace.packet_sizes_per_tti.resize(idx + 1);
    trace.bits_per_tti[idx] = bits;
    trace.packet_sizes_per_tti[idx] = std::move(sizes);
    last_tti = tti;
  }
  if (!any_sizes) {
    trace.packet_sizes_per_tti.clear();
  } else {
    // TTIs without an explicit list carry their bits as a single packet
    for (std::size_t i = 0; i < trace.bits_per_tti.size(); ++i) {
      if (trace.packet_sizes_per_tti[i].empty() && trace.bits_per_tti[i] > 0) {
        trace.packet_sizes_per_tti[i] = {trace.bits_per_tti[i]};
      }
    }
  }
  return trace;
}

void write_arrival_trace(std::ostream& out, const ArrivalTrace& trace) {
  const bool sizes = !trace.packet_sizes_per_tti.empty();
  out << (sizes ? "tti,service_id,bits,packet_sizes\n" : "tti,service_id,bits\n");
  for (std::size_t i = 0; i < trace.bits_per_tti.size(); ++i) {
    out << i << ',' << trace.service_id << ',' << trace.bits_per_tti[i];
    if (sizes) {
      out << ',';
      const auto& p = trace.packet_sizes_per_tti[i];
      for (std::size_t k = 0; k < p.size(); ++k) out << (k ? ";" : "") << p[k];
    }
    out << '\n';
  }
}

ChannelTrace load_channel_trace(std::istream& in, int service_id) {
  std::size_t line_no = 0;
  const auto header = read_header(in, line_no);
  expect_columns(header, {"tti", "service_id", "bits_per_rb"}, 0, line_no);

  ChannelTrace trace;
  trace.service_id = service_id;
  std::int64_t last_tti = -1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 3) throw ParseError(line_no, "wrong number of fields");
    const auto tti = static_cast<std::int64_t>(csv::parse_u64(f[0], line_no, "tti"));
    const auto sid = csv::parse_i64(f[1], line_no, "service_id");
    const auto v = csv::parse_u64(f[2], line_no, "bits_per_rb");
    if (sid != service_id) continue;
    if (tti <= last_tti) throw ParseError(line_no, "tti values must be strictly increasing per service");
    if (v == 0) throw ValidationError("line " + std::to_string(line_no) + ": bits_per_rb must be positive");
    const auto idx = static_cast<std::size_t>(tti);
    const std::uint64_t fill = trace.bits_per_rb.empty() ? v : trace.bits_per_rb.back();
    trace.bits_per_rb.resize(idx + 1, fill);
    trace.bits_per_rb[idx] = v;
    last_tti = tti;
  }
  return trace;
}

void note_cyclic_extension(const std::string& what, std::size_t length, std::int64_t horizon) {
  static std::mutex mu;
  static std::set<std::string> seen;
  if (length == 0 || static_cast<std::int64_t>(length) >= horizon) return;
  std::lock_guard lock(mu);
  if (!seen.insert(what).second) return;
  std::clog << "marea: " << what << " has " << length << " TTIs, replaying cyclically over " << horizon << " TTIs\n";
}

}  // namespace marea
