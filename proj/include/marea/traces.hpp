#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "marea/rng.hpp"

namespace marea {

/// Per-TTI arrivals of one service. Indexing past the end wraps around.
struct ArrivalTrace {
  int service_id = 0;
  std::vector<std::uint64_t> bits_per_tti;
  /// Empty when the source carried no packet sizes; otherwise one entry per TTI.
  std::vector<std::vector<std::uint64_t>> packet_sizes_per_tti;

  std::size_t size() const { return bits_per_tti.size(); }
  std::uint64_t bits_at(std::int64_t tti) const;
  /// Packets arriving at `tti`. Without explicit sizes, a TTI's bits form one
  /// packet; a TTI with zero bits has no packets.
  std::vector<std::uint64_t> packets_at(std::int64_t tti) const;

  bool operator==(const ArrivalTrace&) const = default;
};

/// Per-TTI bits-per-RB of one service. Indexing past the end wraps around.
struct ChannelTrace {
  int service_id = 0;
  std::vector<std::uint64_t> bits_per_rb;

  std::uint64_t at(std::int64_t tti) const;

  bool operator==(const ChannelTrace&) const = default;
};

enum class ModelKind { constant, two_point, uniform_integer, empirical_table };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Synthetic i.i.d. per-TTI draw. For uniform_integer, `values` holds {lo, hi}
/// and `probs` is empty.
struct SyntheticModel {
  ModelKind kind = ModelKind::constant;
  std::vector<std::uint64_t> values;
  std::vector<double> probs;

  static SyntheticModel constant(std::uint64_t v);
  static SyntheticModel two_point(std::uint64_t a, double pa, std::uint64_t b, double pb);
  static SyntheticModel uniform_integer(std::uint64_t lo, std::uint64_t hi);
  static SyntheticModel empirical_table(std::vector<std::uint64_t> values, std::vector<double> probs);

  /// Throws ValidationError; `strictly_positive` additionally rejects 0 in the support.
  void validate(bool strictly_positive) const;
  double mean() const;

  bool operator==(const SyntheticModel&) const = default;
};

std::uint64_t sample_arrival(const SyntheticModel& model, RngStream& rng);
std::uint64_t sample_bits_per_rb(const SyntheticModel& model, RngStream& rng);

/// CSV with header `tti,service_id,bits[,packet_sizes]`. Rows for other
/// services are skipped. Gaps are filled with zero-bit TTIs.
ArrivalTrace load_arrival_trace(std::istream& in, int service_id);
void write_arrival_trace(std::ostream& out, const ArrivalTrace& trace);

/// CSV with header `tti,service_id,bits_per_rb`. Gaps repeat the previous value.
ChannelTrace load_channel_trace(std::istream& in, int service_id);

/// Warn once (per trace) that a trace shorter than `horizon` will be replayed cyclically.
void note_cyclic_extension(const std::string& what, std::size_t length, std::int64_t horizon);

}  // namespace marea
