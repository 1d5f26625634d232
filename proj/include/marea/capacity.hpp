#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "marea/martingale.hpp"

namespace marea {

/// One fully transmitted packet: its size and the number of RBs it occupied.
struct PacketTxRecord {
  int service_id = 0;
  std::int64_t tti = 0;
  std::uint64_t bits = 1;
  std::uint32_t rbs_used = 1;
};

/// Exact bits-per-RB value bits / rbs.
struct PerRbValue {
  std::uint64_t bits = 0;
  std::uint32_t rbs = 1;

  double value() const { return static_cast<double>(bits) / static_cast<double>(rbs); }
  bool operator==(const PerRbValue& o) const {
    return static_cast<unsigned __int128>(bits) * o.rbs == static_cast<unsigned __int128>(o.bits) * rbs;
  }
};

/// s_RB = l / N_pkt repeated N_pkt times.
std::vector<PerRbValue> expand_packet(const PacketTxRecord& rec);

/// Concatenation of per-packet bits-per-RB vectors, stored run-length: each
/// packet contributes one run of `rbs_used` equal entries.
class ConcatPerRbVector {
 public:
  struct Run {
    std::uint64_t bits;
    std::uint32_t rbs;
  };

  void append(const PacketTxRecord& rec);
  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }
  std::uint64_t total_bits() const { return total_bits_; }
  const std::vector<Run>& runs() const { return runs_; }
  /// Materialized entries, for tests and small inputs.
  std::vector<PerRbValue> entries() const;

 private:
  std::vector<Run> runs_;
  std::size_t length_ = 0;
  std::uint64_t total_bits_ = 0;
};

ConcatPerRbVector concat_window(std::span<const PacketTxRecord> records);

/// Sums of consecutive groups of `group_size` entries (trailing partial group
/// discarded), each rounded half-up to an integer bit. When the vector holds
/// fewer entries than one group, returns the single extrapolated sample
/// round(total * group_size / len) and sets `degraded`. Empty input yields
/// an empty result.
std::vector<std::uint64_t> group_sums(const ConcatPerRbVector& x_con, std::size_t group_size, bool* degraded = nullptr);

/// Region n in [0, n_cell - n_min] groups n + n_min consecutive entries.
CapacitySampleSet build_capacity_samples(const ConcatPerRbVector& x_con, int n_min, int n_cell);

/// CSV with header `tti,service_id,packet_bits,rbs_used`; rows for other services skipped.
std::vector<PacketTxRecord> load_tx_records(std::istream& in, int service_id);

}  // namespace marea
