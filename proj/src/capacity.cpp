#include "marea/capacity.hpp"

#include <istream>
#include <numeric>
#include <string>

#include "marea/csv.hpp"
#include "marea/error.hpp"

namespace marea {

namespace {

using u128 = unsigned __int128;

// Exact non-negative rational with lazy reduction.
struct Rational {
  u128 num = 0;
  u128 den = 1;

  void add(u128 n, u128 d) {
    num = num * d + n * den;
    den *= d;
    const u128 g = gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  std::uint64_t round_half_up() const { return static_cast<std::uint64_t>((2 * num + den) / (2 * den)); }

  static u128 gcd(u128 a, u128 b) {
    while (b != 0) {
      const u128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
};

}  // namespace

std::vector<PerRbValue> expand_packet(const PacketTxRecord& rec) {
  if (rec.rbs_used == 0) throw InputError("packet record with zero RBs");
  if (rec.bits == 0) throw InputError("packet record with zero bits");
  return std::vector<PerRbValue>(rec.rbs_used, PerRbValue{rec.bits, rec.rbs_used});
}

void ConcatPerRbVector::append(const PacketTxRecord& rec) {
  if (rec.rbs_used == 0) throw InputError("packet record with zero RBs");
  runs_.push_back({rec.bits, rec.rbs_used});
  length_ += rec.rbs_used;
  total_bits_ += rec.bits;
}

std::vector<PerRbValue> ConcatPerRbVector::entries() const {
  std::vector<PerRbValue> out;
  out.reserve(length_);
  for (const auto& r : runs_) out.insert(out.end(), r.rbs, PerRbValue{r.bits, r.rbs});
  return out;
}

ConcatPerRbVector concat_window(std::span<const PacketTxRecord> records) {
  ConcatPerRbVector out;
  for (const auto& r : records) out.append(r);
  return out;
}

std::vector<std::uint64_t> group_sums(const ConcatPerRbVector& x_con, std::size_t group_size, bool* degraded) {
  if (group_size == 0) throw InputError("group size must be positive");
  if (degraded) *degraded = false;
  std::vector<std::uint64_t> out;
  if (x_con.empty()) return out;
  if (x_con.size() < group_size) {
    if (degraded) *degraded = true;
    Rational r;
    r.add(static_cast<u128>(x_con.total_bits()) * group_size, x_con.size());
    out.push_back(r.round_half_up());
    return out;
  }

  out.reserve(x_con.size() / group_size);
  const auto& runs = x_con.runs();
  std::size_t run = 0;
  std::uint32_t used_in_run = 0;  // entries of runs[run] already consumed
  const std::size_t groups = x_con.size() / group_size;
  for (std::size_t g = 0; g < groups; ++g) {
    Rational sum;
    u128 whole = 0;
    std::size_t need = group_size;
    while (need > 0) {
      const auto& rr = runs[run];
      const std::size_t avail = rr.rbs - used_in_run;
      const std::size_t take = std::min(need, avail);
      if (take == rr.rbs) {
        whole += rr.bits;
      } else {
        sum.add(static_cast<u128>(take) * rr.bits, rr.rbs);
      }
      need -= take;
      used_in_run += static_cast<std::uint32_t>(take);
      if (used_in_run == rr.rbs) {
        ++run;
        used_in_run = 0;
      }
    }
    sum.add(whole, 1);
    out.push_back(sum.round_half_up());
  }
  return out;
}

CapacitySampleSet build_capacity_samples(const ConcatPerRbVector& x_con, int n_min, int n_cell) {
  if (n_min <= 0) throw InputError("n_min must be positive");
  if (n_min > n_cell) throw InputError("n_min exceeds the cell's RB count");
  if (x_con.empty()) throw InputError("no transmitted packets to build capacity samples from");
  CapacitySampleSet out;
  out.n_min = n_min;
  out.n_add = n_cell - n_min;
  out.per_n_samples.reserve(static_cast<std::size_t>(out.n_add) + 1);
  for (int n = 0; n <= out.n_add; ++n) {
    out.per_n_samples.push_back(group_sums(x_con, static_cast<std::size_t>(n + n_min)));
  }
  return out;
}

std::vector<PacketTxRecord> load_tx_records(std::istream& in, int service_id) {
  std::size_t line_no = 0;
  std::string line;
  bool header = false;
  std::vector<PacketTxRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (!header) {
      if (f.size() != 4 || f[0] != "tti" || f[1] != "service_id" || f[2] != "packet_bits" || f[3] != "rbs_used") {
        throw ParseError(line_no, "unexpected header, expected 'tti,service_id,packet_bits,rbs_used'");
      }
      header = true;
      continue;
    }
    if (f.size() != 4) throw ParseError(line_no, "wrong number of fields");
    PacketTxRecord r;
    r.tti = static_cast<std::int64_t>(csv::parse_u64(f[0], line_no, "tti"));
    r.service_id = static_cast<int>(csv::parse_i64(f[1], line_no, "service_id"));
    r.bits = csv::parse_u64(f[2], line_no, "packet_bits");
    const auto rbs = csv::parse_u64(f[3], line_no, "rbs_used");
    if (r.bits == 0 || rbs == 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": packet_bits and rbs_used must be positive");
    }
    r.rbs_used = static_cast<std::uint32_t>(rbs);
    if (r.service_id == service_id) out.push_back(r);
  }
  if (!header) throw ParseError(line_no, "missing header row");
  return out;
}

}  // namespace marea
