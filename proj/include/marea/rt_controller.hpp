#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace marea {

enum class FsmState { A, B, C };

char to_char(FsmState s);

struct FsmRecord {
  FsmState state = FsmState::A;
  int n_req = 0;

  bool operator==(const FsmRecord&) const = default;
};

/// Queue-wait thresholds of one service, all in TTIs.
struct RtThresholds {
  int q_t = 1;  ///< floor(W_th / t_slot)
  int q_u = 1;  ///< floor(eta * q_t)
  int q_l = 0;  ///< floor(tau * q_t)

  /// Throws InputError for eta/tau outside (0,1] or when q_u <= q_l.
  static RtThresholds make(double w_th_ms, double t_slot_ms, double eta, double tau);
};

/// One TTI of the hysteresis machine driven by the head-of-line wait `q`:
/// q > q_u escalates to B and requests one more RB; q < q_l relaxes to A;
/// in between, B and C settle in C holding their request, A stays in A.
FsmRecord fsm_step(int q, const FsmRecord& prev, const RtThresholds& thr);

/// Temporarily moves guaranteed RBs from services in state A to services in
/// B or C, one RB per step, cycling through donors and borrowers, for
/// sum(n_req) steps. Donors at zero are skipped; when every donor is at zero
/// the loop stops early. The total is conserved.
std::vector<int> mitigate(std::span<const int> n_min, std::span<const FsmRecord> fsm);

struct Packet {
  std::int64_t arrival_tti = 0;
  std::uint64_t size = 0;
  std::uint64_t remaining = 0;
  std::uint32_t rbs_touched = 0;
};

struct ServiceQueue {
  std::deque<Packet> packets;
  std::uint64_t queued_bits = 0;

  bool empty() const { return packets.empty(); }
  void push(std::int64_t tti, std::uint64_t bits);
  /// Head-of-line wait in TTIs at `tti`; 0 for an empty queue.
  int head_wait(std::int64_t tti) const;
};

struct CompletedPacket {
  int service = 0;
  Packet packet;
};

struct TtiOutcome {
  std::vector<int> rbs_used;
  std::vector<CompletedPacket> completed;
};

enum class Sharing { none, edf };

/// Serves one TTI. Phase 1: each service drains its FIFO with up to its
/// guaranteed RBs. Phase 2 (Sharing::edf): every RB not used in phase 1 goes,
/// one at a time, to the backlogged service whose head packet has the least
/// slack q_t - wait; ties to the lowest index.
TtiOutcome schedule_tti(std::span<ServiceQueue> queues, std::span<const int> n_min_i,
                        std::span<const std::uint64_t> bits_per_rb, std::span<const int> q_t, int n_cell,
                        std::int64_t tti, Sharing sharing);

}  // namespace marea
