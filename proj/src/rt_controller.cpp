#include "marea/rt_controller.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "marea/error.hpp"

namespace marea {

char to_char(FsmState s) {
  switch (s) {
    case FsmState::A: return 'A';
    case FsmState::B: return 'B';
    case FsmState::C: return 'C';
  }
  return '?';
}

RtThresholds RtThresholds::make(double w_th_ms, double t_slot_ms, double eta, double tau) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("eta must lie in (0,1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw InputError("tau must lie in (0,1]");
  if (!(w_th_ms > 0.0 && t_slot_ms > 0.0)) throw InputError("delay budget and slot must be positive");
  RtThresholds t;
  // small epsilon keeps e.g. 5.0/1.0 from landing at 4.999...
  t.q_t = static_cast<int>(std::floor(w_th_ms / t_slot_ms + 1e-9));
  t.q_u = static_cast<int>(std::floor(eta * t.q_t + 1e-9));
  t.q_l = static_cast<int>(std::floor(tau * t.q_t + 1e-9));
  if (t.q_t < 1) throw InputError("delay budget shorter than one slot");
  if (t.q_u <= t.q_l) {
    throw InputError("upper queue threshold " + std::to_string(t.q_u) + " must exceed lower threshold " +
                     std::to_string(t.q_l));
  }
  return t;
}

FsmRecord fsm_step(int q, const FsmRecord& prev, const RtThresholds& thr) {
  if (q > thr.q_u) return {FsmState::B, prev.n_req + 1};
  if (q < thr.q_l) return {FsmState::A, 0};
  if (prev.state == FsmState::A) return {FsmState::A, 0};
  return {FsmState::C, prev.n_req};
}

std::vector<int> mitigate(std::span<const int> n_min, std::span<const FsmRecord> fsm) {
  if (n_min.size() != fsm.size()) throw InputError("mitigate: length mismatch");
  std::vector<int> out(n_min.begin(), n_min.end());
  std::vector<std::size_t> donors, borrowers;
  int steps = 0;
  for (std::size_t m = 0; m < fsm.size(); ++m) {
    if (fsm[m].state == FsmState::A) {
      donors.push_back(m);
    } else {
      borrowers.push_back(m);
      steps += fsm[m].n_req;
    }
  }
  if (donors.empty() || borrowers.empty()) return out;

  std::size_t jd = 0, jb = 0;
  for (int u = 0; u < steps; ++u) {
    // next donor with RBs left
    std::size_t tries = 0;
    while (out[donors[jd]] <= 0 && tries < donors.size()) {
      jd = (jd + 1) % donors.size();
      ++tries;
    }
    if (out[donors[jd]] <= 0) break;
    --out[donors[jd]];
    ++out[borrowers[jb]];
    jd = (jd + 1) % donors.size();
    jb = (jb + 1) % borrowers.size();
  }
  return out;
}

void ServiceQueue::push(std::int64_t tti, std::uint64_t bits) {
  if (bits == 0) return;
  packets.push_back({tti, bits, bits, 0});
  queued_bits += bits;
}

int ServiceQueue::head_wait(std::int64_t tti) const {
  if (packets.empty()) return 0;
  return static_cast<int>(tti - packets.front().arrival_tti);
}

namespace {

// Spends one RB of `capacity` bits on the head of `q`; records completions.
void serve_one_rb(ServiceQueue& q, std::uint64_t capacity, int service,
                  std::vector<CompletedPacket>& done) {
  while (capacity > 0 && !q.packets.empty()) {
    Packet& head = q.packets.front();
    ++head.rbs_touched;
    const std::uint64_t take = std::min(capacity, head.remaining);
    head.remaining -= take;
    q.queued_bits -= take;
    capacity -= take;
    if (head.remaining == 0) {
      done.push_back({service, head});
      q.packets.pop_front();
    }
  }
}

}  // namespace

TtiOutcome schedule_tti(std::span<ServiceQueue> queues, std::span<const int> n_min_i,
                        std::span<const std::uint64_t> bits_per_rb, std::span<const int> q_t, int n_cell,
                        std::int64_t tti, Sharing sharing) {
  const std::size_t m_count = queues.size();
  if (n_min_i.size() != m_count || bits_per_rb.size() != m_count || q_t.size() != m_count) {
    throw InputError("schedule_tti: length mismatch");
  }
  const int guaranteed = std::accumulate(n_min_i.begin(), n_min_i.end(), 0);
  if (guaranteed > n_cell) throw InputError("guaranteed RBs exceed the cell");

  TtiOutcome out;
  out.rbs_used.assign(m_count, 0);
  int used_total = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    while (out.rbs_used[m] < n_min_i[m] && !queues[m].empty()) {
      serve_one_rb(queues[m], bits_per_rb[m], static_cast<int>(m), out.completed);
      ++out.rbs_used[m];
    }
    used_total += out.rbs_used[m];
  }
  if (sharing == Sharing::none) return out;

  int free_rbs = n_cell - used_total;
  while (free_rbs > 0) {
    int pick = -1;
    long best_slack = 0;
    for (std::size_t m = 0; m < m_count; ++m) {
      if (queues[m].empty()) continue;
      const long slack = static_cast<long>(q_t[m]) - queues[m].head_wait(tti);
      if (pick < 0 || slack < best_slack) {
        pick = static_cast<int>(m);
        best_slack = slack;
      }
    }
    if (pick < 0) break;
    serve_one_rb(queues[pick], bits_per_rb[pick], pick, out.completed);
    ++out.rbs_used[pick];
    --free_rbs;
  }
  return out;
}

}  // namespace marea
