#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pufcan/bits.hpp"
#include "pufcan/canframe.hpp"

namespace pufcan {

using ParticipantId = std::uint32_t;

/// A completed transmission. `origin` is simulation metadata for assertions;
/// listeners only ever receive an Observation.
struct BusEvent {
  Micros time{0};  // completion instant
  CanFrame frame;
  ParticipantId origin = 0;
};

struct Observation {
  Micros time{0};
  CanFrame frame;

  friend bool operator==(const Observation&, const Observation&) = default;
};

class Bus;

class BusListener {
 public:
  virtual ~BusListener() = default;
  virtual void on_frame(const Observation& obs, Bus& bus) = 0;
};

/// Deterministic single-channel CAN bus. Whenever the bus is idle the pending
/// frame with the lowest id (ties: submission order) wins arbitration and
/// occupies the bus for one frame wire time. A higher-priority frame that
/// arrives mid-transmission aborts the current frame, which goes back to the
/// pending set and restarts from scratch later. Completed frames are broadcast
/// to every listener in attachment order. Time is integer microseconds.
class Bus {
 public:
  Bus(FrameKind kind, BusSpeed speed) : kind_(kind), speed_(speed) {}
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  FrameKind kind() const noexcept { return kind_; }
  BusSpeed speed() const noexcept { return speed_; }
  Micros wire_time() const noexcept { return frame_wire_time(kind_, speed_); }
  Micros now() const noexcept { return now_; }

  /// Origin handle for a participant that transmits without listening.
  ParticipantId register_origin() { return next_origin_++; }

  ParticipantId attach(BusListener& l) {
    listeners_.push_back(&l);
    return register_origin();
  }

  void submit(const CanFrame& frame, Micros at, ParticipantId origin) {
    require_valid(frame);
    if (at < now_) throw std::invalid_argument("cannot submit a frame in the past");
    pending_.push_back({frame, at, origin, seq_++});
  }

  bool idle() const noexcept { return pending_.empty() && !in_flight_; }

  /// Advance simulated time to t_end, returning frames completed meanwhile.
  std::vector<BusEvent> run_until(Micros t_end) {
    std::vector<BusEvent> done;
    while (true) {
      if (in_flight_) {
        if (auto t = preemption_time(); t && *t <= t_end) {
          now_ = *t;
          pending_.push_back(in_flight_->entry);
          in_flight_.reset();
          ++preemptions_;
          continue;
        }
        if (in_flight_->end > t_end) break;
        now_ = in_flight_->end;
        BusEvent ev{now_, in_flight_->entry.frame, in_flight_->entry.origin};
        in_flight_.reset();
        history_.push_back(ev);
        done.push_back(ev);
        const Observation obs{ev.time, ev.frame};
        for (auto* l : listeners_) l->on_frame(obs, *this);
        continue;
      }
      auto winner = arbitrate();
      if (winner == pending_.end()) {
        auto next = std::min_element(pending_.begin(), pending_.end(),
                                     [](const Pending& a, const Pending& b) { return a.at < b.at; });
        if (next == pending_.end() || next->at > t_end) break;
        now_ = next->at;
        continue;
      }
      in_flight_ = InFlight{*winner, now_, now_ + wire_time()};
      pending_.erase(winner);
    }
    if (now_ < t_end && !in_flight_) now_ = t_end;
    return done;
  }

  /// Run until nothing is pending or in flight (or `limit` is reached).
  std::vector<BusEvent> run_until_idle(Micros limit = Micros{std::int64_t{1} << 40}) {
    std::vector<BusEvent> all;
    while (!idle()) {
      Micros horizon = in_flight_ ? in_flight_->end : earliest_pending();
      if (in_flight_) {
        if (auto t = preemption_time()) horizon = *t;
      }
      if (horizon > limit) break;
      auto evs = run_until(horizon);
      all.insert(all.end(), evs.begin(), evs.end());
    }
    return all;
  }

  const std::vector<BusEvent>& history() const noexcept { return history_; }
  std::size_t preemptions() const noexcept { return preemptions_; }

 private:
  struct Pending {
    CanFrame frame;
    Micros at;
    ParticipantId origin;
    std::uint64_t seq;
  };
  struct InFlight {
    Pending entry;
    Micros start;
    Micros end;
  };

  std::optional<Micros> preemption_time() const {
    std::optional<Micros> t;
    for (const auto& p : pending_) {
      if (p.frame.id < in_flight_->entry.frame.id && p.at > in_flight_->start && p.at < in_flight_->end &&
          (!t || p.at < *t)) {
        t = p.at;
      }
    }
    return t;
  }

  std::vector<Pending>::iterator arbitrate() {
    auto best = pending_.end();
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (it->at > now_) continue;
      if (best == pending_.end() || it->frame.id < best->frame.id ||
          (it->frame.id == best->frame.id && it->seq < best->seq)) {
        best = it;
      }
    }
    return best;
  }

  Micros earliest_pending() const {
    Micros m = Micros::max();
    for (const auto& p : pending_) m = std::min(m, std::max(p.at, now_));
    return m;
  }

  FrameKind kind_;
  BusSpeed speed_;
  Micros now_{0};
  std::uint64_t seq_ = 0;
  ParticipantId next_origin_ = 1;
  std::vector<BusListener*> listeners_;
  std::vector<Pending> pending_;
  std::optional<InFlight> in_flight_;
  std::vector<BusEvent> history_;
  std::size_t preemptions_ = 0;
};

/// Passive tap plus the active capabilities of an attacker with bus access.
enum class AttackStrategy { Eavesdrop, Replay, Inject, Flood };

constexpr std::string_view to_string(AttackStrategy s) noexcept {
  switch (s) {
    case AttackStrategy::Eavesdrop: return "eavesdrop";
    case AttackStrategy::Replay: return "replay";
    case AttackStrategy::Inject: return "inject";
    case AttackStrategy::Flood: return "flood";
  }
  return "?";
}

inline std::optional<AttackStrategy> parse_attack_strategy(std::string_view s) {
  for (auto a : {AttackStrategy::Eavesdrop, AttackStrategy::Replay, AttackStrategy::Inject, AttackStrategy::Flood})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

class Attacker : public BusListener {
 public:
  explicit Attacker(AttackStrategy strategy) : strategy_(strategy) {}

  void attach(Bus& bus) { origin_ = bus.attach(*this); }

  AttackStrategy strategy() const noexcept { return strategy_; }
  const std::vector<Observation>& tap_log() const noexcept { return tap_; }
  ParticipantId origin() const noexcept { return origin_; }

  void on_frame(const Observation& obs, Bus&) override { tap_.push_back(obs); }

  /// Bitwise copy of a previously observed frame.
  void replay(Bus& bus, const Observation& logged, Micros at) {
    if (std::find(tap_.begin(), tap_.end(), logged) == tap_.end()) {
      throw Error(Errc::NotInLog, "frame id " + std::to_string(logged.frame.id));
    }
    bus.submit(logged.frame, at, origin_);
  }

  void inject(Bus& bus, const CanFrame& frame, Micros at) { bus.submit(frame, at, origin_); }

  /// Back-to-back frames on `id` covering [from, until): the bus never sees
  /// an arbitration slot without one of them pending.
  void flood(Bus& bus, std::uint16_t id, Micros from, Micros until) {
    const auto f = CanFrame::make(id, Payload8{});
    for (Micros t = from; t < until; t += bus.wire_time()) bus.submit(f, t, origin_);
  }

 private:
  using Payload8 = std::array<std::uint8_t, 8>;

  AttackStrategy strategy_;
  ParticipantId origin_ = 0;
  std::vector<Observation> tap_;
};

/// Event trace as CSV: time_us,frame_id,dlc,data_hex,kind
inline void write_trace_csv(std::ostream& os, const std::vector<BusEvent>& events, FrameKind kind) {
  os << "time_us,frame_id,dlc,data_hex,kind\n";
  for (const auto& e : events) {
    os << e.time.count() << ',' << e.frame.id << ',' << unsigned{e.frame.dlc} << ',' << to_hex(e.frame.payload())
       << ',' << to_string(kind) << '\n';
  }
}

}  // namespace pufcan
