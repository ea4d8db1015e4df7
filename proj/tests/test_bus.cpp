#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pufcan/bus.hpp"
#include "pufcan/scenario.hpp"

using namespace pufcan;

namespace {

CanFrame frame(std::uint16_t id, std::uint8_t fill = 0) {
  return CanFrame::make(id, std::vector<std::uint8_t>(8, fill));
}

struct Recorder : BusListener {
  void on_frame(const Observation& obs, Bus&) override { seen.push_back(obs); }
  std::vector<Observation> seen;
};

}  // namespace

TEST(Bus, SingleFrameDeliveredAfterWireTime) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  const auto o = bus.register_origin();
  bus.submit(frame(0x123), Micros{0}, o);
  const auto ev = bus.run_until_idle();
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].time, Micros{112});
  EXPECT_EQ(ev[0].origin, o);
}

TEST(Bus, LowestIdWinsArbitration) {
  Bus bus(FrameKind::Extended, BusSpeed::Low);
  const auto a = bus.register_origin();
  const auto b = bus.register_origin();
  bus.submit(frame(0x300), Micros{0}, a);
  bus.submit(frame(0x100), Micros{0}, b);
  const auto ev = bus.run_until_idle();
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].frame.id, 0x100);
  EXPECT_EQ(ev[0].time, Micros{1048});
  EXPECT_EQ(ev[1].frame.id, 0x300);
  EXPECT_EQ(ev[1].time, Micros{2096});
}

TEST(Bus, TiesResolvedBySubmissionOrder) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  const auto o = bus.register_origin();
  bus.submit(frame(0x10, 1), Micros{0}, o);
  bus.submit(frame(0x10, 2), Micros{0}, o);
  const auto ev = bus.run_until_idle();
  EXPECT_EQ(ev[0].frame.payload()[0], 1);
  EXPECT_EQ(ev[1].frame.payload()[0], 2);
}

TEST(Bus, RejectsInvalidFrame) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  CanFrame f;
  f.id = 4096;
  try {
    bus.submit(f, Micros{0}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidFrame);
  }
}

TEST(Bus, TwentyBackToBackFrames) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  const auto o = bus.register_origin();
  for (int i = 0; i < 20; ++i) bus.submit(frame(static_cast<std::uint16_t>(i)), Micros{0}, o);
  const auto ev = bus.run_until_idle();
  ASSERT_EQ(ev.size(), 20u);
  EXPECT_EQ(ev.back().time, Micros{2240});
}

TEST(Bus, EmptyRun) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  EXPECT_TRUE(bus.run_until(Micros{1000}).empty());
  EXPECT_EQ(bus.now(), Micros{1000});
  EXPECT_TRUE(bus.run_until_idle().empty());
}

TEST(Bus, HigherPriorityArrivalPreempts) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  const auto o = bus.register_origin();
  bus.submit(frame(0x500), Micros{0}, o);
  bus.submit(frame(0x050), Micros{50}, o);
  const auto ev = bus.run_until_idle();
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].frame.id, 0x050);
  EXPECT_EQ(ev[0].time, Micros{162});
  EXPECT_EQ(ev[1].frame.id, 0x500);
  EXPECT_EQ(ev[1].time, Micros{274});
  EXPECT_EQ(bus.preemptions(), 1u);
}

TEST(Bus, LowerPriorityArrivalWaits) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  const auto o = bus.register_origin();
  bus.submit(frame(0x050), Micros{0}, o);
  bus.submit(frame(0x500), Micros{50}, o);
  const auto ev = bus.run_until_idle();
  EXPECT_EQ(ev[0].time, Micros{112});
  EXPECT_EQ(ev[1].time, Micros{224});
  EXPECT_EQ(bus.preemptions(), 0u);
}

TEST(Bus, RejectsSubmissionInThePast) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  bus.run_until(Micros{500});
  EXPECT_THROW(bus.submit(frame(1), Micros{100}, 0), std::invalid_argument);
}

TEST(Bus, BroadcastMatchesHistory) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  Recorder r1, r2;
  bus.attach(r1);
  bus.attach(r2);
  std::mt19937_64 g(1);
  for (int i = 0; i < 50; ++i) {
    bus.submit(frame(static_cast<std::uint16_t>(g() % 2048), static_cast<std::uint8_t>(i)),
               Micros{static_cast<std::int64_t>(g() % 3000)}, 0);
  }
  bus.run_until_idle();
  ASSERT_EQ(r1.seen.size(), bus.history().size());
  for (std::size_t i = 0; i < r1.seen.size(); ++i) {
    EXPECT_EQ(r1.seen[i].frame, bus.history()[i].frame);
    EXPECT_EQ(r1.seen[i].time, bus.history()[i].time);
  }
  EXPECT_EQ(r1.seen, r2.seen);
}

TEST(Bus, DeterministicAndArbitrationInvariant) {
  auto run = [] {
    Bus bus(FrameKind::Extended, BusSpeed::High);
    std::mt19937_64 g(2);
    std::vector<std::pair<CanFrame, Micros>> sub;
    for (int i = 0; i < 200; ++i) {
      auto f = frame(static_cast<std::uint16_t>(g() % 2048), static_cast<std::uint8_t>(i));
      const Micros at{static_cast<std::int64_t>(g() % 20000)};
      bus.submit(f, at, 0);
      sub.emplace_back(f, at);
    }
    bus.run_until_idle();
    return std::make_pair(bus.history(), sub);
  };
  const auto [h1, sub] = run();
  const auto [h2, sub2] = run();
  ASSERT_EQ(h1.size(), 200u);
  for (std::size_t i = 0; i < h1.size(); ++i) {
    ASSERT_EQ(h1[i].time, h2[i].time);
    ASSERT_EQ(h1[i].frame, h2[i].frame);
  }
  // Each delivered frame wins its final arbitration slot: no frame with a lower
  // id that was already submitted at the slot start is delivered later.
  const auto wt = Micros{131};
  for (std::size_t i = 0; i < h1.size(); ++i) {
    const Micros start = h1[i].time - wt;
    for (std::size_t j = i + 1; j < h1.size(); ++j) {
      const auto it = std::find_if(sub.begin(), sub.end(), [&](const auto& s) { return s.first == h1[j].frame; });
      if (it->second <= start) {
        ASSERT_GE(h1[j].frame.id, h1[i].frame.id) << i << " vs " << j;
      }
    }
  }
}

TEST(Bus, FloodStarvesLowerPriority) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  Attacker atk(AttackStrategy::Flood);
  atk.attach(bus);
  const auto o = bus.register_origin();
  atk.flood(bus, 0x000, Micros{0}, Micros{10000});
  bus.submit(frame(100), Micros{0}, o);
  bus.run_until(Micros{10000});
  for (const auto& e : bus.history()) ASSERT_NE(e.frame.id, 100);
  bus.run_until_idle();
  EXPECT_EQ(bus.history().back().frame.id, 100);
}

TEST(Attacker, ReplayNeedsLoggedFrame) {
  Bus bus(FrameKind::Standard, BusSpeed::High);
  Attacker atk(AttackStrategy::Replay);
  atk.attach(bus);
  bus.submit(frame(0x42, 9), Micros{0}, bus.register_origin());
  bus.run_until_idle();
  ASSERT_EQ(atk.tap_log().size(), 1u);
  atk.replay(bus, atk.tap_log()[0], bus.now());
  bus.run_until_idle();
  EXPECT_EQ(bus.history().back().frame, frame(0x42, 9));
  EXPECT_EQ(bus.history().back().origin, atk.origin());
  try {
    atk.replay(bus, Observation{Micros{0}, frame(0x43)}, bus.now());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotInLog);
  }
}

TEST(Attacker, ReplayWithinAndAcrossSessions) {
  cli::ScenarioConfig cfg;
  cfg.n_ecus = 2;
  Bus bus(cfg.frame_kind, cfg.speed);
  Fleet fleet(cfg);
  fleet.attach(bus);
  Attacker atk(AttackStrategy::Replay);
  atk.attach(bus);
  fleet.subscribe(1, 0x600);
  fleet.run_session();

  const Payload msg{9, 8, 7, 6, 5, 4, 3, 2};
  fleet.send(0, 0x600, msg);
  bus.run_until_idle();
  const Observation captured = atk.tap_log().back();
  ASSERT_EQ(captured.frame.id, 0x600);

  atk.replay(bus, captured, bus.now());
  bus.run_until_idle();
  ASSERT_EQ(fleet.inbox(1).size(), 2u);
  EXPECT_EQ(fleet.inbox(1).back().plaintext, msg);

  fleet.run_session();
  atk.replay(bus, captured, bus.now());
  bus.run_until_idle();
  ASSERT_EQ(fleet.inbox(1).size(), 3u);
  EXPECT_NE(fleet.inbox(1).back().plaintext, msg);
}

TEST(Trace, CsvFormat) {
  Bus bus(FrameKind::Extended, BusSpeed::High);
  bus.submit(CanFrame::make(0x201, std::vector<std::uint8_t>{0xde, 0xad}), Micros{0}, 0);
  bus.run_until_idle();
  std::ostringstream os;
  write_trace_csv(os, bus.history(), bus.kind());
  EXPECT_EQ(os.str(), "time_us,frame_id,dlc,data_hex,kind\n131,513,2,dead,extended\n");
}

TEST(Fleet, AuthenticationOverBusTakesFourFramesPerNode) {
  cli::ScenarioConfig cfg;
  cfg.n_ecus = 5;
  Bus bus(cfg.frame_kind, cfg.speed);
  Fleet fleet(cfg);
  fleet.attach(bus);
  const auto r = fleet.run_session();
  EXPECT_EQ(r.frames, 20u);
  EXPECT_EQ(r.duration(), Micros{2240});
  EXPECT_EQ(r.operational.size(), 5u);
}

TEST(Fleet, SilentNodeTimesOut) {
  cli::ScenarioConfig cfg;
  cfg.n_ecus = 3;
  Bus bus(cfg.frame_kind, cfg.speed);
  Fleet fleet(cfg);
  fleet.attach(bus);
  const auto r = fleet.run_session({2});
  EXPECT_EQ(r.authenticated, (std::set<NodeId>{0, 1}));
  EXPECT_EQ(r.frames, 8u);
  EXPECT_GE(r.duration(), cfg.timeout());
}
