#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "pufcan/protocol/node.hpp"
#include "pufcan/protocol/server.hpp"

using namespace pufcan;

namespace {

DeviceSeed seed_from(Drbg& g) {
  DeviceSeed s{};
  g.fill(s);
  return s;
}

struct Harness {
  explicit Harness(std::size_t n, SessionMode mode = SessionMode::Key80Padded, unsigned width = 80,
                 std::uint64_t seed = 1, std::set<NodeId> noisy = {})
      : seeds(seed, "test-seeds"), noise(seed, "test-noise"), keys(seed, "test-keys"),
        server(PufDevice(seed_from(seeds)), mode, width) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = static_cast<NodeId>(i);
      nodes.emplace_back(id, PufDevice(seed_from(seeds), 256, noisy.contains(id) ? 1.0 : 0.0));
      server.enroll(nodes.back());
    }
    server.close_enrollment();
  }

  // Runs one session start to finish; returns the number of frames exchanged.
  std::size_t run_session() {
    server.begin_session();
    std::size_t frames = 0;
    for (auto& n : nodes) {
      const auto pair = n.begin_auth(server.key_width(), noise);
      frames += pair.size();
      server.handle_auth(n.id(), pair);
    }
    server.close_auth_window();
    for (auto& [id, pair] : server.issue_session_keys(keys)) {
      frames += pair.size();
      nodes.at(id).receive_session_key(pair, server.mode());
    }
    return frames;
  }

  void power_cycle() {
    for (auto& n : nodes) n.power_off();
  }

  Drbg seeds, noise, keys;
  Server server;
  std::vector<Node> nodes;
};

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no pufcan::Error thrown";
  return Errc::IoFailure;
}

bool has_anomaly(const Server& s, AnomalyKind k) {
  for (const auto& a : s.anomaly_log()) {
    if (a.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST(Enrollment, SingleNode) {
  Harness s(1);
  EXPECT_EQ(s.server.db().size(), 1u);
  EXPECT_TRUE(s.nodes[0].enrolled());
  const auto* rec = s.server.db().find(0);
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->response_hash, hash128(s.nodes[0].puf().noise_free_response().bytes()));
}

TEST(Enrollment, DuplicateNodeId) {
  Drbg seeds(2, "test-seeds");
  Server server(PufDevice(seed_from(seeds)), SessionMode::Key80Padded, 80);
  Node a(3, PufDevice(seed_from(seeds)));
  Node b(3, PufDevice(seed_from(seeds)));
  server.enroll(a);
  EXPECT_EQ(error_of([&] { server.enroll(b); }), Errc::DuplicateNodeId);
}

TEST(Enrollment, ClosedAfterSessionStarts) {
  Harness s(2);
  s.server.begin_session();
  Drbg seeds(9, "late");
  Node late(7, PufDevice(seed_from(seeds)));
  EXPECT_EQ(error_of([&] { s.server.enroll(late); }), Errc::EnrollmentClosed);
}

TEST(Enrollment, BitmaskLimitsNodeIds) {
  Drbg seeds(3, "test-seeds");
  Server server(PufDevice(seed_from(seeds)), SessionMode::Key80Bitmask, 80);
  Node ok(47, PufDevice(seed_from(seeds)));
  Node bad(48, PufDevice(seed_from(seeds)));
  server.enroll(ok);
  EXPECT_EQ(error_of([&] { server.enroll(bad); }), Errc::ConfigInvalid);
}

TEST(EnrollmentDb, JsonRoundTrip) {
  Harness s(4, SessionMode::Key80Bitmask, 128);
  const auto j = s.server.db().to_json();
  EXPECT_EQ(j.at("format"), "pufcan-enrollment/1");
  const auto back = EnrollmentDb::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_FALSE(back.open());
  EXPECT_EQ(back.mode(), SessionMode::Key80Bitmask);
  EXPECT_EQ(back.key_width(), 128u);
  EXPECT_EQ(back.server_public(), s.server.public_key());
  EXPECT_EQ(back.nodes(), s.server.db().nodes());
}

TEST(EnrollmentDb, MalformedJson) {
  EXPECT_EQ(error_of([] { EnrollmentDb::from_json(nlohmann::json::parse(R"({"format":"x"})")); }),
            Errc::ParseError);
}

TEST(Auth, RequestIsTwoFullFramesCarryingHash) {
  Harness s(1);
  s.server.begin_session();
  auto& n = s.nodes[0];
  const auto pair = n.begin_auth(80, s.noise);
  for (const auto& f : pair) {
    EXPECT_EQ(f.dlc, 8);
    EXPECT_EQ(f.id, n.frame_ids().auth_request_id);
  }
  const auto plain = decrypt_halves(*n.shared_key(), block_from_frames(pair));
  EXPECT_EQ(plain, s.server.db().find(0)->response_hash);
  EXPECT_EQ(s.server.handle_auth(0, pair), AuthOutcome::Accepted);
  EXPECT_EQ(s.server.shared_key_for(0), n.shared_key());
}

TEST(Auth, NodeNotEnrolled) {
  Drbg seeds(4, "x");
  Drbg noise(4, "y");
  Node n(0, PufDevice(seed_from(seeds)));
  EXPECT_EQ(error_of([&] { n.begin_auth(80, noise); }), Errc::NotEnrolled);
}

TEST(Auth, NoisyNodeRejectedOthersAccepted) {
  Harness s(3, SessionMode::Key80Padded, 80, 1, {1});
  s.run_session();
  EXPECT_EQ(s.server.authenticated(), (std::set<NodeId>{0, 2}));
  EXPECT_TRUE(has_anomaly(s.server, AnomalyKind::HashMismatch));
  EXPECT_EQ(s.nodes[1].phase(), NodePhase::AwaitingSessionKey);
  EXPECT_EQ(s.nodes[0].phase(), NodePhase::Operational);
}

TEST(Auth, DuplicateAttemptLogged) {
  Harness s(1);
  s.server.begin_session();
  const auto pair = s.nodes[0].begin_auth(80, s.noise);
  EXPECT_EQ(s.server.handle_auth(0, pair), AuthOutcome::Accepted);
  EXPECT_EQ(s.server.handle_auth(0, pair), AuthOutcome::Duplicate);
  EXPECT_TRUE(has_anomaly(s.server, AnomalyKind::DuplicateAuthAttempt));
  EXPECT_EQ(s.server.authenticated().size(), 1u);
}

TEST(Auth, RandomKeyForgeryRejected) {
  Harness s(1);
  s.server.begin_session();
  std::mt19937_64 g(1);
  std::array<std::uint8_t, 10> k{};
  for (auto& x : k) x = static_cast<std::uint8_t>(g());
  const auto forged = frames_from_block(0x200, encrypt_halves(BlockKey(k, 80), s.server.db().find(0)->response_hash));
  EXPECT_EQ(s.server.handle_auth(0, forged), AuthOutcome::Rejected);
  EXPECT_TRUE(has_anomaly(s.server, AnomalyKind::HashMismatch));
}

TEST(Auth, UnknownNodeAndWrongPhase) {
  Harness s(1);
  const auto pair = frames_from_block(0x200, Block128{});
  EXPECT_EQ(error_of([&] { s.server.handle_auth(0, pair); }), Errc::WrongPhase);
  s.server.begin_session();
  EXPECT_EQ(error_of([&] { s.server.handle_auth(9, pair); }), Errc::UnknownNode);
}

TEST(Auth, MalformedFrameSet) {
  const auto pair = frames_from_block(0x200, Block128{});
  EXPECT_EQ(error_of([&] { block_from_frames(std::span(pair).first(1)); }), Errc::MalformedFrames);
}

TEST(Auth, MissingNodeLogsUnknownCount) {
  Harness s(2);
  s.server.begin_session();
  s.server.handle_auth(0, s.nodes[0].begin_auth(80, s.noise));
  s.server.close_auth_window();
  EXPECT_TRUE(has_anomaly(s.server, AnomalyKind::UnknownNodeCount));
}

TEST(Auth, PrematureTrafficLogged) {
  Harness s(1);
  s.server.begin_session();
  s.server.on_frame(CanFrame::make(0x600, std::vector<std::uint8_t>(8, 0)));
  EXPECT_TRUE(has_anomaly(s.server, AnomalyKind::PrematureTraffic));
}

TEST(SessionPacket, PaddedLayout) {
  std::array<std::uint8_t, 10> k{};
  k.fill(0xFF);
  const auto b = encode_session_key_packet({SessionMode::Key80Padded, BlockKey(k, 80), {}});
  for (std::size_t i = 0; i < 80; ++i) ASSERT_TRUE(get_bit(b, i));
  for (std::size_t i = 80; i < 128; ++i) ASSERT_FALSE(get_bit(b, i));
  EXPECT_EQ(decode_session_key_packet(b, SessionMode::Key80Padded).key, BlockKey(k, 80));
}

TEST(SessionPacket, NonzeroPadding) {
  Block128 b{};
  set_bit(b, 100, true);
  EXPECT_EQ(error_of([&] { decode_session_key_packet(b, SessionMode::Key80Padded); }), Errc::NonzeroPadding);
}

TEST(SessionPacket, BitmaskLayout) {
  std::array<std::uint8_t, 10> k{};
  ValidMask m;
  m.set(0).set(5).set(47);
  const auto b = encode_session_key_packet({SessionMode::Key80Bitmask, BlockKey(k, 80), m});
  EXPECT_TRUE(get_bit(b, 80));
  EXPECT_TRUE(get_bit(b, 85));
  EXPECT_TRUE(get_bit(b, 127));
  EXPECT_FALSE(get_bit(b, 81));
  EXPECT_EQ(decode_session_key_packet(b, SessionMode::Key80Bitmask).valid_mask, m);
}

TEST(SessionPacket, RoundTripAllModes) {
  std::mt19937_64 g(2);
  for (auto mode : {SessionMode::Key80Padded, SessionMode::Key80Bitmask, SessionMode::Key128}) {
    for (int i = 0; i < 100; ++i) {
      std::array<std::uint8_t, 16> raw{};
      for (auto& x : raw) x = static_cast<std::uint8_t>(g());
      const unsigned w = session_key_width(mode);
      SessionKeyPacket p{mode, BlockKey(std::span<const std::uint8_t>(raw.data(), w / 8), w), {}};
      if (mode == SessionMode::Key80Bitmask) p.valid_mask = ValidMask(g());
      ASSERT_EQ(decode_session_key_packet(encode_session_key_packet(p), mode), p);
    }
  }
}

TEST(SessionPacket, ModeKeyWidthMismatch) {
  std::array<std::uint8_t, 16> k{};
  EXPECT_EQ(error_of([&] { encode_session_key_packet({SessionMode::Key128, BlockKey(std::span(k).first(10), 80), {}}); }),
            Errc::ModeKeyWidthMismatch);
}

TEST(SessionKeys, TwoFramesPerNodeSameKeyEverywhere) {
  for (auto mode : {SessionMode::Key80Padded, SessionMode::Key80Bitmask, SessionMode::Key128}) {
    Harness s(6, mode, mode == SessionMode::Key128 ? 128 : 80);
    EXPECT_EQ(s.run_session(), 4u * 6u);
    for (const auto& n : s.nodes) {
      ASSERT_EQ(n.phase(), NodePhase::Operational);
      EXPECT_EQ(n.session_key(), s.server.session_key());
    }
  }
}

TEST(SessionKeys, FreshEverySession) {
  Harness s(2);
  std::set<Bytes> keys;
  for (int i = 0; i < 100; ++i) {
    s.run_session();
    const auto& b = s.server.session_key()->bytes();
    keys.emplace(b.begin(), b.end());
    s.power_cycle();
  }
  EXPECT_EQ(keys.size(), 100u);
}

TEST(SessionKeys, BitmaskMatchesAuthenticatedSet) {
  Harness s(5, SessionMode::Key80Bitmask, 80, 1, {2, 4});
  s.run_session();
  ValidMask expected;
  for (auto id : s.server.authenticated()) expected.set(id);
  EXPECT_EQ(expected.count(), 3u);
  for (auto id : s.server.authenticated()) EXPECT_EQ(*s.nodes[id].valid_mask(), expected);
}

TEST(SessionKeys, NoAuthenticatedNodes) {
  Harness s(2, SessionMode::Key80Padded, 80, 1, {0, 1});
  s.server.begin_session();
  for (auto& n : s.nodes) s.server.handle_auth(n.id(), n.begin_auth(80, s.noise));
  s.server.close_auth_window();
  EXPECT_EQ(error_of([&] { s.server.issue_session_keys(s.keys); }), Errc::NoAuthenticatedNodes);
}

TEST(SessionKeys, WrongNodeFramesGiveWrongKey) {
  Harness s(2, SessionMode::Key128, 80);
  s.server.begin_session();
  for (auto& n : s.nodes) s.server.handle_auth(n.id(), n.begin_auth(80, s.noise));
  s.server.close_auth_window();
  const auto issued = s.server.issue_session_keys(s.keys);
  s.nodes[1].receive_session_key(issued.at(0), SessionMode::Key128);
  EXPECT_NE(s.nodes[1].session_key(), s.server.session_key());
}

TEST(SecureTraffic, SendReceive) {
  Harness s(3);
  s.run_session();
  const Payload msg{1, 2, 3, 4, 5, 6, 7, 8};
  const auto f = s.nodes[0].secure_send(0x600, msg);
  EXPECT_NE(f.payload()[0] == 1 && f.payload()[7] == 8, true);
  EXPECT_EQ(s.nodes[2].secure_receive(f), msg);
  EXPECT_EQ(error_of([&] { s.nodes[0].secure_send(0x600, std::span(msg).first(7)); }), Errc::BadPayloadLength);
}

TEST(SecureTraffic, NotOperational) {
  Harness s(1);
  const Payload msg{};
  EXPECT_EQ(error_of([&] { s.nodes[0].secure_send(0x600, msg); }), Errc::NotOperational);
}

TEST(Threats, StorageThiefCannotDeriveSharedKey) {
  // Full read-out of server-side data: db (public keys and hashes) only.
  Harness s(1);
  s.run_session();
  const auto& db = s.server.db();
  const auto& rec = *db.find(0);
  // Best the thief can do is treat the stored hash as a private scalar seed.
  const auto guess = keypair_from_response(BitString(Bytes(rec.response_hash.begin(), rec.response_hash.end()), 128));
  const auto key = derive_shared_key(shared_secret(guess.private_scalar, db.server_public()), 80);
  EXPECT_NE(key, *s.server.shared_key_for(0));
  EXPECT_NE(key, *s.nodes[0].shared_key());
}

TEST(Threats, UnenrolledDeviceRejected) {
  Harness s(1);
  s.server.begin_session();
  Drbg seeds(77, "impostor");
  Node impostor(0, PufDevice(seed_from(seeds)));
  impostor.store_server_public(s.server.public_key());
  EXPECT_EQ(s.server.handle_auth(0, impostor.begin_auth(80, s.noise)), AuthOutcome::Rejected);
}

TEST(Suite, ServerAndNodeWorkWithAnotherHash) {
  struct Blake2Suite : DefaultSuite {
    static Digest128 hash128(std::span<const std::uint8_t> m) {
      Digest128 d{};
      crypto_generichash(d.data(), d.size(), m.data(), m.size(), nullptr, 0);
      return d;
    }
  };
  Drbg seeds(5, "s"), noise(5, "n"), keys(5, "k");
  BasicServer<Blake2Suite> server(PufDevice(seed_from(seeds)), SessionMode::Key80Padded, 80);
  BasicNode<Blake2Suite> node(0, PufDevice(seed_from(seeds)));
  server.enroll(node);
  server.begin_session();
  EXPECT_EQ(server.handle_auth(0, node.begin_auth(80, noise)), AuthOutcome::Accepted);
  server.close_auth_window();
  node.receive_session_key(server.issue_session_keys(keys).at(0), server.mode());
  EXPECT_EQ(node.session_key(), server.session_key());
}
