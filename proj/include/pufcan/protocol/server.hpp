#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pufcan/protocol/enrollment.hpp"
#include "pufcan/protocol/node.hpp"

namespace pufcan {

enum class AnomalyKind { DuplicateAuthAttempt, UnknownNodeCount, HashMismatch, PrematureTraffic };

constexpr std::string_view to_string(AnomalyKind k) noexcept {
  switch (k) {
    case AnomalyKind::DuplicateAuthAttempt: return "DuplicateAuthAttempt";
    case AnomalyKind::UnknownNodeCount: return "UnknownNodeCount";
    case AnomalyKind::HashMismatch: return "HashMismatch";
    case AnomalyKind::PrematureTraffic: return "PrematureTraffic";
  }
  return "?";
}

struct AnomalyEvent {
  AnomalyKind kind;
  std::string detail;
};

enum class AuthOutcome { Accepted, Rejected, Duplicate };

enum class ServerPhase { Enrollment, Idle, AuthWindow, KeysIssued };

/// The trusted gateway. A session runs begin_session -> handle_auth (per
/// node) -> close_auth_window -> issue_session_keys.
template <CryptoSuite Suite = DefaultSuite>
class BasicServer {
 public:
  BasicServer(PufDevice puf, SessionMode mode, unsigned key_width)
      : puf_(std::move(puf)),
        db_(Suite::keypair_from_response(puf_.noise_free_response()).public_key, mode, key_width) {}

  /// Resume from an exported database; enrollment is over.
  BasicServer(PufDevice puf, EnrollmentDb db) : puf_(std::move(puf)), db_(std::move(db)) {
    db_.close();
    phase_ = ServerPhase::Idle;
  }

  const Bytes& public_key() const noexcept { return db_.server_public(); }
  const EnrollmentDb& db() const noexcept { return db_; }
  SessionMode mode() const noexcept { return db_.mode(); }
  unsigned key_width() const noexcept { return db_.key_width(); }
  ServerPhase phase() const noexcept { return phase_; }
  const std::set<NodeId>& authenticated() const noexcept { return authenticated_; }
  const std::set<NodeId>& attempted() const noexcept { return attempted_; }
  const std::vector<AnomalyEvent>& anomaly_log() const noexcept { return anomalies_; }
  const std::optional<BlockKey>& session_key() const noexcept { return session_key_; }

  std::optional<BlockKey> shared_key_for(NodeId id) const {
    auto it = shared_keys_.find(id);
    return it == shared_keys_.end() ? std::nullopt : std::optional<BlockKey>(it->second);
  }

  void enroll(BasicNode<Suite>& node) {
    if (phase_ != ServerPhase::Enrollment || !db_.open()) {
      throw Error(Errc::EnrollmentClosed, "node " + std::to_string(node.id()));
    }
    db_.add(node.enrollment_record());
    node.store_server_public(db_.server_public());
  }

  void close_enrollment() {
    db_.close();
    if (phase_ == ServerPhase::Enrollment) phase_ = ServerPhase::Idle;
  }

  /// Power-on: regenerate the key pair from the PUF and reset session state.
  void begin_session() {
    close_enrollment();
    const KeyPair kp = Suite::keypair_from_response(puf_.noise_free_response());
    private_scalar_ = kp.private_scalar;
    shared_keys_.clear();
    authenticated_.clear();
    attempted_.clear();
    pending_.clear();
    session_key_.reset();
    phase_ = ServerPhase::AuthWindow;
  }

  AuthOutcome handle_auth(NodeId id, std::span<const CanFrame> frames) {
    if (phase_ != ServerPhase::AuthWindow) throw Error(Errc::WrongPhase, "authentication window is not open");
    const NodeRecord* rec = db_.find(id);
    if (rec == nullptr) throw Error(Errc::UnknownNode, "node " + std::to_string(id));
    const Block128 cipher = block_from_frames(frames);

    if (attempted_.contains(id)) {
      log(AnomalyKind::DuplicateAuthAttempt, "node " + std::to_string(id));
      return AuthOutcome::Duplicate;
    }
    attempted_.insert(id);

    const BlockKey& key = shared_key_for_node(*rec);
    if (decrypt_halves<Suite>(key, cipher) != rec->response_hash) {
      log(AnomalyKind::HashMismatch, "node " + std::to_string(id));
      return AuthOutcome::Rejected;
    }
    authenticated_.insert(id);
    return AuthOutcome::Accepted;
  }

  bool all_attempted() const noexcept { return attempted_.size() == db_.size(); }

  void close_auth_window() {
    if (phase_ != ServerPhase::AuthWindow) throw Error(Errc::WrongPhase, "authentication window is not open");
    if (!all_attempted()) {
      log(AnomalyKind::UnknownNodeCount, std::to_string(attempted_.size()) + " of " +
                                             std::to_string(db_.size()) + " enrolled nodes attempted");
    }
    pending_.clear();
    phase_ = ServerPhase::KeysIssued;
  }

  /// One fresh key per session, wrapped for every authenticated node.
  /// `rng` must provide fill(std::span<std::uint8_t>), e.g. Drbg.
  template <class Rng>
  std::map<NodeId, FramePair> issue_session_keys(Rng& rng) {
    if (phase_ != ServerPhase::KeysIssued || session_key_) {
      throw Error(Errc::WrongPhase, "session keys are issued once, after the window closes");
    }
    if (authenticated_.empty()) throw Error(Errc::NoAuthenticatedNodes);

    const unsigned width = session_key_width(mode());
    std::array<std::uint8_t, 16> raw{};
    rng.fill(std::span(raw).first(width / 8));
    SessionKeyPacket pkt;
    pkt.mode = mode();
    pkt.key = BlockKey(std::span<const std::uint8_t>(raw.data(), width / 8), width);
    if (mode() == SessionMode::Key80Bitmask) {
      for (NodeId id : authenticated_) pkt.valid_mask.set(id);
    }
    session_key_ = pkt.key;
    const Block128 plain = encode_session_key_packet(pkt);

    std::map<NodeId, FramePair> out;
    for (NodeId id : authenticated_) {
      const NodeRecord& rec = *db_.find(id);
      out.emplace(id, frames_from_block(rec.frame_ids.session_key_id,
                                        encrypt_halves<Suite>(shared_keys_.at(id), plain)));
    }
    return out;
  }

  /// Bus-side entry point. Auth frames are paired per sender id; anything
  /// else seen while the window is open is logged as premature traffic.
  std::optional<AuthOutcome> on_frame(const CanFrame& frame) {
    if (phase_ != ServerPhase::AuthWindow) return std::nullopt;
    const auto id = db_.node_for_auth_id(frame.id);
    if (!id) {
      log(AnomalyKind::PrematureTraffic, "frame id " + std::to_string(frame.id));
      return std::nullopt;
    }
    auto& buf = pending_[*id];
    buf.push_back(frame);
    if (frame.dlc != 8 || frame.data_len != 8) {
      buf.clear();
      if (attempted_.contains(*id)) {
        log(AnomalyKind::DuplicateAuthAttempt, "node " + std::to_string(*id));
        return AuthOutcome::Duplicate;
      }
      attempted_.insert(*id);
      log(AnomalyKind::HashMismatch, "node " + std::to_string(*id) + ": malformed frame");
      return AuthOutcome::Rejected;
    }
    if (buf.size() < 2) return std::nullopt;
    const std::vector<CanFrame> pair(buf.begin(), buf.end());
    buf.clear();
    return handle_auth(*id, pair);
  }

 private:
  const BlockKey& shared_key_for_node(const NodeRecord& rec) {
    auto it = shared_keys_.find(rec.id);
    if (it == shared_keys_.end()) {
      const auto ss = Suite::shared_secret(*private_scalar_, rec.node_public);
      it = shared_keys_.emplace(rec.id, derive_shared_key<Suite>(ss, key_width())).first;
    }
    return it->second;
  }

  void log(AnomalyKind kind, std::string detail) { anomalies_.push_back({kind, std::move(detail)}); }

  PufDevice puf_;
  EnrollmentDb db_;
  ServerPhase phase_ = ServerPhase::Enrollment;
  std::optional<std::array<std::uint8_t, 32>> private_scalar_;
  std::map<NodeId, BlockKey> shared_keys_;
  std::set<NodeId> authenticated_;
  std::set<NodeId> attempted_;
  std::map<NodeId, std::vector<CanFrame>> pending_;
  std::optional<BlockKey> session_key_;
  std::vector<AnomalyEvent> anomalies_;
};

using Server = BasicServer<>;

}  // namespace pufcan
