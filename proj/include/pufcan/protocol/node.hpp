#pragma once

#include <array>
#include <optional>
#include <span>

#include "pufcan/canframe.hpp"
#include "pufcan/lwc/suite.hpp"
#include "pufcan/protocol/enrollment.hpp"
#include "pufcan/protocol/session_packet.hpp"
#include "pufcan/puf.hpp"

namespace pufcan {

enum class NodePhase { Idle, AwaitingSessionKey, Operational };

using Payload = std::array<std::uint8_t, 8>;
using FramePair = std::array<CanFrame, 2>;

inline FramePair frames_from_block(std::uint16_t id, const Block128& b) {
  return {CanFrame::make(id, std::span(b).first(8)), CanFrame::make(id, std::span(b).last(8))};
}

inline Block128 block_from_frames(std::span<const CanFrame> frames) {
  if (frames.size() != 2) throw Error(Errc::MalformedFrames, std::to_string(frames.size()) + " frames, expected 2");
  Block128 b{};
  for (std::size_t h = 0; h < 2; ++h) {
    if (frames[h].dlc != 8 || frames[h].data_len != 8) throw Error(Errc::MalformedFrames, "dlc != 8");
    std::copy_n(frames[h].data.begin(), 8, b.begin() + 8 * h);
  }
  return b;
}

/// One ECU. Keys are never persisted: the private scalar lives only for the
/// duration of begin_auth, and both symmetric keys are dropped on power_off.
template <CryptoSuite Suite = DefaultSuite>
class BasicNode {
 public:
  BasicNode(NodeId id, PufDevice puf) : BasicNode(id, std::move(puf), default_frame_ids(id)) {}
  BasicNode(NodeId id, PufDevice puf, FrameIdPlan ids) : id_(id), puf_(std::move(puf)), ids_(ids) {}

  NodeId id() const noexcept { return id_; }
  const FrameIdPlan& frame_ids() const noexcept { return ids_; }
  const PufDevice& puf() const noexcept { return puf_; }
  NodePhase phase() const noexcept { return phase_; }
  bool enrolled() const noexcept { return server_public_.has_value(); }

  const std::optional<BlockKey>& shared_key() const noexcept { return shared_key_; }
  const std::optional<BlockKey>& session_key() const noexcept { return session_key_; }
  const std::optional<ValidMask>& valid_mask() const noexcept { return valid_mask_; }

  /// Values handed to the server in the trusted enrollment environment.
  NodeRecord enrollment_record() const {
    const auto r = puf_.noise_free_response();
    NodeRecord rec;
    rec.id = id_;
    rec.node_public = Suite::keypair_from_response(r).public_key;
    rec.response_hash = Suite::hash128(r.bytes());
    rec.frame_ids = ids_;
    return rec;
  }

  void store_server_public(Bytes server_public) { server_public_ = std::move(server_public); }

  template <class Rng>
  FramePair begin_auth(unsigned width, Rng& noise) {
    if (!enrolled()) throw Error(Errc::NotEnrolled, "node " + std::to_string(id_));
    if (phase_ != NodePhase::Idle) throw Error(Errc::WrongPhase, "begin_auth outside Idle");
    check_key_width(width);
    const BitString response = puf_.generate_response(noise);
    const Digest128 response_hash = Suite::hash128(response.bytes());
    {
      const KeyPair kp = Suite::keypair_from_response(response);
      shared_key_ = derive_shared_key<Suite>(Suite::shared_secret(kp.private_scalar, *server_public_), width);
    }
    phase_ = NodePhase::AwaitingSessionKey;
    return frames_from_block(ids_.auth_request_id, encrypt_halves<Suite>(*shared_key_, response_hash));
  }

  void receive_session_key(std::span<const CanFrame> frames, SessionMode mode) {
    if (phase_ != NodePhase::AwaitingSessionKey) throw Error(Errc::WrongPhase, "no session key expected");
    const Block128 plain = decrypt_halves<Suite>(*shared_key_, block_from_frames(frames));
    const SessionKeyPacket pkt = decode_session_key_packet(plain, mode);
    session_key_ = pkt.key;
    if (mode == SessionMode::Key80Bitmask) valid_mask_ = pkt.valid_mask;
    phase_ = NodePhase::Operational;
  }

  /// Payloads must already be padded to 8 bytes by the application.
  CanFrame secure_send(std::uint16_t dest_id, std::span<const std::uint8_t> payload) const {
    if (phase_ != NodePhase::Operational) throw Error(Errc::NotOperational, "node " + std::to_string(id_));
    if (payload.size() != 8) throw Error(Errc::BadPayloadLength, std::to_string(payload.size()) + " bytes");
    Payload out{};
    store_be64(Suite::encrypt_block(*session_key_, load_be64(payload)), out);
    auto f = CanFrame::make(dest_id, out);
    require_valid(f);
    return f;
  }

  Payload secure_receive(const CanFrame& frame) const {
    if (phase_ != NodePhase::Operational) throw Error(Errc::NotOperational, "node " + std::to_string(id_));
    if (frame.dlc != 8 || frame.data_len != 8) throw Error(Errc::MalformedFrames, "dlc != 8");
    Payload out{};
    store_be64(Suite::decrypt_block(*session_key_, load_be64(frame.payload())), out);
    return out;
  }

  void power_off() noexcept {
    phase_ = NodePhase::Idle;
    shared_key_.reset();
    session_key_.reset();
    valid_mask_.reset();
  }

 private:
  NodeId id_;
  PufDevice puf_;
  FrameIdPlan ids_;
  std::optional<Bytes> server_public_;
  NodePhase phase_ = NodePhase::Idle;
  std::optional<BlockKey> shared_key_;
  std::optional<BlockKey> session_key_;
  std::optional<ValidMask> valid_mask_;
};

using Node = BasicNode<>;

}  // namespace pufcan
