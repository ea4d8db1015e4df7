#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "pufcan/bits.hpp"
#include "pufcan/canframe.hpp"
#include "pufcan/lwc/suite.hpp"
#include "pufcan/protocol/session_packet.hpp"

namespace pufcan {

using NodeId = std::uint16_t;

/// CAN carries no source address, so ownership of frames is inferred from ids.
struct FrameIdPlan {
  std::uint16_t auth_request_id = 0;  // node -> server
  std::uint16_t session_key_id = 0;   // server -> node

  friend bool operator==(const FrameIdPlan&, const FrameIdPlan&) = default;
};

inline constexpr std::uint16_t kAuthIdBase = 0x200;
inline constexpr std::uint16_t kSessionKeyIdBase = 0x400;
inline constexpr NodeId kMaxNodeId = 511;

inline FrameIdPlan default_frame_ids(NodeId id) {
  if (id > kMaxNodeId) throw Error(Errc::ConfigInvalid, "node id " + std::to_string(id) + " has no default frame ids");
  return {static_cast<std::uint16_t>(kAuthIdBase + id), static_cast<std::uint16_t>(kSessionKeyIdBase + id)};
}

struct NodeRecord {
  NodeId id = 0;
  Bytes node_public;
  Digest128 response_hash{};
  FrameIdPlan frame_ids;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

/// Server-side enrollment data. Nothing in here is secret. Records can only
/// be added while the database is open; importing yields a closed database.
class EnrollmentDb {
 public:
  EnrollmentDb() = default;
  EnrollmentDb(Bytes server_public, SessionMode mode, unsigned key_width)
      : server_public_(std::move(server_public)), mode_(mode), key_width_(key_width) {
    check_key_width(key_width);
  }

  const Bytes& server_public() const noexcept { return server_public_; }
  SessionMode mode() const noexcept { return mode_; }
  unsigned key_width() const noexcept { return key_width_; }
  bool open() const noexcept { return open_; }
  const std::map<NodeId, NodeRecord>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  void add(NodeRecord rec) {
    if (!open_) throw Error(Errc::EnrollmentClosed, "node " + std::to_string(rec.id));
    if (nodes_.contains(rec.id)) throw Error(Errc::DuplicateNodeId, "node " + std::to_string(rec.id));
    if (mode_ == SessionMode::Key80Bitmask && rec.id >= kMaskBits) {
      throw Error(Errc::ConfigInvalid, "bitmask mode supports node ids 0.." + std::to_string(kMaskBits - 1));
    }
    for (auto fid : {rec.frame_ids.auth_request_id, rec.frame_ids.session_key_id}) {
      if (fid > kMaxFrameId) throw Error(Errc::IdOutOfRange, "frame id " + std::to_string(fid));
      if (used_ids_.contains(fid)) throw Error(Errc::ConfigInvalid, "frame id " + std::to_string(fid) + " assigned twice");
    }
    if (rec.frame_ids.auth_request_id == rec.frame_ids.session_key_id) {
      throw Error(Errc::ConfigInvalid, "auth and session-key ids coincide");
    }
    used_ids_.insert(rec.frame_ids.auth_request_id);
    used_ids_.insert(rec.frame_ids.session_key_id);
    nodes_.emplace(rec.id, std::move(rec));
  }

  void close() noexcept { open_ = false; }

  const NodeRecord* find(NodeId id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  std::optional<NodeId> node_for_auth_id(std::uint16_t frame_id) const {
    for (const auto& [id, rec] : nodes_)
      if (rec.frame_ids.auth_request_id == frame_id) return id;
    return std::nullopt;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "pufcan-enrollment/1";
    j["session_mode"] = std::string(to_string(mode_));
    j["key_width"] = key_width_;
    j["server_public_key"] = to_hex(server_public_);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [id, rec] : nodes_) {
      nlohmann::ordered_json n;
      n["id"] = id;
      n["public_key"] = to_hex(rec.node_public);
      n["response_hash"] = to_hex(rec.response_hash);
      n["auth_frame_id"] = rec.frame_ids.auth_request_id;
      n["session_key_frame_id"] = rec.frame_ids.session_key_id;
      arr.push_back(std::move(n));
    }
    j["nodes"] = std::move(arr);
    return j;
  }

  static EnrollmentDb from_json(const nlohmann::json& j) {
    try {
      const auto mode = parse_session_mode(j.at("session_mode").get<std::string>());
      if (!mode) throw Error(Errc::ParseError, "unknown session_mode");
      EnrollmentDb db(from_hex(j.at("server_public_key").get<std::string>()), *mode,
                      j.at("key_width").get<unsigned>());
      for (const auto& n : j.at("nodes")) {
        NodeRecord rec;
        rec.id = n.at("id").get<NodeId>();
        rec.node_public = from_hex(n.at("public_key").get<std::string>());
        const auto h = from_hex(n.at("response_hash").get<std::string>());
        if (h.size() != rec.response_hash.size()) throw Error(Errc::ParseError, "response_hash must be 128 bits");
        std::copy(h.begin(), h.end(), rec.response_hash.begin());
        rec.frame_ids.auth_request_id = n.at("auth_frame_id").get<std::uint16_t>();
        rec.frame_ids.session_key_id = n.at("session_key_frame_id").get<std::uint16_t>();
        db.add(std::move(rec));
      }
      db.close();
      return db;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, e.what());
    } catch (const Error& e) {
      if (e.code() == Errc::ParseError) throw;
      throw Error(Errc::ParseError, e.what());
    }
  }

 private:
  Bytes server_public_;
  SessionMode mode_ = SessionMode::Key80Padded;
  unsigned key_width_ = 80;
  bool open_ = true;
  std::map<NodeId, NodeRecord> nodes_;
  std::set<std::uint16_t> used_ids_;
};

}  // namespace pufcan
