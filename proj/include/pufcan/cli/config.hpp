#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "pufcan/bus.hpp"
#include "pufcan/canframe.hpp"
#include "pufcan/protocol/enrollment.hpp"
#include "pufcan/protocol/session_packet.hpp"
#include "pufcan/puf.hpp"

namespace pufcan::cli {

struct AttackConfig {
  AttackStrategy strategy = AttackStrategy::Eavesdrop;
  std::int64_t flood_window_us = 10'000;
  std::uint16_t flood_id = 0;
  std::uint16_t app_frame_id = 0x600;  // victim traffic
  unsigned messages = 4;
};

struct ScenarioConfig {
  unsigned n_ecus = 5;
  unsigned key_width = 80;
  SessionMode session_mode = SessionMode::Key80Padded;
  BusSpeed speed = BusSpeed::High;
  FrameKind frame_kind = FrameKind::Standard;
  std::uint64_t master_seed = 1;
  std::int64_t timeout_ms = 100;
  std::size_t response_bits = PufDevice::kDefaultResponseBits;
  std::map<NodeId, double> noise;  // per-node PUF noise rate, default 0
  std::optional<AttackConfig> attack;

  Micros timeout() const { return Micros{timeout_ms * 1000}; }
};

inline void validate(const ScenarioConfig& c) {
  auto bad = [](const std::string& what) { throw Error(Errc::ConfigInvalid, what); };
  if (c.n_ecus == 0) bad("n_ecus must be at least 1");
  if (c.n_ecus > kMaxNodeId + 1) bad("n_ecus exceeds " + std::to_string(kMaxNodeId + 1));
  if (c.session_mode == SessionMode::Key80Bitmask && c.n_ecus > kMaskBits) {
    bad("bitmask mode supports at most " + std::to_string(kMaskBits) + " ECUs");
  }
  if (c.key_width != 80 && c.key_width != 128) bad("key_width must be 80 or 128");
  if (c.timeout_ms <= 0) bad("timeout_ms must be positive");
  if (c.response_bits < PufDevice::kMinResponseBits) bad("response_bits must be at least 128");
  for (const auto& [id, rate] : c.noise) {
    if (id >= c.n_ecus) bad("faulty node id " + std::to_string(id) + " out of range");
    if (!(rate >= 0.0 && rate <= 1.0)) bad("noise_rate must lie in [0, 1]");
  }
  if (c.attack) {
    if (c.attack->flood_window_us <= 0) bad("flood_window_us must be positive");
    if (c.attack->flood_id > kMaxFrameId || c.attack->app_frame_id > kMaxFrameId) bad("attack frame id out of range");
    if (c.attack->messages == 0) bad("attack.messages must be positive");
  }
}

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  try {
    if (!j.is_object()) throw Error(Errc::ConfigInvalid, "config must be a JSON object");
    c.n_ecus = j.value("n_ecus", c.n_ecus);
    c.key_width = j.value("key_width", c.key_width);
    if (j.contains("session_mode")) {
      auto m = parse_session_mode(j["session_mode"].get<std::string>());
      if (!m) throw Error(Errc::ConfigInvalid, "unknown session_mode");
      c.session_mode = *m;
    }
    if (j.contains("speed")) {
      const auto s = j["speed"].get<std::string>();
      if (s == "high") c.speed = BusSpeed::High;
      else if (s == "low") c.speed = BusSpeed::Low;
      else throw Error(Errc::ConfigInvalid, "speed must be high or low");
    }
    if (j.contains("frame_kind")) {
      const auto k = j["frame_kind"].get<std::string>();
      if (k == "standard") c.frame_kind = FrameKind::Standard;
      else if (k == "extended") c.frame_kind = FrameKind::Extended;
      else throw Error(Errc::ConfigInvalid, "frame_kind must be standard or extended");
    }
    c.master_seed = j.value("master_seed", c.master_seed);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    c.response_bits = j.value("response_bits", c.response_bits);
    if (j.contains("faulty_nodes")) {
      for (const auto& f : j["faulty_nodes"]) c.noise[f.at("id").get<NodeId>()] = f.value("noise_rate", 1.0);
    }
    if (j.contains("attack")) {
      const auto& a = j["attack"];
      AttackConfig ac;
      const auto name = a.at("strategy").get<std::string>();
      auto s = parse_attack_strategy(name);
      if (!s) throw Error(Errc::UnknownStrategy, name);
      ac.strategy = *s;
      ac.flood_window_us = a.value("flood_window_us", ac.flood_window_us);
      ac.flood_id = a.value("flood_id", ac.flood_id);
      ac.app_frame_id = a.value("app_frame_id", ac.app_frame_id);
      ac.messages = a.value("messages", ac.messages);
      c.attack = ac;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  validate(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigInvalid, "cannot read config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  return config_from_json(j);
}

}  // namespace pufcan::cli
