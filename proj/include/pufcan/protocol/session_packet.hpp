#pragma once

#include <bitset>
#include <optional>
#include <string_view>

#include "pufcan/bits.hpp"
#include "pufcan/lwc/block_key.hpp"

namespace pufcan {

inline constexpr std::size_t kMaskBits = 48;
using ValidMask = std::bitset<kMaskBits>;

/// 128-bit plaintext layouts for the session-key packet:
///   Key80Padded   key(80) | zeros(48)
///   Key80Bitmask  key(80) | mask(48), mask bit i set iff node i authenticated
///   Key128        key(128)
enum class SessionMode { Key80Padded, Key80Bitmask, Key128 };

constexpr unsigned session_key_width(SessionMode m) noexcept { return m == SessionMode::Key128 ? 128 : 80; }

constexpr std::string_view to_string(SessionMode m) noexcept {
  switch (m) {
    case SessionMode::Key80Padded: return "key80_padded";
    case SessionMode::Key80Bitmask: return "key80_bitmask";
    case SessionMode::Key128: return "key128";
  }
  return "?";
}

inline std::optional<SessionMode> parse_session_mode(std::string_view s) {
  for (auto m : {SessionMode::Key80Padded, SessionMode::Key80Bitmask, SessionMode::Key128})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct SessionKeyPacket {
  SessionMode mode = SessionMode::Key80Padded;
  BlockKey key;
  ValidMask valid_mask;  // meaningful in Key80Bitmask only

  friend bool operator==(const SessionKeyPacket&, const SessionKeyPacket&) = default;
};

inline Block128 encode_session_key_packet(const SessionKeyPacket& pkt) {
  if (pkt.key.width() != session_key_width(pkt.mode)) {
    throw Error(Errc::ModeKeyWidthMismatch, std::string(to_string(pkt.mode)) + " with a " +
                                                std::to_string(pkt.key.width()) + "-bit key");
  }
  Block128 out{};
  std::copy(pkt.key.bytes().begin(), pkt.key.bytes().end(), out.begin());
  if (pkt.mode == SessionMode::Key80Bitmask) {
    for (std::size_t i = 0; i < kMaskBits; ++i) set_bit(out, 80 + i, pkt.valid_mask[i]);
  }
  return out;
}

inline SessionKeyPacket decode_session_key_packet(const Block128& bits, SessionMode mode) {
  SessionKeyPacket pkt;
  pkt.mode = mode;
  const unsigned width = session_key_width(mode);
  pkt.key = BlockKey(std::span<const std::uint8_t>(bits.data(), width / 8), width);
  if (mode == SessionMode::Key80Padded) {
    for (std::size_t i = 80; i < 128; ++i) {
      if (get_bit(bits, i)) throw Error(Errc::NonzeroPadding, "bit " + std::to_string(i));
    }
  } else if (mode == SessionMode::Key80Bitmask) {
    for (std::size_t i = 0; i < kMaskBits; ++i) pkt.valid_mask[i] = get_bit(bits, 80 + i);
  }
  return pkt;
}

}  // namespace pufcan
