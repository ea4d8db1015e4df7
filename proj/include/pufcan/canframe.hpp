#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pufcan/error.hpp"

namespace pufcan {

using Micros = std::chrono::microseconds;

inline constexpr std::uint16_t kMaxFrameId = 2047;
inline constexpr std::size_t kMaxDlc = 8;

/// Wire length is a simulation-wide setting, so it lives outside CanFrame.
enum class FrameKind { Standard, Extended };

enum class BusSpeed { High, Low };

constexpr std::uint32_t bitrate(BusSpeed s) noexcept {
  return s == BusSpeed::High ? 1'000'000u : 125'000u;
}

/// Bits on the wire per frame including inter-frame spacing. The standard
/// figure is 112 rather than 108 + 3 so the overhead tables reproduce.
struct WireTiming {
  static constexpr std::uint32_t effective_bits_standard = 112;
  static constexpr std::uint32_t effective_bits_extended = 131;

  static constexpr std::uint32_t effective_bits(FrameKind k) noexcept {
    return k == FrameKind::Standard ? effective_bits_standard : effective_bits_extended;
  }
};

/// Both bitrates divide 10^6 evenly, so wire times are exact integers.
constexpr Micros frame_wire_time(FrameKind kind, BusSpeed speed) noexcept {
  return Micros{static_cast<std::int64_t>(WireTiming::effective_bits(kind)) * 1'000'000 /
                bitrate(speed)};
}

struct CanFrame {
  std::uint16_t id = 0;
  std::uint8_t dlc = 0;
  std::array<std::uint8_t, kMaxDlc> data{};
  // length actually carried; kept separately so that invalid frames
  // (length != dlc) can be represented and rejected.
  std::uint8_t data_len = 0;

  std::span<const std::uint8_t> payload() const noexcept {
    return {data.data(), std::min<std::size_t>(data_len, kMaxDlc)};
  }

  static CanFrame make(std::uint16_t id, std::span<const std::uint8_t> bytes) {
    CanFrame f;
    f.id = id;
    if (bytes.size() > kMaxDlc) throw Error(Errc::DlcOutOfRange, "payload of " + std::to_string(bytes.size()) + " bytes");
    f.dlc = static_cast<std::uint8_t>(bytes.size());
    f.data_len = f.dlc;
    std::copy(bytes.begin(), bytes.end(), f.data.begin());
    return f;
  }

  friend bool operator==(const CanFrame& a, const CanFrame& b) noexcept {
    return a.id == b.id && a.dlc == b.dlc && a.data_len == b.data_len &&
           std::equal(a.payload().begin(), a.payload().end(), b.payload().begin());
  }
};

/// Returns the first violated field, or nullopt for a well-formed frame.
constexpr std::optional<Errc> validate_frame(const CanFrame& f) noexcept {
  if (f.id > kMaxFrameId) return Errc::IdOutOfRange;
  if (f.dlc > kMaxDlc) return Errc::DlcOutOfRange;
  if (f.data_len != f.dlc) return Errc::DataLengthMismatch;
  return std::nullopt;
}

inline void require_valid(const CanFrame& f) {
  if (auto e = validate_frame(f)) throw Error(Errc::InvalidFrame, std::string(to_string(*e)));
}

constexpr std::string_view to_string(FrameKind k) noexcept {
  return k == FrameKind::Standard ? "standard" : "extended";
}

constexpr std::string_view to_string(BusSpeed s) noexcept {
  return s == BusSpeed::High ? "high" : "low";
}

}  // namespace pufcan
