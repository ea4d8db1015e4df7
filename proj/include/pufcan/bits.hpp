#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pufcan/error.hpp"

namespace pufcan {

using Bytes = std::vector<std::uint8_t>;
using Block128 = std::array<std::uint8_t, 16>;

// Bits are numbered MSB-first: bit 0 is the top bit of byte 0.
inline bool get_bit(std::span<const std::uint8_t> bytes, std::size_t i) {
  return (bytes[i / 8] >> (7 - i % 8)) & 1u;
}

inline void set_bit(std::span<std::uint8_t> bytes, std::size_t i, bool v) {
  const auto mask = static_cast<std::uint8_t>(0x80u >> (i % 8));
  if (v) {
    bytes[i / 8] |= mask;
  } else {
    bytes[i / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

inline std::uint64_t load_be64(std::span<const std::uint8_t> b) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | b[i];
  return v;
}

inline void store_be64(std::uint64_t v, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < 8; ++i) out[7 - i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw Error(Errc::ParseError, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::ParseError, "bad hex digit in '" + std::string(hex) + "'");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

/// Packed, MSB-first bit string of arbitrary length. Unused tail bits are zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}
  BitString(Bytes bytes, std::size_t nbits) : bytes_(std::move(bytes)), nbits_(nbits) {
    bytes_.resize((nbits + 7) / 8, 0);
    clear_tail();
  }

  std::size_t size() const noexcept { return nbits_; }
  bool operator[](std::size_t i) const { return get_bit(bytes_, i); }
  void set(std::size_t i, bool v) { set_bit(bytes_, i, v); }
  void flip(std::size_t i) { set(i, !(*this)[i]); }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  void clear_tail() {
    if (nbits_ % 8 != 0) bytes_.back() &= static_cast<std::uint8_t>(0xFF00u >> (nbits_ % 8));
  }

  Bytes bytes_;
  std::size_t nbits_ = 0;
};

inline std::size_t hamming_distance(const BitString& a, const BitString& b) {
  std::size_t d = 0;
  const auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) d += a[i] != b[i];
  return d + (a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
}

}  // namespace pufcan
