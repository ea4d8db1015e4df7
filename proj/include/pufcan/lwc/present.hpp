#pragma once

// PRESENT: 64-bit block, 80- or 128-bit key, 31 rounds of
// addRoundKey / sBoxLayer / pLayer plus a final whitening key.

#include <array>
#include <cstdint>

#include "pufcan/lwc/block_key.hpp"

namespace pufcan::present {

namespace detail {

inline constexpr std::array<std::uint8_t, 16> kSbox = {0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
                                                       0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2};

constexpr std::array<std::uint8_t, 16> invert(const std::array<std::uint8_t, 16>& s) {
  std::array<std::uint8_t, 16> inv{};
  for (std::uint8_t i = 0; i < 16; ++i) inv[s[i]] = i;
  return inv;
}

inline constexpr auto kInvSbox = invert(kSbox);

// Byte-wise S-box tables: apply two nibble substitutions at once.
constexpr std::array<std::uint8_t, 256> byte_table(const std::array<std::uint8_t, 16>& s) {
  std::array<std::uint8_t, 256> t{};
  for (unsigned b = 0; b < 256; ++b) t[b] = static_cast<std::uint8_t>((s[b >> 4] << 4) | s[b & 0xF]);
  return t;
}

inline constexpr auto kSbox8 = byte_table(kSbox);
inline constexpr auto kInvSbox8 = byte_table(kInvSbox);

inline std::uint64_t sbox_layer(std::uint64_t s, const std::array<std::uint8_t, 256>& t) {
  std::uint64_t out = 0;
  for (unsigned i = 0; i < 8; ++i) out |= std::uint64_t{t[(s >> (8 * i)) & 0xFF]} << (8 * i);
  return out;
}

// Bit i moves to 16*i mod 63 (bit 63 is fixed).
constexpr std::array<std::array<std::uint64_t, 256>, 8> player_tables(bool inverse) {
  std::array<std::array<std::uint64_t, 256>, 8> t{};
  for (unsigned byte = 0; byte < 8; ++byte) {
    for (unsigned v = 0; v < 256; ++v) {
      std::uint64_t out = 0;
      for (unsigned b = 0; b < 8; ++b) {
        if (!((v >> b) & 1)) continue;
        const unsigned i = 8 * byte + b;
        const unsigned j = i == 63 ? 63 : (inverse ? (4 * i) % 63 : (16 * i) % 63);
        out |= std::uint64_t{1} << j;
      }
      t[byte][v] = out;
    }
  }
  return t;
}

inline constexpr auto kPLayer = player_tables(false);
inline constexpr auto kInvPLayer = player_tables(true);

inline std::uint64_t permute(std::uint64_t s, const std::array<std::array<std::uint64_t, 256>, 8>& t) {
  std::uint64_t out = 0;
  for (unsigned i = 0; i < 8; ++i) out |= t[i][(s >> (8 * i)) & 0xFF];
  return out;
}

}  // namespace detail

inline constexpr unsigned kRounds = 31;

/// Expanded key schedule; encrypt/decrypt are const and reentrant.
class Cipher {
 public:
  explicit Cipher(const BlockKey& key) {
    check_key_width(key.width());
    const auto kb = key.bytes();
    // key register as (hi: top 64 bits, lo: remaining 16 or 64 bits)
    std::uint64_t hi = load_be64(kb);
    std::uint64_t lo = 0;
    for (std::size_t i = 8; i < kb.size(); ++i) lo = (lo << 8) | kb[i];

    for (unsigned r = 1; r <= kRounds + 1; ++r) {
      round_keys_[r - 1] = hi;
      if (r == kRounds + 1) break;
      if (key.width() == 80) {
        // rotate the 80-bit register left by 61 == right by 19
        const std::uint64_t nhi = (hi >> 19) | ((lo & 0xFFFF) << 45) | (hi << 61);
        const std::uint64_t nlo = (hi >> 3) & 0xFFFF;
        hi = nhi;
        lo = nlo;
        hi = (hi & 0x0FFFFFFFFFFFFFFFull) | (std::uint64_t{detail::kSbox[hi >> 60]} << 60);
        // round counter into register bits 19..15
        hi ^= std::uint64_t{r} >> 1;
        lo ^= (std::uint64_t{r} & 1) << 15;
      } else {
        const std::uint64_t nhi = (hi << 61) | (lo >> 3);
        const std::uint64_t nlo = (lo << 61) | (hi >> 3);
        hi = nhi;
        lo = nlo;
        hi = (hi & 0x00FFFFFFFFFFFFFFull) | (std::uint64_t{detail::kSbox8[hi >> 56]} << 56);
        // round counter into register bits 66..62
        hi ^= std::uint64_t{r} >> 2;
        lo ^= (std::uint64_t{r} & 3) << 62;
      }
    }
  }

  std::uint64_t encrypt(std::uint64_t block) const noexcept {
    std::uint64_t s = block;
    for (unsigned i = 0; i < kRounds; ++i) {
      s ^= round_keys_[i];
      s = detail::sbox_layer(s, detail::kSbox8);
      s = detail::permute(s, detail::kPLayer);
    }
    return s ^ round_keys_[kRounds];
  }

  std::uint64_t decrypt(std::uint64_t block) const noexcept {
    std::uint64_t s = block ^ round_keys_[kRounds];
    for (unsigned i = kRounds; i-- > 0;) {
      s = detail::permute(s, detail::kInvPLayer);
      s = detail::sbox_layer(s, detail::kInvSbox8);
      s ^= round_keys_[i];
    }
    return s;
  }

 private:
  std::array<std::uint64_t, kRounds + 1> round_keys_{};
};

}  // namespace pufcan::present
