#pragma once

// PHOTON-128/16/16: sponge over the 144-bit P144 permutation (6x6 grid of
// 4-bit cells), 16-bit rate in and out, 128-bit digest.

#include <array>
#include <cstdint>
#include <span>

#include "pufcan/lwc/present.hpp"

namespace pufcan::photon {

using Digest128 = std::array<std::uint8_t, 16>;

namespace detail {

inline constexpr unsigned kD = 6;
inline constexpr unsigned kRounds = 12;
inline constexpr std::array<std::uint8_t, kRounds> kRC = {1, 3, 7, 14, 13, 11, 6, 12, 9, 2, 5, 10};
inline constexpr std::array<std::uint8_t, kD> kIC = {0, 1, 3, 7, 6, 4};
inline constexpr std::array<std::uint8_t, kD> kSerial = {1, 2, 8, 5, 8, 2};

// GF(2^4) modulo x^4 + x + 1
constexpr std::uint8_t gf16_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t r = 0;
  for (int i = 0; i < 4; ++i) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & 0x10) a ^= 0x13;
  }
  return r;
}

using Matrix = std::array<std::array<std::uint8_t, kD>, kD>;

// MixColumnsSerial is Serial(z)^d; expand it once into a dense matrix.
constexpr Matrix mix_matrix() {
  Matrix a{};
  for (unsigned i = 0; i + 1 < kD; ++i) a[i][i + 1] = 1;
  a[kD - 1] = kSerial;
  Matrix m{};
  for (unsigned i = 0; i < kD; ++i) m[i][i] = 1;
  for (unsigned p = 0; p < kD; ++p) {
    Matrix next{};
    for (unsigned i = 0; i < kD; ++i)
      for (unsigned j = 0; j < kD; ++j) {
        std::uint8_t acc = 0;
        for (unsigned k = 0; k < kD; ++k) acc ^= gf16_mul(a[i][k], m[k][j]);
        next[i][j] = acc;
      }
    m = next;
  }
  return m;
}

inline constexpr Matrix kMix = mix_matrix();

using State = std::array<std::uint8_t, kD * kD>;  // row-major cells

inline void permute(State& s) {
  for (unsigned round = 0; round < kRounds; ++round) {
    for (unsigned i = 0; i < kD; ++i) s[i * kD] ^= kRC[round] ^ kIC[i];
    for (auto& c : s) c = present::detail::kSbox[c];
    State shifted;
    for (unsigned i = 0; i < kD; ++i)
      for (unsigned j = 0; j < kD; ++j) shifted[i * kD + j] = s[i * kD + (j + i) % kD];
    for (unsigned j = 0; j < kD; ++j)
      for (unsigned i = 0; i < kD; ++i) {
        std::uint8_t acc = 0;
        for (unsigned k = 0; k < kD; ++k) acc ^= gf16_mul(kMix[i][k], shifted[k * kD + j]);
        s[i * kD + j] = acc;
      }
  }
}

inline void absorb(State& s, std::uint8_t b0, std::uint8_t b1) {
  s[0] ^= b0 >> 4;
  s[1] ^= b0 & 0xF;
  s[2] ^= b1 >> 4;
  s[3] ^= b1 & 0xF;
  permute(s);
}

}  // namespace detail

inline Digest128 hash(std::span<const std::uint8_t> msg) {
  detail::State s{};
  // IV: trailing 24 bits hold n/4 = 32, r = 16, r' = 16
  constexpr std::array<std::uint8_t, 6> iv_tail = {2, 0, 1, 0, 1, 0};
  std::copy(iv_tail.begin(), iv_tail.end(), s.end() - 6);

  std::size_t i = 0;
  for (; i + 2 <= msg.size(); i += 2) detail::absorb(s, msg[i], msg[i + 1]);
  // pad with a single 1 bit then zeros up to the 16-bit rate
  if (i < msg.size()) {
    detail::absorb(s, msg[i], 0x80);
  } else {
    detail::absorb(s, 0x80, 0x00);
  }

  Digest128 out{};
  for (unsigned blk = 0; blk < 8; ++blk) {
    if (blk != 0) detail::permute(s);
    out[2 * blk] = static_cast<std::uint8_t>((s[0] << 4) | s[1]);
    out[2 * blk + 1] = static_cast<std::uint8_t>((s[2] << 4) | s[3]);
  }
  return out;
}

}  // namespace pufcan::photon
