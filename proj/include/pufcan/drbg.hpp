#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "pufcan/lwc/x25519.hpp"

namespace pufcan {

/// Seeded ChaCha20 keystream. Every random choice in a simulation comes from
/// one of these, keyed by BLAKE2b(label || seed), so runs are reproducible.
class Drbg {
 public:
  using result_type = std::uint64_t;

  Drbg(std::uint64_t seed, std::string_view label) {
    detail::ensure_sodium();
    crypto_generichash_state st;
    crypto_generichash_init(&st, nullptr, 0, key_.size());
    crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
    std::array<std::uint8_t, 8> s{};
    for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    crypto_generichash_update(&st, s.data(), s.size());
    crypto_generichash_final(&st, key_.data(), key_.size());
  }

  explicit Drbg(const std::array<std::uint8_t, 32>& key) : key_(key) { detail::ensure_sodium(); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::array<std::uint8_t, 8> b{};
    fill(b);
    result_type v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
  }

  void fill(std::span<std::uint8_t> out) {
    for (auto& b : out) {
      if (pos_ == buf_.size()) refill();
      b = buf_[pos_++];
    }
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  void refill() {
    static constexpr std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
    buf_.fill(0);
    crypto_stream_chacha20_xor_ic(buf_.data(), buf_.data(), buf_.size(), nonce.data(), block_++,
                                  key_.data());
    pos_ = 0;
  }

  std::array<std::uint8_t, 32> key_{};
  std::array<std::uint8_t, 64> buf_{};
  std::size_t pos_ = 64;
  std::uint64_t block_ = 0;
};

}  // namespace pufcan
