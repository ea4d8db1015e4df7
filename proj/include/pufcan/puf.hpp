#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "pufcan/bits.hpp"
#include "pufcan/drbg.hpp"
#include "pufcan/lwc/suite.hpp"

namespace pufcan {

using DeviceSeed = std::array<std::uint8_t, 32>;

/// Weak PUF with one implicit challenge. The response is the ChaCha20
/// keystream of the device seed (the stand-in for silicon variation); noise
/// flips each bit independently with probability noise_rate.
class PufDevice {
 public:
  static constexpr std::size_t kDefaultResponseBits = 256;
  static constexpr std::size_t kMinResponseBits = 128;

  explicit PufDevice(const DeviceSeed& seed, std::size_t response_len = kDefaultResponseBits,
                     double noise_rate = 0.0)
      : seed_(seed), response_len_(response_len), noise_rate_(noise_rate) {
    if (response_len < kMinResponseBits) {
      throw Error(Errc::ResponseTooShort, "PUF response of " + std::to_string(response_len) + " bits");
    }
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
      throw std::invalid_argument("noise_rate must lie in [0, 1]");
    }
  }

  const DeviceSeed& seed() const noexcept { return seed_; }
  std::size_t response_len() const noexcept { return response_len_; }
  double noise_rate() const noexcept { return noise_rate_; }

  BitString noise_free_response() const {
    detail::ensure_sodium();
    static constexpr std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
    Bytes raw((response_len_ + 7) / 8);
    crypto_stream_chacha20(raw.data(), raw.size(), nonce.data(), seed_.data());
    return BitString(std::move(raw), response_len_);
  }

  template <class Rng>
  BitString generate_response(Rng& noise) const {
    BitString r = noise_free_response();
    if (noise_rate_ == 0.0) return r;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (uniform01(noise) < noise_rate_ || noise_rate_ == 1.0) r.flip(i);
    }
    return r;
  }

  template <CryptoSuite Suite = DefaultSuite, class Rng>
  Digest128 response_hash(Rng& noise) const {
    const auto r = generate_response(noise);
    return Suite::hash128(r.bytes());
  }

 private:
  template <class Rng>
  static double uniform01(Rng& g) {
    static_assert(std::is_same_v<typename Rng::result_type, std::uint64_t>, "64-bit generator required");
    return static_cast<double>(static_cast<std::uint64_t>(g()) >> 11) * 0x1.0p-53;
  }

  DeviceSeed seed_;
  std::size_t response_len_;
  double noise_rate_;
};

}  // namespace pufcan
