#pragma once

// Key agreement backend: X25519 from libsodium (128-bit security level).
// The response bits are mapped to a scalar with the standard RFC 7748 clamp.

#include <sodium.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pufcan/bits.hpp"
#include "pufcan/error.hpp"

namespace pufcan {

namespace detail {
inline void ensure_sodium() {
  static const bool ok = [] { return sodium_init() >= 0; }();
  if (!ok) throw std::runtime_error("libsodium failed to initialize");
}
}  // namespace detail

using SharedSecret = std::array<std::uint8_t, 32>;

struct KeyPair {
  std::array<std::uint8_t, 32> private_scalar{};
  Bytes public_key;
};

struct X25519 {
  static constexpr std::size_t kSeedBits = 256;
  static constexpr std::size_t kMinResponseBits = 128;
  static constexpr std::size_t kPublicKeyBytes = crypto_scalarmult_BYTES;

  /// Responses shorter than 256 bits are zero-extended before clamping.
  static KeyPair keypair_from_response(const BitString& response) {
    detail::ensure_sodium();
    if (response.size() < kMinResponseBits) {
      throw Error(Errc::ResponseTooShort, std::to_string(response.size()) + " bits");
    }
    KeyPair kp;
    const auto rb = response.bytes();
    const std::size_t n = std::min<std::size_t>(rb.size(), 32);
    std::copy_n(rb.begin(), n, kp.private_scalar.begin());
    if (response.size() < kSeedBits && response.size() % 8 != 0) {
      kp.private_scalar[response.size() / 8] &= static_cast<std::uint8_t>(0xFF00u >> (response.size() % 8));
    }
    kp.private_scalar[0] &= 248;
    kp.private_scalar[31] &= 127;
    kp.private_scalar[31] |= 64;
    kp.public_key.resize(kPublicKeyBytes);
    if (crypto_scalarmult_base(kp.public_key.data(), kp.private_scalar.data()) != 0) {
      throw Error(Errc::InvalidPublicKey, "base-point multiplication failed");
    }
    return kp;
  }

  static SharedSecret shared_secret(std::span<const std::uint8_t, 32> mine,
                                    std::span<const std::uint8_t> theirs) {
    detail::ensure_sodium();
    if (theirs.size() != kPublicKeyBytes) {
      throw Error(Errc::InvalidPublicKey, std::to_string(theirs.size()) + "-byte public key");
    }
    SharedSecret ss{};
    // fails for small-order points (all-zero result)
    if (crypto_scalarmult(ss.data(), mine.data(), theirs.data()) != 0) {
      throw Error(Errc::InvalidPublicKey, "small-order public key");
    }
    return ss;
  }
};

}  // namespace pufcan
