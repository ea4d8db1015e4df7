#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <span>

#include "pufcan/bits.hpp"
#include "pufcan/lwc/block_key.hpp"
#include "pufcan/lwc/photon.hpp"
#include "pufcan/lwc/present.hpp"
#include "pufcan/lwc/x25519.hpp"

namespace pufcan {

using Digest128 = std::array<std::uint8_t, 16>;

// A crypto suite bundles the three primitives the framework needs: a 64-bit
// block cipher, a 128-bit hash and a key agreement over PUF-derived keys.
template <class S>
concept CryptoSuite = requires(const BlockKey& k, std::uint64_t b, std::span<const std::uint8_t> msg,
                               const BitString& r, std::span<const std::uint8_t, 32> priv) {
  { S::encrypt_block(k, b) } -> std::same_as<std::uint64_t>;
  { S::decrypt_block(k, b) } -> std::same_as<std::uint64_t>;
  { S::hash128(msg) } -> std::same_as<Digest128>;
  { S::keypair_from_response(r) } -> std::same_as<KeyPair>;
  { S::shared_secret(priv, msg) } -> std::same_as<SharedSecret>;
};

struct DefaultSuite {
  static std::uint64_t encrypt_block(const BlockKey& key, std::uint64_t block) {
    return present::Cipher(key).encrypt(block);
  }
  static std::uint64_t decrypt_block(const BlockKey& key, std::uint64_t block) {
    return present::Cipher(key).decrypt(block);
  }
  static Digest128 hash128(std::span<const std::uint8_t> msg) { return photon::hash(msg); }
  static KeyPair keypair_from_response(const BitString& r) { return X25519::keypair_from_response(r); }
  static SharedSecret shared_secret(std::span<const std::uint8_t, 32> mine,
                                    std::span<const std::uint8_t> theirs) {
    return X25519::shared_secret(mine, theirs);
  }
};

static_assert(CryptoSuite<DefaultSuite>);

inline std::uint64_t encrypt_block(const BlockKey& key, std::uint64_t block) {
  return DefaultSuite::encrypt_block(key, block);
}
inline std::uint64_t decrypt_block(const BlockKey& key, std::uint64_t block) {
  return DefaultSuite::decrypt_block(key, block);
}
inline Digest128 hash128(std::span<const std::uint8_t> msg) { return DefaultSuite::hash128(msg); }
inline KeyPair keypair_from_response(const BitString& r) { return DefaultSuite::keypair_from_response(r); }
inline SharedSecret shared_secret(std::span<const std::uint8_t, 32> mine, std::span<const std::uint8_t> theirs) {
  return DefaultSuite::shared_secret(mine, theirs);
}

/// Leftmost `width` bits of hash128(ss).
template <CryptoSuite Suite = DefaultSuite>
BlockKey derive_shared_key(const SharedSecret& ss, unsigned width) {
  check_key_width(width);
  const Digest128 d = Suite::hash128(ss);
  return BlockKey(std::span<const std::uint8_t>(d.data(), width / 8), width);
}

// 128-bit payloads travel as two independently encrypted 64-bit halves, one
// per frame; there is no IV, so equal halves give equal ciphertexts.
template <CryptoSuite Suite = DefaultSuite>
Block128 encrypt_halves(const BlockKey& key, const Block128& plain) {
  Block128 out{};
  for (std::size_t h = 0; h < 2; ++h) {
    const auto c = Suite::encrypt_block(key, load_be64(std::span(plain).subspan(8 * h, 8)));
    store_be64(c, std::span(out).subspan(8 * h, 8));
  }
  return out;
}

template <CryptoSuite Suite = DefaultSuite>
Block128 decrypt_halves(const BlockKey& key, const Block128& cipher) {
  Block128 out{};
  for (std::size_t h = 0; h < 2; ++h) {
    const auto p = Suite::decrypt_block(key, load_be64(std::span(cipher).subspan(8 * h, 8)));
    store_be64(p, std::span(out).subspan(8 * h, 8));
  }
  return out;
}

}  // namespace pufcan
