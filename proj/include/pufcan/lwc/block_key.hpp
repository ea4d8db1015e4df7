#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "pufcan/bits.hpp"
#include "pufcan/error.hpp"

namespace pufcan {

/// Symmetric key of 80 or 128 bits, stored MSB-first in the leading bytes.
class BlockKey {
 public:
  BlockKey() = default;

  BlockKey(std::span<const std::uint8_t> bytes, unsigned width) : width_(width) {
    if (width != 80 && width != 128) throw Error(Errc::BadKeyWidth, std::to_string(width) + " bits");
    if (bytes.size() != width / 8) {
      throw Error(Errc::BadKeyWidth, std::to_string(bytes.size()) + " bytes for a " +
                                         std::to_string(width) + "-bit key");
    }
    std::copy(bytes.begin(), bytes.end(), bytes_.begin());
  }

  unsigned width() const noexcept { return width_; }
  std::span<const std::uint8_t> bytes() const noexcept { return {bytes_.data(), width_ / 8}; }
  bool empty() const noexcept { return width_ == 0; }

  friend bool operator==(const BlockKey&, const BlockKey&) = default;

 private:
  std::array<std::uint8_t, 16> bytes_{};
  unsigned width_ = 0;
};

inline void check_key_width(unsigned width) {
  if (width != 80 && width != 128) throw Error(Errc::BadKeyWidth, std::to_string(width) + " bits");
}

}  // namespace pufcan
