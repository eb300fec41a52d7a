#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <string>

#include "hydra/util/sha256.hpp"

namespace hydra::dht {

inline constexpr int kIdBits = 256;

// 256-bit peer identity. Word 0 holds the most significant 64 bits, so
// lexicographic word comparison equals numeric comparison.
struct PeerId {
  std::array<std::uint64_t, 4> words{};

  friend PeerId operator^(const PeerId& a, const PeerId& b) {
    PeerId r;
    for (int i = 0; i < 4; ++i) r.words[i] = a.words[i] ^ b.words[i];
    return r;
  }
  auto operator<=>(const PeerId&) const = default;

  bool is_zero() const {
    return (words[0] | words[1] | words[2] | words[3]) == 0;
  }

  static PeerId from_low_bits(std::uint64_t low) {
    PeerId id;
    id.words[3] = low;
    return id;
  }
  static PeerId from_digest(const util::Sha256Digest& d);
  static PeerId random(std::mt19937_64& rng);

  std::string to_hex() const;
  std::string short_hex() const;  // first 8 hex chars, for logs/group ids
};

// a XOR b: the Kademlia closeness metric.
inline PeerId xor_distance(const PeerId& a, const PeerId& b) { return a ^ b; }

// Index of the first set bit from the MSB (MSB = 0, LSB = 255).
// Zero distance has no bucket: throws.
int bucket_index(const PeerId& distance);

}  // namespace hydra::dht
