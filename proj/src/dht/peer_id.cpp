#include "hydra/dht/peer_id.hpp"

#include <bit>
#include <stdexcept>

namespace hydra::dht {

PeerId PeerId::from_digest(const util::Sha256Digest& d) {
  PeerId id;
  for (int w = 0; w < 4; ++w) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v = (v << 8) | d[w * 8 + b];
    id.words[w] = v;
  }
  return id;
}

PeerId PeerId::random(std::mt19937_64& rng) {
  PeerId id;
  for (auto& w : id.words) w = rng();
  return id;
}

std::string PeerId::to_hex() const {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (std::uint64_t w : words)
    for (int shift = 60; shift >= 0; shift -= 4)
      s.push_back(hex[(w >> shift) & 0xf]);
  return s;
}

std::string PeerId::short_hex() const { return to_hex().substr(0, 8); }

int bucket_index(const PeerId& distance) {
  for (int w = 0; w < 4; ++w) {
    if (distance.words[w] != 0)
      return w * 64 + std::countl_zero(distance.words[w]);
  }
  throw std::invalid_argument("self-distance has no bucket");
}

}  // namespace hydra::dht
