#pragma once

#include <cstdint>

namespace hydra::sim {

// Simulated time in integer milliseconds since run start.
using SimTime = std::uint64_t;

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

constexpr SimTime msec(std::uint64_t ms) { return ms; }
constexpr SimTime sec(std::uint64_t s) { return s * 1000; }

}  // namespace hydra::sim
