#pragma once

#include <cstddef>
#include <vector>

#include "hydra/sim/time.hpp"

namespace hydra::sim {

// Pairwise base latency matrix plus a symmetric jitter fraction.
// Delivery latency is base[i][j] * (1 + U(-jitter, +jitter)).
struct LatencyModel {
  std::vector<std::vector<double>> base_ms;
  double jitter_fraction = 0.0;

  static LatencyModel uniform(std::size_t n, double ms);

  // base must be square, symmetric, zero-diagonal, finite and
  // non-negative; jitter_fraction in [0, 1).
  void validate() const;

  double max_base() const;
  std::size_t size() const { return base_ms.size(); }
};

}  // namespace hydra::sim
