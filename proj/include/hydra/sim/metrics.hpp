#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "hydra/sim/time.hpp"

namespace hydra::sim {

// Collects line-delimited JSON records {"time":..,"node":..,"metric":..,
// "value":..}. The in-memory stream is what the determinism criteria
// compare byte for byte.
class MetricsSink {
 public:
  void emit(SimTime t, NodeId node, std::string_view metric, double value);
  void emit(SimTime t, NodeId node, std::string_view metric,
            std::string_view value);

  void attach(std::ostream* out) { out_ = out; }
  void set_enabled(bool on) { enabled_ = on; }

  const std::string& stream() const { return stream_; }
  std::size_t line_count() const { return lines_; }
  void clear();

 private:
  void push(std::string line);

  std::string stream_;
  std::size_t lines_ = 0;
  std::ostream* out_ = nullptr;
  bool enabled_ = true;
};

}  // namespace hydra::sim
