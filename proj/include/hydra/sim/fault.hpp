#pragma once

#include <vector>

#include "hydra/sim/time.hpp"

namespace hydra::sim {

struct FaultAction {
  enum class Kind { crash, restart, partition, heal };
  Kind kind;
  NodeId node = kNoNode;          // crash / restart
  std::vector<NodeId> side_a;     // partition
  std::vector<NodeId> side_b;
};

struct FaultEntry {
  SimTime time = 0;
  FaultAction action;
};

// Entries must be sorted by time; partition sides must be disjoint and
// must not name immune nodes.
struct FaultSchedule {
  std::vector<FaultEntry> entries;

  void validate(std::size_t node_count,
                const std::vector<NodeId>& immune_nodes) const;
};

}  // namespace hydra::sim
