#pragma once

#include <optional>
#include <vector>

#include "hydra/dht/peer_id.hpp"
#include "hydra/sim/time.hpp"

namespace hydra::dht {

struct TableEntry {
  PeerId peer;
  sim::NodeId address = sim::kNoNode;
};

enum class InsertOutcome { accepted, replaced, rejected, self };

// Kademlia-style bucket table: 256 insertion-ordered lists of capacity M,
// entry for bucket i satisfies bucket_index(owner ^ peer) == i.
//
// Insertion into a full bucket requires a liveness probe of the occupants,
// which is asynchronous in the simulation: try_insert reports the occupants
// to heartbeat and finish_insert applies the outcome.
class RoutingTable {
 public:
  explicit RoutingTable(PeerId owner, int bucket_capacity = 20);

  const PeerId& owner() const { return owner_; }
  int capacity() const { return capacity_; }

  struct InsertDecision {
    InsertOutcome outcome = InsertOutcome::accepted;
    bool needs_probe = false;
    std::vector<TableEntry> occupants;
  };
  InsertDecision try_insert(const TableEntry& entry);

  // Replaces the first occupant (insertion order) named in `offline`;
  // keeps the bucket unchanged when every occupant is alive.
  InsertOutcome finish_insert(const TableEntry& entry,
                              const std::vector<PeerId>& offline);

  std::optional<sim::NodeId> lookup(const PeerId& target) const;

  // Up to k entries sorted by ascending xor distance to target, ties by
  // ascending peer id.
  std::vector<TableEntry> k_closest(const PeerId& target, std::size_t k) const;

  bool erase(const PeerId& peer);
  void clear();
  std::size_t size() const;
  const std::vector<TableEntry>& bucket(int index) const {
    return buckets_[index];
  }

  // Verifies the bucket-placement invariant, capacity and uniqueness;
  // throws on any violation.
  void audit() const;

 private:
  std::vector<TableEntry>* bucket_for(const PeerId& peer);

  PeerId owner_;
  int capacity_;
  std::vector<std::vector<TableEntry>> buckets_;
};

void sort_by_distance(std::vector<TableEntry>& entries, const PeerId& target);

}  // namespace hydra::dht
