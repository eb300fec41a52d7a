#include "hydra/dht/routing_table.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hydra::dht {

RoutingTable::RoutingTable(PeerId owner, int bucket_capacity)
    : owner_(owner), capacity_(bucket_capacity), buckets_(kIdBits) {
  if (bucket_capacity < 1)
    throw std::invalid_argument("bucket capacity must be >= 1");
}

std::vector<TableEntry>* RoutingTable::bucket_for(const PeerId& peer) {
  if (peer == owner_) return nullptr;
  return &buckets_[bucket_index(owner_ ^ peer)];
}

RoutingTable::InsertDecision RoutingTable::try_insert(const TableEntry& entry) {
  InsertDecision d;
  auto* bucket = bucket_for(entry.peer);
  if (bucket == nullptr) {
    d.outcome = InsertOutcome::self;
    return d;
  }
  for (auto& e : *bucket) {
    if (e.peer == entry.peer) {
      e.address = entry.address;
      d.outcome = InsertOutcome::accepted;
      return d;
    }
  }
  if (bucket->size() < static_cast<std::size_t>(capacity_)) {
    bucket->push_back(entry);
    d.outcome = InsertOutcome::accepted;
    return d;
  }
  d.needs_probe = true;
  d.occupants = *bucket;
  return d;
}

InsertOutcome RoutingTable::finish_insert(const TableEntry& entry,
                                          const std::vector<PeerId>& offline) {
  auto* bucket = bucket_for(entry.peer);
  if (bucket == nullptr) return InsertOutcome::self;
  for (auto& e : *bucket) {
    if (e.peer == entry.peer) {
      e.address = entry.address;
      return InsertOutcome::accepted;
    }
  }
  if (bucket->size() < static_cast<std::size_t>(capacity_)) {
    bucket->push_back(entry);
    return InsertOutcome::accepted;
  }
  for (auto& e : *bucket) {
    if (std::find(offline.begin(), offline.end(), e.peer) != offline.end()) {
      e = entry;
      return InsertOutcome::replaced;
    }
  }
  return InsertOutcome::rejected;
}

std::optional<sim::NodeId> RoutingTable::lookup(const PeerId& target) const {
  if (target == owner_) return std::nullopt;
  const auto& bucket = buckets_[bucket_index(owner_ ^ target)];
  for (const auto& e : bucket)
    if (e.peer == target) return e.address;
  return std::nullopt;
}

void sort_by_distance(std::vector<TableEntry>& entries, const PeerId& target) {
  std::sort(entries.begin(), entries.end(),
            [&](const TableEntry& a, const TableEntry& b) {
              const PeerId da = a.peer ^ target;
              const PeerId db = b.peer ^ target;
              if (da != db) return da < db;
              return a.peer < b.peer;
            });
}

std::vector<TableEntry> RoutingTable::k_closest(const PeerId& target,
                                                std::size_t k) const {
  std::vector<TableEntry> all;
  for (const auto& bucket : buckets_)
    all.insert(all.end(), bucket.begin(), bucket.end());
  sort_by_distance(all, target);
  if (all.size() > k) all.resize(k);
  return all;
}

bool RoutingTable::erase(const PeerId& peer) {
  if (peer == owner_) return false;
  auto& bucket = buckets_[bucket_index(owner_ ^ peer)];
  for (auto it = bucket.begin(); it != bucket.end(); ++it) {
    if (it->peer == peer) {
      bucket.erase(it);
      return true;
    }
  }
  return false;
}

void RoutingTable::clear() {
  for (auto& b : buckets_) b.clear();
}

std::size_t RoutingTable::size() const {
  std::size_t n = 0;
  for (const auto& b : buckets_) n += b.size();
  return n;
}

void RoutingTable::audit() const {
  std::set<PeerId> seen;
  for (int i = 0; i < kIdBits; ++i) {
    if (buckets_[i].size() > static_cast<std::size_t>(capacity_))
      throw std::logic_error("bucket over capacity");
    for (const auto& e : buckets_[i]) {
      if (e.peer == owner_) throw std::logic_error("owner stored in own table");
      if (bucket_index(owner_ ^ e.peer) != i)
        throw std::logic_error("entry in wrong bucket");
      if (!seen.insert(e.peer).second)
        throw std::logic_error("duplicate peer id in table");
    }
  }
}

}  // namespace hydra::dht
