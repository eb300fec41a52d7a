#pragma once

#include <functional>
#include <map>
#include <set>

#include "hydra/dht/messages.hpp"
#include "hydra/dht/routing_table.hpp"
#include "hydra/sim/engine.hpp"

namespace hydra::dht {

// Node-side routing machinery: owns the (volatile) table, answers
// FIND_PEER and HEARTBEAT, and drives iterative lookups and probed
// insertions as event-driven state machines.
class RoutingAgent {
 public:
  struct Config {
    int bucket_capacity = 20;  // M
    int fanout = 3;            // k, find_node fan-out per round
    double timeout_factor = 4.0;
    int max_rounds = 256;
  };

  RoutingAgent(sim::Engine& engine, sim::NodeId self, PeerId id,
               Config config = {});

  const PeerId& peer_id() const { return id_; }
  RoutingTable& table() { return table_; }
  const Config& config() const { return config_; }

  // Returns true when the message was a DHT message and was consumed.
  bool handle(sim::NodeId from, const sim::MessagePtr& msg);

  // Liveness probe with a single timeout, no retries.
  void probe(sim::NodeId target, std::function<void(bool alive)> done);

  // Full insertion protocol: append when the bucket has room, otherwise
  // heartbeat every occupant and replace one that is offline; reject when
  // all occupants are alive.
  void insert_peer(const TableEntry& entry,
                   std::function<void(InsertOutcome)> done = {});

  struct FindResult {
    bool found = false;
    sim::NodeId address = sim::kNoNode;
    // Peers that answered during the lookup, ascending distance to target.
    std::vector<TableEntry> responders;
    int rounds = 0;
    bool no_live_route = false;
  };
  void find_node(const PeerId& target, std::function<void(FindResult)> done);

  // Direct table seeding used by induction (entries are hearsay from a
  // bootstrap server, inserted without probing delay).
  void seed(const std::vector<TableEntry>& entries);

  void on_crash();

  sim::SimTime probe_timeout() const;

 private:
  struct Lookup {
    PeerId target;
    std::function<void(FindResult)> done;
    std::vector<TableEntry> candidates;  // sorted by distance, deduped
    std::set<PeerId> queried;
    std::set<PeerId> failed;
    std::map<std::uint64_t, PeerId> inflight;  // query id -> peer
    std::vector<TableEntry> responders;
    PeerId best_before_round{};
    bool have_best = false;
    int rounds = 0;
    bool finished = false;
  };

  void answer_find_peer(sim::NodeId from, const FindPeerMsg& m);
  void lookup_round(std::uint64_t lookup_id);
  void lookup_reply(std::uint64_t query_id, sim::NodeId from,
                    const FindPeerReplyMsg& m);
  void lookup_query_failed(std::uint64_t query_id);
  void merge_candidate(Lookup& lk, const TableEntry& e);
  void maybe_advance(std::uint64_t lookup_id);
  void finish(std::uint64_t lookup_id, FindResult result);

  sim::Engine& engine_;
  sim::NodeId self_;
  PeerId id_;
  Config config_;
  RoutingTable table_;

  std::uint64_t next_probe_id_ = 1;
  std::map<std::uint64_t, std::function<void(bool)>> probes_;

  std::uint64_t next_lookup_id_ = 1;
  std::map<std::uint64_t, Lookup> lookups_;
  std::map<std::uint64_t, std::uint64_t> query_to_lookup_;
};

}  // namespace hydra::dht
