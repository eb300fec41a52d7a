#pragma once

#include <cstdint>
#include <vector>

#include "hydra/dht/routing_table.hpp"
#include "hydra/sim/message.hpp"

namespace hydra::dht {

struct FindPeerMsg : sim::Message {
  PeerId target;
  PeerId requester_id;
  std::uint64_t lookup_id;
  FindPeerMsg(PeerId t, PeerId r, std::uint64_t id)
      : target(t), requester_id(r), lookup_id(id) {}
  std::string_view type() const override { return "FIND_PEER"; }
};

struct FindPeerReplyMsg : sim::Message {
  std::uint64_t lookup_id;
  bool found;
  sim::NodeId address;
  std::vector<TableEntry> closest;
  FindPeerReplyMsg(std::uint64_t id, bool f, sim::NodeId a,
                   std::vector<TableEntry> c)
      : lookup_id(id), found(f), address(a), closest(std::move(c)) {}
  std::string_view type() const override { return "FIND_PEER_REPLY"; }
};

struct HeartbeatMsg : sim::Message {
  std::uint64_t probe_id;
  explicit HeartbeatMsg(std::uint64_t id) : probe_id(id) {}
  std::string_view type() const override { return "HEARTBEAT"; }
};

struct HeartbeatAckMsg : sim::Message {
  std::uint64_t probe_id;
  explicit HeartbeatAckMsg(std::uint64_t id) : probe_id(id) {}
  std::string_view type() const override { return "HEARTBEAT_ACK"; }
};

}  // namespace hydra::dht
