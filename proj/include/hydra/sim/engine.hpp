#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "hydra/sim/fault.hpp"
#include "hydra/sim/latency.hpp"
#include "hydra/sim/message.hpp"
#include "hydra/sim/metrics.hpp"
#include "hydra/sim/time.hpp"

namespace hydra::sim {

class Engine;

// A node's behavior. The engine owns every actor; handlers never run on a
// crashed node, and timers armed before a restart are discarded.
class Actor {
 public:
  virtual ~Actor() = default;

  virtual void on_message(NodeId from, const MessagePtr& msg) = 0;
  virtual void on_start() {}
  virtual void on_crash() {}
  virtual void on_restart() {}

  NodeId id() const { return id_; }

 protected:
  Engine& engine() const { return *engine_; }

 private:
  friend class Engine;
  Engine* engine_ = nullptr;
  NodeId id_ = kNoNode;
};

// Deterministic single-threaded discrete-event engine: virtual clock,
// latency-delayed message delivery, crash/restart/partition injection.
// Events at equal time run in scheduling order (FIFO by sequence number).
class Engine {
 public:
  explicit Engine(std::uint64_t seed);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  NodeId add_node(std::unique_ptr<Actor> actor, bool fault_immune = false);
  void set_latency(LatencyModel model);
  void load_fault_schedule(const FaultSchedule& schedule);

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t node_count() const { return nodes_.size(); }

  // Named deterministic random substreams, independent of draw order in
  // other streams.
  std::mt19937_64& rng(const std::string& stream);

  // Enqueues delivery at now + sampled latency when both ends are online
  // and not partitioned apart; otherwise the message is silently dropped.
  void send(NodeId from, NodeId to, MessagePtr msg);

  // Node-owned timer: skipped if the node is crashed or has restarted
  // since scheduling.
  void schedule_after(SimTime delay, NodeId node, std::function<void()> fn,
                      const char* what = "timer");

  // Engine-level event (fault injection, scenario scripts).
  void schedule_at(SimTime t, std::function<void()> fn,
                   const char* what = "event");

  // Runs all events with time <= t; clock ends at t. Returns events
  // processed. Throws if t is in the past or a handler throws.
  std::size_t run_until(SimTime t);

  // Drains the queue (bounded by max_events as a runaway guard).
  std::size_t run_to_idle(std::size_t max_events = 50'000'000);

  void crash(NodeId n);
  void restart(NodeId n);
  void partition(std::vector<NodeId> side_a, std::vector<NodeId> side_b);
  void heal();

  bool online(NodeId n) const { return nodes_[n].online; }
  bool fault_immune(NodeId n) const { return nodes_[n].immune; }
  std::uint64_t incarnation(NodeId n) const { return nodes_[n].incarnation; }
  bool partitioned_apart(NodeId a, NodeId b) const;

  Actor& actor(NodeId n) { return *nodes_[n].actor; }
  template <class T>
  T& actor_as(NodeId n) {
    return dynamic_cast<T&>(*nodes_[n].actor);
  }

  double max_base_latency() const { return latency_.max_base(); }
  const LatencyModel& latency() const { return latency_; }

  MetricsSink& metrics() { return metrics_; }

  std::size_t messages_sent() const { return messages_sent_; }
  std::size_t messages_dropped() const { return messages_dropped_; }

  // Event trace for determinism checks; off by default.
  void enable_trace(bool on = true) { trace_enabled_ = on; }
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    std::function<void()> fn;
    const char* what;
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  struct NodeState {
    std::unique_ptr<Actor> actor;
    bool online = true;
    bool immune = false;
    std::uint64_t incarnation = 0;
    int partition_side = 0;  // 0 = unassigned, 1 = side A, 2 = side B
  };

  void push_event(SimTime t, std::function<void()> fn, const char* what);
  void dispatch(const Event& ev);
  SimTime sample_delay(NodeId from, NodeId to);
  void apply_fault(const FaultAction& action);

  std::uint64_t seed_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  bool started_ = false;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::vector<NodeState> nodes_;
  LatencyModel latency_;
  bool partition_active_ = false;
  std::map<std::string, std::mt19937_64> streams_;
  MetricsSink metrics_;
  std::size_t messages_sent_ = 0;
  std::size_t messages_dropped_ = 0;
  bool trace_enabled_ = false;
  std::vector<std::string> trace_;
};

}  // namespace hydra::sim
