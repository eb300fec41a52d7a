#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/sim/engine.hpp"

namespace hydra::raft {

using GroupId = std::string;

// Opaque replicated state-machine command. Commands are immutable and
// shared by pointer between replicas inside the simulation.
struct Command {
  virtual ~Command() = default;
  virtual std::string_view kind() const = 0;
};
using CommandPtr = std::shared_ptr<const Command>;

struct NoopCommand : Command {
  std::string_view kind() const override { return "noop"; }
};

// Membership change applied as a single committed entry: remove one dead
// member and add its replacement (remove may be absent for pure growth).
struct MemberReplace : Command {
  sim::NodeId remove = sim::kNoNode;
  sim::NodeId add = sim::kNoNode;
  std::string_view kind() const override { return "member_replace"; }
};

struct LogEntry {
  std::uint64_t term = 0;
  std::uint64_t index = 0;  // 1-based, contiguous
  CommandPtr command;
};

struct RaftConfig {
  sim::SimTime heartbeat_interval = 50;
  sim::SimTime election_timeout_min = 150;
  sim::SimTime election_timeout_max = 300;
  // After this many consecutive elections with no reply at all, the
  // timeout is stretched 10x so an abandoned replica stops spamming.
  int barren_election_backoff = 10;
};

enum class Role { follower, candidate, leader };

struct RequestVoteMsg;
struct VoteReplyMsg;
struct AppendEntriesMsg;
struct AppendReplyMsg;

// Observation hooks used by the safety monitors in tests.
struct RaftMonitor {
  virtual ~RaftMonitor() = default;
  virtual void on_become_leader(const GroupId&, std::uint64_t /*term*/,
                                sim::NodeId /*node*/) {}
  virtual void on_apply(const GroupId&, std::uint64_t /*index*/,
                        std::uint64_t /*term*/, const CommandPtr&,
                        sim::NodeId /*node*/) {}
};

// One Raft replica for one group, hosted inside a node actor. The object
// itself is the durable state (log, current term, vote); the host calls
// on_crash/on_restart so volatile role and timers behave like a reboot.
class RaftInstance {
 public:
  struct Hooks {
    // Called in log order exactly once per applied index per incarnation.
    std::function<void(std::uint64_t index, const CommandPtr&, bool as_leader)>
        apply;
    std::function<void(std::uint64_t term)> became_leader;
    std::function<void(sim::NodeId leader, std::uint64_t term)> leader_seen;
    std::function<void()> membership_changed;
  };

  RaftInstance(sim::Engine& engine, sim::NodeId self, GroupId group,
               std::vector<sim::NodeId> initial_members, Hooks hooks,
               RaftConfig config = {}, RaftMonitor* monitor = nullptr);

  // Arms the election timer. Call once after construction and again after
  // restart.
  void start();

  void on_crash();
  void on_restart();

  void handle(sim::NodeId from, const sim::MessagePtr& msg);

  // Leader-only append. Returns the assigned index, or 0 when this
  // replica is not the leader.
  std::uint64_t propose(CommandPtr cmd);

  bool is_leader() const { return role_ == Role::leader; }
  Role role() const { return role_; }
  sim::NodeId known_leader() const { return known_leader_; }
  std::uint64_t current_term() const { return current_term_; }
  std::uint64_t commit_index() const { return commit_index_; }
  std::uint64_t last_index() const { return log_.size(); }
  const std::vector<LogEntry>& log() const { return log_; }
  const std::vector<sim::NodeId>& members() const { return members_; }
  bool is_member(sim::NodeId n) const;
  const GroupId& group() const { return group_; }
  bool passive() const { return passive_; }

  // Full-state transfer for bringing a replacement replica up to date.
  struct Transfer {
    std::uint64_t term = 0;
    std::vector<sim::NodeId> initial_members;
    std::vector<LogEntry> log;
  };
  Transfer export_state() const;
  static std::unique_ptr<RaftInstance> from_transfer(
      sim::Engine& engine, sim::NodeId self, GroupId group,
      const Transfer& transfer, Hooks hooks, RaftConfig config = {},
      RaftMonitor* monitor = nullptr);

 private:
  void become_follower(std::uint64_t term);
  void become_candidate();
  void become_leader();
  void arm_election_timer();
  void arm_heartbeat_timer();
  void broadcast_append();
  void send_append(sim::NodeId peer);
  void handle_request_vote(sim::NodeId from, const RequestVoteMsg& m);
  void handle_vote_reply(sim::NodeId from, const VoteReplyMsg& m);
  void handle_append_entries(sim::NodeId from, const AppendEntriesMsg& m);
  void handle_append_reply(sim::NodeId from, const AppendReplyMsg& m);
  void advance_commit();
  void apply_committed();
  void recompute_members();
  std::uint64_t last_log_term() const {
    return log_.empty() ? 0 : log_.back().term;
  }
  std::size_t quorum() const { return members_.size() / 2 + 1; }
  sim::SimTime sample_election_timeout();

  sim::Engine& engine_;
  sim::NodeId self_;
  GroupId group_;
  Hooks hooks_;
  RaftConfig config_;
  RaftMonitor* monitor_;

  // Durable across crash/restart.
  std::uint64_t current_term_ = 0;
  sim::NodeId voted_for_ = sim::kNoNode;
  std::vector<LogEntry> log_;
  std::vector<sim::NodeId> initial_members_;

  // Volatile.
  Role role_ = Role::follower;
  std::vector<sim::NodeId> members_;
  bool passive_ = false;  // set when self is no longer in the member list
  std::uint64_t commit_index_ = 0;
  std::uint64_t last_applied_ = 0;
  sim::NodeId known_leader_ = sim::kNoNode;
  std::map<sim::NodeId, std::uint64_t> next_index_;
  std::map<sim::NodeId, std::uint64_t> match_index_;
  std::vector<sim::NodeId> votes_granted_;
  bool any_reply_this_election_ = false;
  int barren_elections_ = 0;
  std::uint64_t election_timer_epoch_ = 0;
  std::uint64_t heartbeat_timer_epoch_ = 0;
  bool crashed_ = false;
};

}  // namespace hydra::raft
