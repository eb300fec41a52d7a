#pragma once

#include <vector>

#include "hydra/raft/raft.hpp"
#include "hydra/sim/message.hpp"

namespace hydra::raft {

struct RaftMsg : sim::Message {
  GroupId group;
  std::uint64_t term = 0;
  explicit RaftMsg(GroupId g, std::uint64_t t) : group(std::move(g)), term(t) {}
};

struct RequestVoteMsg : RaftMsg {
  sim::NodeId candidate;
  std::uint64_t last_log_index;
  std::uint64_t last_log_term;
  RequestVoteMsg(GroupId g, std::uint64_t t, sim::NodeId cand,
                 std::uint64_t lli, std::uint64_t llt)
      : RaftMsg(std::move(g), t),
        candidate(cand),
        last_log_index(lli),
        last_log_term(llt) {}
  std::string_view type() const override { return "REQUEST_VOTE"; }
};

struct VoteReplyMsg : RaftMsg {
  bool granted;
  std::uint64_t for_term;  // the candidacy term this reply answers
  VoteReplyMsg(GroupId g, std::uint64_t t, bool gr, std::uint64_t ft)
      : RaftMsg(std::move(g), t), granted(gr), for_term(ft) {}
  std::string_view type() const override { return "VOTE_REPLY"; }
};

struct AppendEntriesMsg : RaftMsg {
  sim::NodeId leader;
  std::uint64_t prev_index;
  std::uint64_t prev_term;
  std::vector<LogEntry> entries;  // empty = heartbeat
  std::uint64_t leader_commit;
  AppendEntriesMsg(GroupId g, std::uint64_t t, sim::NodeId l,
                   std::uint64_t pi, std::uint64_t pt,
                   std::vector<LogEntry> e, std::uint64_t lc)
      : RaftMsg(std::move(g), t),
        leader(l),
        prev_index(pi),
        prev_term(pt),
        entries(std::move(e)),
        leader_commit(lc) {}
  std::string_view type() const override { return "APPEND_ENTRIES"; }
};

struct AppendReplyMsg : RaftMsg {
  bool success;
  std::uint64_t match_index;  // on success: replicated prefix length
  std::uint64_t hint;         // on failure: follower log length
  AppendReplyMsg(GroupId g, std::uint64_t t, bool ok, std::uint64_t mi,
                 std::uint64_t h)
      : RaftMsg(std::move(g), t), success(ok), match_index(mi), hint(h) {}
  std::string_view type() const override { return "APPEND_REPLY"; }
};

}  // namespace hydra::raft
