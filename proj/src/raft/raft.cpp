#include "hydra/raft/raft.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "hydra/raft/messages.hpp"

namespace hydra::raft {

RaftInstance::RaftInstance(sim::Engine& engine, sim::NodeId self, GroupId group,
                           std::vector<sim::NodeId> initial_members,
                           Hooks hooks, RaftConfig config, RaftMonitor* monitor)
    : engine_(engine),
      self_(self),
      group_(std::move(group)),
      hooks_(std::move(hooks)),
      config_(config),
      monitor_(monitor),
      initial_members_(std::move(initial_members)) {
  recompute_members();
}

void RaftInstance::start() {
  crashed_ = false;
  arm_election_timer();
}

void RaftInstance::on_crash() {
  crashed_ = true;
  // Role, commit knowledge and peer bookkeeping are volatile.
  role_ = Role::follower;
  commit_index_ = 0;
  last_applied_ = 0;
  known_leader_ = sim::kNoNode;
  next_index_.clear();
  match_index_.clear();
  votes_granted_.clear();
  barren_elections_ = 0;
  any_reply_this_election_ = false;
}

void RaftInstance::on_restart() {
  recompute_members();
  start();
}

sim::SimTime RaftInstance::sample_election_timeout() {
  std::uniform_int_distribution<sim::SimTime> dist(
      config_.election_timeout_min, config_.election_timeout_max);
  sim::SimTime t = dist(engine_.rng(fmt::format("raft-timeout/{}", self_)));
  if (barren_elections_ >= config_.barren_election_backoff) t *= 10;
  return t;
}

void RaftInstance::arm_election_timer() {
  const std::uint64_t epoch = ++election_timer_epoch_;
  engine_.schedule_after(
      sample_election_timeout(), self_,
      [this, epoch] {
        if (crashed_ || passive_ || epoch != election_timer_epoch_) return;
        if (role_ == Role::leader) return;
        become_candidate();
      },
      "raft-election-timeout");
}

void RaftInstance::arm_heartbeat_timer() {
  const std::uint64_t epoch = ++heartbeat_timer_epoch_;
  engine_.schedule_after(
      config_.heartbeat_interval, self_,
      [this, epoch] {
        if (crashed_ || epoch != heartbeat_timer_epoch_) return;
        if (role_ != Role::leader) return;
        broadcast_append();
        arm_heartbeat_timer();
      },
      "raft-heartbeat");
}

void RaftInstance::become_follower(std::uint64_t term) {
  if (term > current_term_) {
    current_term_ = term;
    voted_for_ = sim::kNoNode;
  }
  role_ = Role::follower;
  votes_granted_.clear();
  arm_election_timer();
}

void RaftInstance::become_candidate() {
  if (passive_) return;
  if (!any_reply_this_election_ && !votes_granted_.empty())
    ++barren_elections_;
  current_term_ += 1;
  voted_for_ = self_;
  role_ = Role::candidate;
  votes_granted_ = {self_};
  any_reply_this_election_ = false;
  known_leader_ = sim::kNoNode;
  for (sim::NodeId peer : members_) {
    if (peer == self_) continue;
    engine_.send(self_, peer,
                 sim::make_message<RequestVoteMsg>(group_, current_term_, self_,
                                                   last_index(),
                                                   last_log_term()));
  }
  arm_election_timer();
  if (members_.size() == 1 && votes_granted_.size() >= quorum())
    become_leader();
}

void RaftInstance::become_leader() {
  role_ = Role::leader;
  known_leader_ = self_;
  barren_elections_ = 0;
  next_index_.clear();
  match_index_.clear();
  for (sim::NodeId peer : members_) {
    next_index_[peer] = last_index() + 1;
    match_index_[peer] = peer == self_ ? last_index() : 0;
  }
  if (monitor_) monitor_->on_become_leader(group_, current_term_, self_);
  // A fresh no-op lets this term commit predecessors' entries promptly.
  log_.push_back(LogEntry{current_term_, last_index() + 1,
                          std::make_shared<const NoopCommand>()});
  match_index_[self_] = last_index();
  if (hooks_.became_leader) hooks_.became_leader(current_term_);
  broadcast_append();
  arm_heartbeat_timer();
  advance_commit();
}

std::uint64_t RaftInstance::propose(CommandPtr cmd) {
  if (role_ != Role::leader || crashed_) return 0;
  log_.push_back(LogEntry{current_term_, last_index() + 1, std::move(cmd)});
  match_index_[self_] = last_index();
  if (log_.back().command->kind() == "member_replace") recompute_members();
  broadcast_append();
  advance_commit();
  return last_index();
}

void RaftInstance::broadcast_append() {
  for (sim::NodeId peer : members_) {
    if (peer == self_) continue;
    send_append(peer);
  }
}

void RaftInstance::send_append(sim::NodeId peer) {
  const std::uint64_t next = next_index_.count(peer) ? next_index_[peer]
                                                     : last_index() + 1;
  const std::uint64_t prev_index = next - 1;
  const std::uint64_t prev_term =
      prev_index == 0 ? 0 : log_[prev_index - 1].term;
  std::vector<LogEntry> entries(log_.begin() + prev_index, log_.end());
  engine_.send(self_, peer,
               sim::make_message<AppendEntriesMsg>(
                   group_, current_term_, self_, prev_index, prev_term,
                   std::move(entries), commit_index_));
}

void RaftInstance::handle(sim::NodeId from, const sim::MessagePtr& msg) {
  if (crashed_ || passive_) return;
  const auto* base = dynamic_cast<const RaftMsg*>(msg.get());
  if (base == nullptr || base->group != group_) return;
  // Replicas outside this group's configuration cannot influence it.
  if (!is_member(from)) return;

  if (const auto* m = dynamic_cast<const RequestVoteMsg*>(msg.get())) {
    handle_request_vote(from, *m);
  } else if (const auto* m = dynamic_cast<const VoteReplyMsg*>(msg.get())) {
    handle_vote_reply(from, *m);
  } else if (const auto* m = dynamic_cast<const AppendEntriesMsg*>(msg.get())) {
    handle_append_entries(from, *m);
  } else if (const auto* m = dynamic_cast<const AppendReplyMsg*>(msg.get())) {
    handle_append_reply(from, *m);
  }
}

void RaftInstance::handle_request_vote(sim::NodeId from,
                                       const RequestVoteMsg& m) {
  if (m.term > current_term_) become_follower(m.term);
  bool grant = false;
  if (m.term == current_term_ && role_ != Role::leader &&
      (voted_for_ == sim::kNoNode || voted_for_ == m.candidate)) {
    // Up-to-date rule: candidate's log must not be behind ours.
    const bool up_to_date =
        m.last_log_term > last_log_term() ||
        (m.last_log_term == last_log_term() && m.last_log_index >= last_index());
    if (up_to_date) {
      grant = true;
      voted_for_ = m.candidate;
      arm_election_timer();
    }
  }
  engine_.send(self_, from,
               sim::make_message<VoteReplyMsg>(group_, current_term_, grant,
                                               m.term));
}

void RaftInstance::handle_vote_reply(sim::NodeId from, const VoteReplyMsg& m) {
  if (m.term > current_term_) {
    become_follower(m.term);
    return;
  }
  if (role_ != Role::candidate || m.for_term != current_term_) return;
  any_reply_this_election_ = true;
  barren_elections_ = 0;
  if (!m.granted) return;
  if (std::find(votes_granted_.begin(), votes_granted_.end(), from) ==
      votes_granted_.end())
    votes_granted_.push_back(from);
  if (votes_granted_.size() >= quorum()) become_leader();
}

void RaftInstance::handle_append_entries(sim::NodeId from,
                                         const AppendEntriesMsg& m) {
  if (m.term < current_term_) {
    engine_.send(self_, from,
                 sim::make_message<AppendReplyMsg>(group_, current_term_, false,
                                                   0, last_index()));
    return;
  }
  become_follower(m.term);
  known_leader_ = m.leader;
  if (hooks_.leader_seen) hooks_.leader_seen(m.leader, m.term);

  // Consistency check on the entry preceding the batch.
  if (m.prev_index > 0 &&
      (last_index() < m.prev_index || log_[m.prev_index - 1].term != m.prev_term)) {
    engine_.send(self_, from,
                 sim::make_message<AppendReplyMsg>(
                     group_, current_term_, false, 0,
                     std::min<std::uint64_t>(last_index(), m.prev_index - 1)));
    return;
  }

  bool config_touched = false;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const std::uint64_t idx = m.prev_index + 1 + i;
    if (last_index() >= idx) {
      if (log_[idx - 1].term == m.entries[i].term) continue;
      // Conflict: drop the divergent suffix.
      for (std::size_t j = idx - 1; j < log_.size(); ++j)
        if (log_[j].command->kind() == "member_replace") config_touched = true;
      log_.resize(idx - 1);
    }
    log_.push_back(m.entries[i]);
    if (m.entries[i].command->kind() == "member_replace") config_touched = true;
  }
  if (config_touched) recompute_members();

  if (m.leader_commit > commit_index_) {
    commit_index_ = std::min<std::uint64_t>(m.leader_commit, last_index());
    apply_committed();
  }
  engine_.send(self_, from,
               sim::make_message<AppendReplyMsg>(
                   group_, current_term_, true,
                   m.prev_index + m.entries.size(), 0));
}

void RaftInstance::handle_append_reply(sim::NodeId from,
                                       const AppendReplyMsg& m) {
  if (m.term > current_term_) {
    become_follower(m.term);
    return;
  }
  if (role_ != Role::leader || m.term != current_term_) return;
  if (m.success) {
    match_index_[from] = std::max(match_index_[from], m.match_index);
    next_index_[from] = match_index_[from] + 1;
    advance_commit();
    if (next_index_[from] <= last_index()) send_append(from);
  } else {
    const std::uint64_t retry = std::min<std::uint64_t>(
        m.hint + 1, std::max<std::uint64_t>(1, next_index_[from] - 1));
    next_index_[from] = std::max<std::uint64_t>(1, retry);
    send_append(from);
  }
}

void RaftInstance::advance_commit() {
  if (role_ != Role::leader) return;
  for (std::uint64_t n = last_index(); n > commit_index_; --n) {
    if (log_[n - 1].term != current_term_) break;  // only own-term entries
    std::size_t count = 0;
    for (sim::NodeId peer : members_)
      if (match_index_.count(peer) && match_index_[peer] >= n) ++count;
    if (count >= quorum()) {
      commit_index_ = n;
      apply_committed();
      break;
    }
  }
}

void RaftInstance::apply_committed() {
  while (last_applied_ < commit_index_) {
    ++last_applied_;
    const LogEntry& e = log_[last_applied_ - 1];
    if (monitor_)
      monitor_->on_apply(group_, e.index, e.term, e.command, self_);
    if (hooks_.apply) hooks_.apply(e.index, e.command, role_ == Role::leader);
  }
}

void RaftInstance::recompute_members() {
  members_ = initial_members_;
  for (const LogEntry& e : log_) {
    const auto* mr = dynamic_cast<const MemberReplace*>(e.command.get());
    if (mr == nullptr) continue;
    if (mr->remove != sim::kNoNode)
      members_.erase(std::remove(members_.begin(), members_.end(), mr->remove),
                     members_.end());
    if (mr->add != sim::kNoNode &&
        std::find(members_.begin(), members_.end(), mr->add) == members_.end())
      members_.push_back(mr->add);
  }
  const bool was_passive = passive_;
  passive_ = !is_member(self_);
  if (hooks_.membership_changed && !was_passive) hooks_.membership_changed();
}

bool RaftInstance::is_member(sim::NodeId n) const {
  return std::find(members_.begin(), members_.end(), n) != members_.end();
}

RaftInstance::Transfer RaftInstance::export_state() const {
  return Transfer{current_term_, initial_members_, log_};
}

std::unique_ptr<RaftInstance> RaftInstance::from_transfer(
    sim::Engine& engine, sim::NodeId self, GroupId group,
    const Transfer& transfer, Hooks hooks, RaftConfig config,
    RaftMonitor* monitor) {
  auto inst = std::make_unique<RaftInstance>(engine, self, std::move(group),
                                             transfer.initial_members,
                                             std::move(hooks), config, monitor);
  inst->current_term_ = transfer.term;
  inst->log_ = transfer.log;
  inst->recompute_members();
  return inst;
}

}  // namespace hydra::raft
