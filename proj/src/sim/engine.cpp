#include "hydra/sim/engine.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace hydra::sim {

LatencyModel LatencyModel::uniform(std::size_t n, double ms) {
  LatencyModel m;
  m.base_ms.assign(n, std::vector<double>(n, ms));
  for (std::size_t i = 0; i < n; ++i) m.base_ms[i][i] = 0.0;
  return m;
}

void LatencyModel::validate() const {
  const std::size_t n = base_ms.size();
  if (jitter_fraction < 0.0 || jitter_fraction >= 1.0)
    throw std::invalid_argument("jitter_fraction must be in [0, 1)");
  for (std::size_t i = 0; i < n; ++i) {
    if (base_ms[i].size() != n)
      throw std::invalid_argument("latency matrix is not square");
    if (base_ms[i][i] != 0.0)
      throw std::invalid_argument("latency diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = base_ms[i][j];
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("latency entries must be finite and >= 0");
      if (base_ms[j][i] != v)
        throw std::invalid_argument("latency matrix must be symmetric");
    }
  }
}

double LatencyModel::max_base() const {
  double best = 0.0;
  for (const auto& row : base_ms)
    for (double v : row) best = std::max(best, v);
  return best;
}

void FaultSchedule::validate(std::size_t node_count,
                             const std::vector<NodeId>& immune_nodes) const {
  SimTime prev = 0;
  auto check_node = [&](NodeId n) {
    if (n >= node_count) throw std::invalid_argument("fault names unknown node");
    for (NodeId im : immune_nodes)
      if (im == n)
        throw std::invalid_argument(
            fmt::format("fault schedule targets immune node {}", n));
  };
  for (const auto& e : entries) {
    if (e.time < prev)
      throw std::invalid_argument("fault entries must be sorted by time");
    prev = e.time;
    switch (e.action.kind) {
      case FaultAction::Kind::crash:
      case FaultAction::Kind::restart:
        check_node(e.action.node);
        break;
      case FaultAction::Kind::partition: {
        for (NodeId n : e.action.side_a) check_node(n);
        for (NodeId n : e.action.side_b) check_node(n);
        for (NodeId a : e.action.side_a)
          for (NodeId b : e.action.side_b)
            if (a == b)
              throw std::invalid_argument("partition sides must be disjoint");
        break;
      }
      case FaultAction::Kind::heal:
        break;
    }
  }
}

void MetricsSink::emit(SimTime t, NodeId node, std::string_view metric,
                       double value) {
  if (!enabled_) return;
  const std::int64_t n = node == kNoNode ? -1 : static_cast<std::int64_t>(node);
  push(fmt::format("{{\"time\":{},\"node\":{},\"metric\":\"{}\",\"value\":{}}}\n",
                   t, n, metric, value));
}

void MetricsSink::emit(SimTime t, NodeId node, std::string_view metric,
                       std::string_view value) {
  if (!enabled_) return;
  const std::int64_t n = node == kNoNode ? -1 : static_cast<std::int64_t>(node);
  push(fmt::format(
      "{{\"time\":{},\"node\":{},\"metric\":\"{}\",\"value\":\"{}\"}}\n", t, n,
      metric, value));
}

void MetricsSink::push(std::string line) {
  if (out_) (*out_) << line;
  stream_ += line;
  ++lines_;
}

void MetricsSink::clear() {
  stream_.clear();
  lines_ = 0;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}
}  // namespace

Engine::Engine(std::uint64_t seed) : seed_(seed) {}

NodeId Engine::add_node(std::unique_ptr<Actor> actor, bool fault_immune) {
  if (started_)
    throw std::logic_error("nodes must be added before the run starts");
  NodeState st;
  st.actor = std::move(actor);
  st.immune = fault_immune;
  const NodeId id = static_cast<NodeId>(nodes_.size());
  st.actor->engine_ = this;
  st.actor->id_ = id;
  nodes_.push_back(std::move(st));
  return id;
}

void Engine::set_latency(LatencyModel model) {
  model.validate();
  latency_ = std::move(model);
}

void Engine::load_fault_schedule(const FaultSchedule& schedule) {
  std::vector<NodeId> immune;
  for (NodeId n = 0; n < nodes_.size(); ++n)
    if (nodes_[n].immune) immune.push_back(n);
  schedule.validate(nodes_.size(), immune);
  for (const auto& e : schedule.entries) {
    FaultAction a = e.action;
    schedule_at(e.time, [this, a] { apply_fault(a); }, "fault");
  }
}

std::mt19937_64& Engine::rng(const std::string& stream) {
  auto it = streams_.find(stream);
  if (it == streams_.end()) {
    it = streams_
             .emplace(stream, std::mt19937_64(splitmix64(seed_ ^ fnv1a(stream))))
             .first;
  }
  return it->second;
}

SimTime Engine::sample_delay(NodeId from, NodeId to) {
  double base = 0.0;
  if (!latency_.base_ms.empty()) {
    if (from >= latency_.size() || to >= latency_.size())
      throw std::out_of_range("node outside latency matrix");
    base = latency_.base_ms[from][to];
  }
  double factor = 1.0;
  if (latency_.jitter_fraction > 0.0) {
    std::uniform_real_distribution<double> dist(-latency_.jitter_fraction,
                                                latency_.jitter_fraction);
    factor += dist(rng("latency"));
  }
  const double ms = base * factor;
  return static_cast<SimTime>(std::llround(ms < 0.0 ? 0.0 : ms));
}

void Engine::send(NodeId from, NodeId to, MessagePtr msg) {
  if (from >= nodes_.size() || to >= nodes_.size())
    throw std::out_of_range("send to unknown node");
  if (!nodes_[from].online || !nodes_[to].online ||
      partitioned_apart(from, to)) {
    ++messages_dropped_;
    return;
  }
  ++messages_sent_;
  const SimTime at = now_ + sample_delay(from, to);
  const std::uint64_t inc = nodes_[to].incarnation;
  push_event(
      at,
      [this, from, to, inc, msg = std::move(msg)] {
        NodeState& st = nodes_[to];
        if (!st.online || st.incarnation != inc) {
          ++messages_dropped_;
          return;
        }
        if (trace_enabled_)
          trace_.push_back(fmt::format("t={} deliver {}->{} {}", now_, from,
                                       to, msg->type()));
        st.actor->on_message(from, msg);
      },
      "deliver");
}

void Engine::schedule_after(SimTime delay, NodeId node,
                            std::function<void()> fn, const char* what) {
  const std::uint64_t inc = nodes_[node].incarnation;
  push_event(
      now_ + delay,
      [this, node, inc, fn = std::move(fn)] {
        NodeState& st = nodes_[node];
        if (!st.online || st.incarnation != inc) return;
        fn();
      },
      what);
}

void Engine::schedule_at(SimTime t, std::function<void()> fn,
                         const char* what) {
  push_event(t < now_ ? now_ : t, std::move(fn), what);
}

void Engine::push_event(SimTime t, std::function<void()> fn,
                        const char* what) {
  queue_.push(Event{t, next_seq_++, std::move(fn), what});
}

void Engine::dispatch(const Event& ev) {
  if (trace_enabled_)
    trace_.push_back(fmt::format("t={} seq={} {}", ev.time, ev.seq, ev.what));
  try {
    ev.fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format(
        "event handler failed at t={} ({}): {}", ev.time, ev.what, e.what()));
  }
}

std::size_t Engine::run_until(SimTime t) {
  if (t < now_) throw std::invalid_argument("run_until into the past");
  if (!started_) {
    started_ = true;
    for (auto& st : nodes_) st.actor->on_start();
  }
  std::size_t processed = 0;
  while (!queue_.empty() && queue_.top().time <= t) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    dispatch(ev);
    ++processed;
  }
  now_ = t;
  return processed;
}

std::size_t Engine::run_to_idle(std::size_t max_events) {
  if (!started_) {
    started_ = true;
    for (auto& st : nodes_) st.actor->on_start();
  }
  std::size_t processed = 0;
  while (!queue_.empty()) {
    if (processed >= max_events)
      throw std::runtime_error("run_to_idle exceeded event budget");
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    dispatch(ev);
    ++processed;
  }
  return processed;
}

void Engine::crash(NodeId n) {
  NodeState& st = nodes_[n];
  if (st.immune) throw std::logic_error("cannot crash a fault-immune node");
  if (!st.online) return;
  st.online = false;
  if (trace_enabled_) trace_.push_back(fmt::format("t={} crash {}", now_, n));
  st.actor->on_crash();
}

void Engine::restart(NodeId n) {
  NodeState& st = nodes_[n];
  if (st.online) return;
  st.online = true;
  ++st.incarnation;  // invalidates stale timers and in-flight deliveries
  if (trace_enabled_) trace_.push_back(fmt::format("t={} restart {}", now_, n));
  st.actor->on_restart();
}

void Engine::partition(std::vector<NodeId> side_a, std::vector<NodeId> side_b) {
  for (auto& st : nodes_) st.partition_side = 0;
  for (NodeId n : side_a) nodes_[n].partition_side = 1;
  for (NodeId n : side_b) {
    if (nodes_[n].partition_side == 1)
      throw std::invalid_argument("partition sides must be disjoint");
    nodes_[n].partition_side = 2;
  }
  partition_active_ = true;
}

void Engine::heal() {
  for (auto& st : nodes_) st.partition_side = 0;
  partition_active_ = false;
}

bool Engine::partitioned_apart(NodeId a, NodeId b) const {
  if (!partition_active_) return false;
  const int sa = nodes_[a].partition_side;
  const int sb = nodes_[b].partition_side;
  return sa != 0 && sb != 0 && sa != sb;
}

void Engine::apply_fault(const FaultAction& action) {
  switch (action.kind) {
    case FaultAction::Kind::crash:
      crash(action.node);
      break;
    case FaultAction::Kind::restart:
      restart(action.node);
      break;
    case FaultAction::Kind::partition:
      partition(action.side_a, action.side_b);
      break;
    case FaultAction::Kind::heal:
      heal();
      break;
  }
}

}  // namespace hydra::sim
