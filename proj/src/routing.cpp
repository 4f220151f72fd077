// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/routing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>

#include <fmt/format.h>

#include "greenloop/error.hpp"
#include "greenloop/rng.hpp"

namespace greenloop {

std::optional<EdgeAttrs> CollectionGraph::edge(NodeId a, NodeId b) const {
  if (auto it = edges.find({a, b}); it != edges.end()) return it->second;
  if (auto it = edges.find({b, a}); it != edges.end()) return it->second;
  return std::nullopt;
}

bool CollectionGraph::has_node(NodeId id) const {
  return std::any_of(nodes.begin(), nodes.end(), [id](const BinNode& n) { return n.id == id; });
}

NodeId CollectionGraph::depot() const {
  std::optional<NodeId> found;
  for (const auto& n : nodes) {
    if (!n.is_depot) continue;
    if (found) throw Error(ErrorCode::kValidation, "collection graph has more than one depot");
    found = n.id;
  }
  if (!found) throw Error(ErrorCode::kValidation, "collection graph has no depot");
  return *found;
}

std::vector<NodeId> CollectionGraph::service_bins() const {
  std::vector<NodeId> bins;
  for (const auto& n : nodes) {
    if (!n.is_depot && n.fill_level >= service_threshold) bins.push_back(n.id);
  }
  std::sort(bins.begin(), bins.end());
  return bins;
}

std::vector<std::string> validate_graph(const CollectionGraph& g) {
  std::vector<std::string> out;
  std::set<NodeId> ids;
  size_t depots = 0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (!ids.insert(n.id).second) out.push_back(fmt::format("nodes[{}]: duplicate id {}", i, n.id));
    if (n.is_depot) ++depots;
    if (!(n.fill_level >= 0.0 && n.fill_level <= 1.0)) {
      out.push_back(fmt::format("nodes[{}].fill_level: {} outside [0, 1]", i, n.fill_level));
    }
  }
  if (!g.nodes.empty() && depots != 1) {
    out.push_back(fmt::format("nodes: expected exactly one depot, found {}", depots));
  }
  for (const auto& [key, attrs] : g.edges) {
    const auto [a, b] = key;
    if (!ids.contains(a) || !ids.contains(b)) {
      out.push_back(fmt::format("edges[{}-{}]: unknown endpoint", a, b));
    }
    if (!(attrs.distance_km >= 0.0) || !(attrs.emission_rate_kg_per_km >= 0.0)) {
      out.push_back(fmt::format("edges[{}-{}]: negative attribute", a, b));
    }
    if (auto rev = g.edges.find({b, a}); rev != g.edges.end() && a < b) {
      if (rev->second.distance_km != attrs.distance_km) {
        out.push_back(fmt::format("edges[{}-{}]: asymmetric distance {} vs {}", a, b,
                                  attrs.distance_km, rev->second.distance_km));
      }
    }
  }
  if (!(g.service_threshold >= 0.0 && g.service_threshold <= 1.0)) {
    out.push_back("service_threshold: outside [0, 1]");
  }
  return out;
}

std::vector<std::string> validate_rl_config(const RLConfig& cfg) {
  std::vector<std::string> out;
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0)) {
    out.push_back("learning_rate: must lie in (0, 1]");
  }
  if (!(cfg.discount >= 0.0 && cfg.discount < 1.0)) out.push_back("discount: must lie in [0, 1)");
  if (!(cfg.epsilon_start >= 0.0 && cfg.epsilon_start <= 1.0)) {
    out.push_back("epsilon_start: must lie in [0, 1]");
  }
  if (!(cfg.epsilon_end >= 0.0 && cfg.epsilon_end <= 1.0)) {
    out.push_back("epsilon_end: must lie in [0, 1]");
  }
  if (cfg.epsilon_end > cfg.epsilon_start) out.push_back("epsilon_end: exceeds epsilon_start");
  if (cfg.episodes < 1) out.push_back("episodes: must be at least 1");
  if (!(cfg.reward_scale > 0.0)) out.push_back("reward_scale: must be positive");
  return out;
}

double QTable::get(const RouteState& s, NodeId action) const {
  auto it = values_.find(Key{s.current, s.visited, action});
  return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(const RouteState& s, NodeId action, double value) {
  values_[Key{s.current, s.visited, action}] = value;
}

void apply_q_update(QTable& q, const RouteState& s, NodeId action, double reward,
                    const RouteState& s_next, std::span<const NodeId> next_actions,
                    const RLConfig& cfg) {
  double best_next = 0.0;
  if (!next_actions.empty()) {
    best_next = q.get(s_next, next_actions.front());
    for (NodeId a : next_actions.subspan(1)) best_next = std::max(best_next, q.get(s_next, a));
  }
  const double old = q.get(s, action);
  const double target = reward + cfg.discount * best_next;
  q.set(s, action, old + cfg.learning_rate * (target - old));
}

QTable q_update(QTable q, const RouteState& s, NodeId action, double reward,
                const RouteState& s_next, std::span<const NodeId> next_actions,
                const RLConfig& cfg) {
  apply_q_update(q, s, action, reward, s_next, next_actions, cfg);
  return q;
}

namespace {

// Dense view of a graph restricted to depot + service bins. Local index 0 is
// the depot; local index k + 1 is service bin k.
class TourProblem {
 public:
  explicit TourProblem(const CollectionGraph& g) : bins_(g.service_bins()) {
    if (bins_.size() > kMaxTabularBins) {
      throw Error(ErrorCode::kStateSpaceTooLarge,
                  fmt::format("{} service bins exceed the tabular limit of {}", bins_.size(),
                              kMaxTabularBins));
    }
    depot_ = g.depot();
    ids_.push_back(depot_);
    ids_.insert(ids_.end(), bins_.begin(), bins_.end());
    const size_t n = ids_.size();
    cost_.assign(n * n, std::nan(""));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (auto e = g.edge(ids_[i], ids_[j])) cost_[i * n + j] = e->emissions_kg();
      }
    }
    full_ = bins_.empty() ? 0u : static_cast<uint32_t>((uint64_t{1} << bins_.size()) - 1);
  }

  void require_connected(const CollectionGraph& g) const {
    std::set<NodeId> seen{depot_};
    std::deque<NodeId> frontier{depot_};
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& [key, attrs] : g.edges) {
      adj[key.first].push_back(key.second);
      adj[key.second].push_back(key.first);
    }
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      for (NodeId v : adj[u]) {
        if (seen.insert(v).second) frontier.push_back(v);
      }
    }
    for (NodeId b : bins_) {
      if (!seen.contains(b)) {
        throw Error(ErrorCode::kDisconnectedGraph,
                    fmt::format("bin {} is unreachable from depot {}", b, depot_));
      }
    }
  }

  size_t bin_count() const { return bins_.size(); }
  uint32_t full_mask() const { return full_; }
  NodeId depot() const { return depot_; }
  NodeId id_of(size_t local) const { return ids_[local]; }

  double cost(size_t from, size_t to) const { return cost_[from * ids_.size() + to]; }
  bool connected(size_t from, size_t to) const { return !std::isnan(cost(from, to)); }

  // Local index of the node a state sits on.
  size_t local_of(NodeId id) const {
    if (id == depot_) return 0;
    auto it = std::lower_bound(bins_.begin(), bins_.end(), id);
    return static_cast<size_t>(it - bins_.begin()) + 1;
  }

  // Unvisited bins reachable by one leg, ascending id. The final bin is only
  // offered when it also connects back to the depot.
  void actions(size_t here, uint32_t visited, std::vector<size_t>& out) const {
    out.clear();
    const bool last = std::popcount(visited) + 1 == static_cast<int>(bins_.size());
    for (size_t k = 0; k < bins_.size(); ++k) {
      if (visited & (1u << k)) continue;
      if (!connected(here, k + 1)) continue;
      if (last && !connected(k + 1, 0)) continue;
      out.push_back(k + 1);
    }
  }

 private:
  std::vector<NodeId> bins_;
  std::vector<NodeId> ids_;
  std::vector<double> cost_;
  NodeId depot_ = 0;
  uint32_t full_ = 0;
};

size_t argmax_action(const QTable& q, const RouteState& s, const std::vector<size_t>& actions,
                     const TourProblem& p) {
  size_t best = actions.front();
  double best_value = q.get(s, p.id_of(best));
  for (size_t i = 1; i < actions.size(); ++i) {
    const double v = q.get(s, p.id_of(actions[i]));
    if (v > best_value) {
      best_value = v;
      best = actions[i];
    }
  }
  return best;
}

}  // namespace

QTable train_routing(const CollectionGraph& g, const RLConfig& cfg, const QTable* warm_start) {
  if (auto problems = validate_rl_config(cfg); !problems.empty()) {
    throw Error(ErrorCode::kValidation, "routing config: " + problems.front());
  }
  TourProblem problem(g);
  QTable q = warm_start ? *warm_start : QTable{};
  if (problem.bin_count() == 0) return q;
  problem.require_connected(g);

  Rng rng(cfg.rng_seed);
  std::vector<size_t> actions;
  std::vector<size_t> next_local;
  std::vector<NodeId> next_ids;
  for (int64_t episode = 0; episode < cfg.episodes; ++episode) {
    const double progress =
        cfg.episodes > 1 ? static_cast<double>(episode) / static_cast<double>(cfg.episodes - 1)
                         : 0.0;
    const double epsilon = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * progress;

    size_t here = 0;
    RouteState state{problem.depot(), 0};
    while (state.visited != problem.full_mask()) {
      problem.actions(here, state.visited, actions);
      if (actions.empty()) break;
      size_t choice;
      if (rng.bernoulli(epsilon)) {
        choice = actions[rng.uniform_index(actions.size())];
      } else {
        choice = argmax_action(q, state, actions, problem);
      }
      RouteState next{problem.id_of(choice), state.visited | (1u << (choice - 1))};
      double cost = problem.cost(here, choice);
      if (next.visited == problem.full_mask()) cost += problem.cost(choice, 0);
      const double reward = -cost * cfg.reward_scale;

      next_ids.clear();
      if (next.visited != problem.full_mask()) {
        problem.actions(choice, next.visited, next_local);
        for (size_t l : next_local) next_ids.push_back(problem.id_of(l));
      }
      apply_q_update(q, state, problem.id_of(choice), reward, next, next_ids, cfg);
      state = next;
      here = choice;
    }
  }
  return q;
}

Route greedy_route(const QTable& q, const CollectionGraph& g) {
  TourProblem problem(g);
  Route route{problem.depot()};
  size_t here = 0;
  RouteState state{problem.depot(), 0};
  std::vector<size_t> actions;
  while (state.visited != problem.full_mask()) {
    problem.actions(here, state.visited, actions);
    if (actions.empty()) {
      throw Error(ErrorCode::kMissingEdge,
                  fmt::format("no edge continues the tour from node {}", state.current));
    }
    const size_t choice = argmax_action(q, state, actions, problem);
    state = RouteState{problem.id_of(choice), state.visited | (1u << (choice - 1))};
    route.push_back(state.current);
    here = choice;
  }
  route.push_back(problem.depot());
  return route;
}

Route naive_route(const CollectionGraph& g) {
  Route route{g.depot()};
  for (NodeId b : g.service_bins()) route.push_back(b);
  route.push_back(g.depot());
  return route;
}

namespace {

template <typename LegValue>
double sum_legs(const CollectionGraph& g, const Route& route, LegValue value) {
  double total = 0.0;
  for (size_t i = 1; i < route.size(); ++i) {
    if (route[i - 1] == route[i]) continue;
    auto e = g.edge(route[i - 1], route[i]);
    if (!e) {
      throw Error(ErrorCode::kMissingEdge,
                  fmt::format("route leg {} -> {} has no edge", route[i - 1], route[i]));
    }
    total += value(*e);
  }
  return total;
}

}  // namespace

double route_emissions(const CollectionGraph& g, const Route& route) {
  return sum_legs(g, route, [](const EdgeAttrs& e) { return e.emissions_kg(); });
}

double route_distance_km(const CollectionGraph& g, const Route& route) {
  return sum_legs(g, route, [](const EdgeAttrs& e) { return e.distance_km; });
}

}  // namespace greenloop
