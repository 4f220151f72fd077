// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Tabular Q-learning over waste-collection tours.
//
// A state is the vehicle's current node plus the set of service bins already
// emptied; an action is the next unvisited bin. Each traversal is rewarded
// with the negative CO2 of the leg (distance x emission rate). The move that
// empties the last bin is also charged the return leg to the depot, so the
// return trip is part of what the agent minimizes.

#ifndef GREENLOOP_ROUTING_HPP_
#define GREENLOOP_ROUTING_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace greenloop {

using NodeId = uint32_t;

inline constexpr size_t kMaxTabularBins = 16;

struct BinNode {
  NodeId id = 0;
  double fill_level = 0.0;
  bool is_depot = false;

  bool operator==(const BinNode&) const = default;
};

struct EdgeAttrs {
  double distance_km = 0.0;
  double emission_rate_kg_per_km = 0.0;

  double emissions_kg() const { return distance_km * emission_rate_kg_per_km; }
  bool operator==(const EdgeAttrs&) const = default;
};

// Undirected: an edge stored as (a, b) also serves b -> a.
struct CollectionGraph {
  std::vector<BinNode> nodes;
  std::map<std::pair<NodeId, NodeId>, EdgeAttrs> edges;
  // Bins with fill_level below this are skipped by the collection tour.
  double service_threshold = 0.0;

  std::optional<EdgeAttrs> edge(NodeId a, NodeId b) const;
  bool has_node(NodeId id) const;
  // Throws kValidation if the graph has no single depot.
  NodeId depot() const;
  // Non-depot nodes at or above the service threshold, ascending by id.
  std::vector<NodeId> service_bins() const;

  bool operator==(const CollectionGraph&) const = default;
};

std::vector<std::string> validate_graph(const CollectionGraph& g);

struct RouteState {
  NodeId current = 0;
  uint32_t visited = 0;  // bit k set once service_bins()[k] is emptied

  auto operator<=>(const RouteState&) const = default;
};

struct RLConfig {
  double learning_rate = 0.5;
  double discount = 0.999;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int64_t episodes = 5000;
  uint64_t rng_seed = 0;
  // Multiplies every reward; used to check that the learned ordering does not
  // depend on the reward scale.
  double reward_scale = 1.0;

  bool operator==(const RLConfig&) const = default;
};

std::vector<std::string> validate_rl_config(const RLConfig& cfg);

class QTable {
 public:
  struct Key {
    NodeId current;
    uint32_t visited;
    NodeId action;
    auto operator<=>(const Key&) const = default;
  };

  double get(const RouteState& s, NodeId action) const;
  void set(const RouteState& s, NodeId action, double value);
  size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::map<Key, double>& entries() const { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::map<Key, double> values_;
};

using Route = std::vector<NodeId>;

// Q(s,a) <- Q(s,a) + lr * (r + discount * max_a' Q(s',a') - Q(s,a)).
// `next_actions` lists the actions available in s_next; an empty list marks
// s_next as terminal and the max term is 0.
void apply_q_update(QTable& q, const RouteState& s, NodeId action, double reward,
                    const RouteState& s_next, std::span<const NodeId> next_actions,
                    const RLConfig& cfg);

QTable q_update(QTable q, const RouteState& s, NodeId action, double reward,
                const RouteState& s_next, std::span<const NodeId> next_actions,
                const RLConfig& cfg);

// Runs cfg.episodes epsilon-greedy episodes from the depot. When `warm_start`
// is given, training continues from those values. Throws kStateSpaceTooLarge
// above kMaxTabularBins service bins and kDisconnectedGraph when a bin cannot
// be reached from the depot.
QTable train_routing(const CollectionGraph& g, const RLConfig& cfg,
                     const QTable* warm_start = nullptr);

// Depot, then argmax-Q bins (ties to the lowest id), then the depot again.
Route greedy_route(const QTable& q, const CollectionGraph& g);

// Depot, service bins in ascending id order, depot.
Route naive_route(const CollectionGraph& g);

// Sum of leg emissions in kg CO2; throws kMissingEdge naming the first leg
// without an edge.
double route_emissions(const CollectionGraph& g, const Route& route);

double route_distance_km(const CollectionGraph& g, const Route& route);

}  // namespace greenloop

#endif  // GREENLOOP_ROUTING_HPP_
