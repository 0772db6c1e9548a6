#pragma once

// Per-agent state machine of asynchronous network Newton.
//
// Each agent keeps its own iterate x, the diagonal entry D, gradient
// component g and zeroth-order direction d0 = -g / D, plus one overwrite
// slot per neighbor holding that neighbor's last broadcast x and d0.
//
// One iteration with active agent i:
//   compute_direction(i) -> apply_step(i) -> refresh(i)
//   i sends Primary{x_i, d0_i} to each neighbor j; react_neighbor(j) updates
//   g_j, d0_j and returns Secondary{d0_j}, delivered to every neighbor of j
//   (including i) through store_secondary.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "annewton/error.hpp"
#include "annewton/objective.hpp"
#include "annewton/scalar.hpp"

namespace annewton {

template <class S>
struct NeighborSlot {
  std::size_t id;
  S x;
  S d0;

  bool operator==(const NeighborSlot&) const = default;
};

template <class S>
struct AgentState {
  std::size_t id = 0;
  S x{0};
  S D_loc{0};
  S g_loc{0};
  S d0_loc{0};
  /// Sorted by neighbor id; keys are exactly the agent's neighbors.
  std::vector<NeighborSlot<S>> cache;
  /// Iteration of the last activation, -1 before the first one.
  long long last_active = -1;

  const NeighborSlot<S>& slot(std::size_t neighbor) const { return const_cast<AgentState*>(this)->slot(neighbor); }

  NeighborSlot<S>& slot(std::size_t neighbor) {
    auto it = std::lower_bound(cache.begin(), cache.end(), neighbor,
                               [](const NeighborSlot<S>& s, std::size_t id) { return s.id < id; });
    if (it == cache.end() || it->id != neighbor)
      throw Error(ErrorCode::MissingCacheEntry,
                  "agent " + std::to_string(id) + " has no cache slot for " + std::to_string(neighbor));
    return *it;
  }

  bool has_neighbor(std::size_t neighbor) const {
    return std::binary_search(cache.begin(), cache.end(), NeighborSlot<S>{neighbor, S(0), S(0)},
                              [](const NeighborSlot<S>& a, const NeighborSlot<S>& b) { return a.id < b.id; });
  }

  bool operator==(const AgentState&) const = default;
};

enum class BroadcastKind { Primary, Secondary };

template <class S>
struct Broadcast {
  std::size_t origin;
  BroadcastKind kind;
  /// Meaningful for Primary only.
  S x;
  S d0;
};

namespace detail {

template <class S>
S local_D(const PenalizedObjective<S>& obj, std::size_t i, const S& x) {
  const auto k = static_cast<Eigen::Index>(i);
  return obj.alpha_s() * obj.local(i).hess(x) + S(2) * (S(1) - obj.W()(k, k));
}

/// g_i from own x and the cached neighbor x values.
template <class S>
S local_g(const PenalizedObjective<S>& obj, const AgentState<S>& s) {
  const auto k = static_cast<Eigen::Index>(s.id);
  S g = (S(1) - obj.W()(k, k)) * s.x + obj.alpha_s() * obj.local(s.id).grad(s.x);
  for (const auto& slot : s.cache) g -= obj.W()(k, static_cast<Eigen::Index>(slot.id)) * slot.x;
  return g;
}

}  // namespace detail

/// Zeroth-order broadcast an agent emits during the init round (x = 0).
template <class S>
Broadcast<S> initial_broadcast(const PenalizedObjective<S>& obj, std::size_t i) {
  const S zero(0);
  const S D = detail::local_D(obj, i, zero);
  const auto k = static_cast<Eigen::Index>(i);
  const S g = (S(1) - obj.W()(k, k)) * zero + obj.alpha_s() * obj.local(i).grad(zero);
  return {i, BroadcastKind::Secondary, zero, -g / D};
}

/// Initial state of agent `id`: x = 0, D, g, d0 computed locally, and the
/// neighbor slots primed with what the init round delivers (x_j = 0 and the
/// neighbors' initial d0).
template <class S>
AgentState<S> init_agent(std::size_t id, const PenalizedObjective<S>& obj) {
  AgentState<S> s;
  s.id = id;
  s.x = S(0);
  for (std::size_t j : obj.network().neighbors(id)) s.cache.push_back({j, S(0), initial_broadcast(obj, j).d0});
  s.D_loc = detail::local_D(obj, id, s.x);
  s.g_loc = detail::local_g(obj, s);
  s.d0_loc = -s.g_loc / s.D_loc;
  return s;
}

template <class S>
std::vector<AgentState<S>> init_agents(const PenalizedObjective<S>& obj) {
  std::vector<AgentState<S>> agents;
  agents.reserve(obj.size());
  for (std::size_t i = 0; i < obj.size(); ++i) agents.push_back(init_agent(i, obj));
  return agents;
}

/// d_i = (B_ii d0_i - g_i + sum_j B_ij d0_j) / D_ii using cached d0_j.
template <class S>
S compute_direction(const AgentState<S>& s, const PenalizedObjective<S>& obj) {
  const auto k = static_cast<Eigen::Index>(s.id);
  const auto& W = obj.W();
  S acc = (S(1) - W(k, k)) * s.d0_loc - s.g_loc;
  for (std::size_t j : obj.network().neighbors(s.id)) acc += W(k, static_cast<Eigen::Index>(j)) * s.slot(j).d0;
  return acc / s.D_loc;
}

/// x <- x + epsilon d. D, g and d0 stay stale until refresh().
template <class S>
void apply_step(AgentState<S>& s, const S& epsilon, const S& d, long long iteration) {
  s.x += epsilon * d;
  s.last_active = iteration;
}

/// Recomputes D, g and d0 from the agent's own x and cached neighbor x.
template <class S>
void refresh(AgentState<S>& s, const PenalizedObjective<S>& obj) {
  s.D_loc = detail::local_D(obj, s.id, s.x);
  s.g_loc = detail::local_g(obj, s);
  s.d0_loc = -s.g_loc / s.D_loc;
}

template <class S>
Broadcast<S> primary_broadcast(const AgentState<S>& s) {
  return {s.id, BroadcastKind::Primary, s.x, s.d0_loc};
}

/// Neighbor reaction to a Primary broadcast: overwrite both slots of the
/// sender, recompute g and d0 (x and D do not move), and return the
/// Secondary broadcast carrying the new d0.
template <class S>
Broadcast<S> react_neighbor(AgentState<S>& s, const Broadcast<S>& from, const PenalizedObjective<S>& obj) {
  if (from.kind != BroadcastKind::Primary)
    throw Error(ErrorCode::NotANeighbor, "react_neighbor expects a Primary broadcast");
  if (!s.has_neighbor(from.origin))
    throw Error(ErrorCode::NotANeighbor,
                "agent " + std::to_string(from.origin) + " is not a neighbor of " + std::to_string(s.id));
  auto& slot = s.slot(from.origin);
  slot.x = from.x;
  slot.d0 = from.d0;
  s.g_loc = detail::local_g(obj, s);
  s.d0_loc = -s.g_loc / s.D_loc;
  return {s.id, BroadcastKind::Secondary, s.x, s.d0_loc};
}

/// Passive storage of a neighbor's d0. Nothing else changes.
template <class S>
void store_secondary(AgentState<S>& s, const Broadcast<S>& from) {
  if (!s.has_neighbor(from.origin))
    throw Error(ErrorCode::NotANeighbor,
                "agent " + std::to_string(from.origin) + " is not a neighbor of " + std::to_string(s.id));
  s.slot(from.origin).d0 = from.d0;
}

}  // namespace annewton
