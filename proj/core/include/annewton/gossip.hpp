#pragma once

// Randomized pairwise gossip with local gradient steps, used as the
// comparison baseline. It targets the unpenalized consensus problem
// min sum_i f_i(x) and is scored against that problem's own optimum.

#include <cstdint>
#include <vector>

#include "annewton/objective.hpp"
#include "annewton/rng.hpp"
#include "annewton/simulator.hpp"
#include "annewton/topology.hpp"

namespace annewton {

struct GossipState {
  std::vector<double> x;
  double gamma = 0.05;
  Rng rng;
  std::uint64_t messages = 0;
};

/// Picks i uniformly, then a neighbor j of i uniformly; both move to their
/// average, then each takes x_k <- x_k - gamma f_k'(x_k).
void gossip_step(GossipState& state, const std::vector<LocalFunction<double>>& locals, const Graph& graph);

struct ConsensusOptimum {
  double x = 0.0;
  double F = 0.0;
};

/// min_x sum_i f_i(x) by scalar Newton with bisection fallback.
ConsensusOptimum consensus_optimum(const std::vector<LocalFunction<double>>& locals);

/// Trace rows carry F = sum_i f_i(x_i) and rel_err = (F - F_c*) / F_c*
/// (signed: x off consensus can undercut F_c*). weighted_err and clock are
/// left empty.
Trace gossip_run(const std::vector<LocalFunction<double>>& locals, const Graph& graph, double gamma,
                 long long iterations, std::uint64_t seed, std::size_t stride = 1);

/// First index t such that |rel_err| <= threshold at every recorded row from
/// t on; nullopt when the trace never settles below the threshold.
std::optional<long long> settle_time(const Trace& trace, double threshold);

}  // namespace annewton
