#include "annewton/gossip.hpp"

#include <cmath>
#include <limits>

#include "annewton/error.hpp"

namespace annewton {

void gossip_step(GossipState& state, const std::vector<LocalFunction<double>>& locals, const Graph& graph) {
  const std::size_t n = graph.size();
  if (state.x.size() != n || locals.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "gossip state, locals and graph disagree on n");
  const auto i = static_cast<std::size_t>(state.rng.uniform_index(n));
  const auto& nb = graph.neighbors(i);
  if (nb.empty()) throw Error(ErrorCode::DisconnectedGraph, "gossip agent has no neighbors");
  const std::size_t j = nb[static_cast<std::size_t>(state.rng.uniform_index(nb.size()))];
  const double avg = 0.5 * (state.x[i] + state.x[j]);
  state.x[i] = avg;
  state.x[j] = avg;
  for (std::size_t k : {i, j}) state.x[k] -= state.gamma * locals[k].grad(state.x[k]);
  state.messages += 2;
}

ConsensusOptimum consensus_optimum(const std::vector<LocalFunction<double>>& locals) {
  auto grad = [&](double x) {
    double s = 0.0;
    for (const auto& f : locals) s += f.grad(x);
    return s;
  };
  auto hess = [&](double x) {
    double s = 0.0;
    for (const auto& f : locals) s += f.hess(x);
    return s;
  };
  // Bracket the root of the (strictly increasing) total gradient.
  double lo = -1.0, hi = 1.0;
  while (grad(lo) > 0.0) lo *= 2.0;
  while (grad(hi) < 0.0) hi *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = grad(x);
    if (g == 0.0) break;
    if (g > 0.0) hi = x; else lo = x;
    double next = x - g / hess(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  double F = 0.0;
  for (const auto& f : locals) F += f.value(x);
  return {x, F};
}

Trace gossip_run(const std::vector<LocalFunction<double>>& locals, const Graph& graph, double gamma,
                 long long iterations, std::uint64_t seed, std::size_t stride) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidConstants, "gossip gamma must be positive");
  if (stride == 0) throw Error(ErrorCode::InvalidConstants, "stride must be at least 1");
  const ConsensusOptimum opt = consensus_optimum(locals);
  GossipState st{std::vector<double>(graph.size(), 0.0), gamma, Rng(seed), 0};

  auto observe = [&](long long t, std::optional<std::size_t> active) {
    double F = 0.0, g2 = 0.0;
    for (std::size_t k = 0; k < st.x.size(); ++k) {
      F += locals[k].value(st.x[k]);
      const double g = locals[k].grad(st.x[k]);
      g2 += g * g;
    }
    TraceRow row;
    row.t = t;
    row.active = active;
    row.F = F;
    row.gap = F - opt.F;
    row.grad_norm = std::sqrt(g2);
    row.rel_err = opt.F == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (F - opt.F) / opt.F;
    row.messages = st.messages;
    return row;
  };

  Trace trace;
  trace.F_star = opt.F;
  trace.rows.push_back(observe(0, std::nullopt));
  for (long long t = 1; t <= iterations; ++t) {
    gossip_step(st, locals, graph);
    if (t % static_cast<long long>(stride) == 0 || t == iterations) trace.rows.push_back(observe(t, std::nullopt));
  }
  trace.final_x = st.x;
  return trace;
}

std::optional<long long> settle_time(const Trace& trace, double threshold) {
  std::optional<long long> settled;
  for (auto it = trace.rows.rbegin(); it != trace.rows.rend(); ++it) {
    if (!(std::abs(it->rel_err) <= threshold)) break;
    settled = it->t;
  }
  return settled;
}

}  // namespace annewton
