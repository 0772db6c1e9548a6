#pragma once

// Discrete-event driver for asynchronous network Newton. Activations are
// counted per iteration: each iteration one agent, drawn uniformly, wakes up
// and runs the protocol in agents.hpp. An optional wall-clock column models
// n independent rate-1 Poisson clocks; it is drawn from a separate stream and
// never influences the dynamics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "annewton/agents.hpp"
#include "annewton/error.hpp"
#include "annewton/objective.hpp"
#include "annewton/rng.hpp"
#include "annewton/scalar.hpp"
#include "annewton/splitting.hpp"

namespace annewton {

enum class StepsizePolicy {
  Theorem1,   // 0 < eps <= 2 (lambda / Lambda)^2
  Theorem2,   // 0 < eps < min{1, 2 (lambda / Lambda)^2}
  Unchecked,  // eps > 0
};

std::string_view to_string(StepsizePolicy p) noexcept;
StepsizePolicy parse_stepsize_policy(std::string_view s);

/// 2 (lambda / Lambda)^2.
inline double max_stepsize(const RateSpectra& r) {
  const double q = r.lambda / r.Lambda;
  return 2.0 * q * q;
}

/// Throws StepsizeInadmissible (reporting the admissible bound) when
/// epsilon violates the policy.
void check_stepsize(double epsilon, const RateSpectra& spectra, StepsizePolicy policy);

struct RunOptions {
  StepsizePolicy policy = StepsizePolicy::Theorem2;
  /// Keep every stride-th trace row (row 0 and the last row always kept).
  std::size_t stride = 1;
  bool timestamps = true;
  /// Test-only: skip the neighbor reaction and secondary propagation, so
  /// caches go stale.
  bool suppress_reactions = false;
};

struct TraceRow {
  long long t = 0;
  std::optional<std::size_t> active;
  double F = 0.0;
  /// F - F*, evaluated at working precision before rounding to double.
  double gap = 0.0;
  double grad_norm = 0.0;
  double rel_err = 0.0;
  std::optional<double> weighted_err;
  std::uint64_t messages = 0;
  std::optional<double> clock;

  bool operator==(const TraceRow&) const = default;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::vector<double> final_x;
  double F_star = 0.0;
};

template <class S>
S default_reference_tolerance() {
  using std::pow;
  const S eps = std::numeric_limits<S>::epsilon();
  const S scaled = pow(eps, S(0.75));
  return scaled < S(1e-10) ? scaled : S(1e-10);
}

template <class S>
struct World {
  std::shared_ptr<const PenalizedObjective<S>> obj;
  std::shared_ptr<const ReferenceSolution<S>> reference;
  std::vector<AgentState<S>> agents;
  S epsilon{0};
  long long iter = 0;
  Rng rng;
  Rng clock_rng;
  double clock = 0.0;
  std::uint64_t msg_count = 0;
  RunOptions options;

  std::size_t size() const noexcept { return agents.size(); }

  Vec<S> x() const {
    Vec<S> v(static_cast<Eigen::Index>(agents.size()));
    for (std::size_t i = 0; i < agents.size(); ++i) v[static_cast<Eigen::Index>(i)] = agents[i].x;
    return v;
  }
};

template <class S>
World<S> make_world(std::shared_ptr<const PenalizedObjective<S>> obj, double epsilon, std::uint64_t seed,
                    const RunOptions& options = {},
                    std::shared_ptr<const ReferenceSolution<S>> reference = nullptr) {
  check_stepsize(epsilon, rate_spectra(*obj), options.policy);
  if (options.stride == 0) throw Error(ErrorCode::InvalidConstants, "stride must be at least 1");
  World<S> w;
  if (!reference)
    reference = std::make_shared<const ReferenceSolution<S>>(reference_solution(*obj, default_reference_tolerance<S>()));
  w.reference = std::move(reference);
  w.agents = init_agents(*obj);
  w.obj = std::move(obj);
  w.epsilon = S(epsilon);
  w.rng = Rng(seed);
  w.clock_rng = Rng(mix_seed(seed));
  w.options = options;
  return w;
}

/// Runs one iteration with agent i forced active. Returns the messages sent:
/// deg(i) Primary plus sum_{j in N_i} deg(j) Secondary.
template <class S>
std::uint64_t activate(World<S>& w, std::size_t i) {
  const auto& obj = *w.obj;
  const auto& net = obj.network();
  ++w.iter;
  auto& active = w.agents.at(i);
  const S d = compute_direction(active, obj);
  apply_step(active, w.epsilon, d, w.iter);
  refresh(active, obj);
  std::uint64_t sent = 0;
  if (!w.options.suppress_reactions) {
    const Broadcast<S> primary = primary_broadcast(active);
    std::vector<Broadcast<S>> secondaries;
    secondaries.reserve(net.neighbors(i).size());
    for (std::size_t j : net.neighbors(i)) {
      secondaries.push_back(react_neighbor(w.agents[j], primary, obj));
      ++sent;
    }
    for (const auto& b : secondaries)
      for (std::size_t l : net.neighbors(b.origin)) {
        store_secondary(w.agents[l], b);
        ++sent;
      }
  }
  w.msg_count += sent;
  if (w.options.timestamps) w.clock += w.clock_rng.exponential(static_cast<double>(w.size()));
  return sent;
}

/// Centralized observation of the current state. `D_prev` is the diagonal
/// of D at the previous iterate.
template <class S>
TraceRow observe(const World<S>& w, std::optional<std::size_t> active, const Vec<S>& D_prev) {
  using std::sqrt;
  const auto& obj = *w.obj;
  const Vec<S> x = w.x();
  // F and g share the product (I - W) x.
  const Vec<S> lx = obj.I_minus_W() * x;
  S local_sum(0);
  Vec<S> g = lx;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    local_sum += obj.local(i).value(x[k]);
    g[k] += obj.alpha_s() * obj.local(i).grad(x[k]);
  }
  const S F = S(0.5) * x.dot(lx) + obj.alpha_s() * local_sum;
  const S gap = F - w.reference->F_star;
  TraceRow row;
  row.t = w.iter;
  row.active = active;
  row.F = to_double(F);
  row.gap = to_double(gap);
  row.grad_norm = to_double(S(g.norm()));
  row.rel_err = w.reference->F_star == S(0) ? std::numeric_limits<double>::quiet_NaN()
                                            : to_double(S(gap / w.reference->F_star));
  const Vec<S> err = x - w.reference->x_star;
  S acc(0);
  for (Eigen::Index i = 0; i < err.size(); ++i) acc += D_prev[i] * err[i] * err[i];
  row.weighted_err = to_double(S(sqrt(acc)));
  row.messages = w.msg_count;
  if (w.options.timestamps) row.clock = w.clock;
  return row;
}

template <class S>
Vec<S> current_D(const World<S>& w) {
  return diagonal_D(*w.obj, w.x());
}

/// Draws the active agent uniformly, runs one iteration and observes it.
template <class S>
TraceRow step(World<S>& w) {
  const Vec<S> D_prev = current_D(w);
  const auto i = static_cast<std::size_t>(w.rng.uniform_index(w.size()));
  activate(w, i);
  return observe(w, i, D_prev);
}

template <class S>
Trace run(std::shared_ptr<const PenalizedObjective<S>> obj, double epsilon, long long iterations,
          std::uint64_t seed, const RunOptions& options = {},
          std::shared_ptr<const ReferenceSolution<S>> reference = nullptr) {
  if (iterations < 0) throw Error(ErrorCode::InvalidConstants, "iteration count must be non-negative");
  World<S> w = make_world(std::move(obj), epsilon, seed, options, std::move(reference));
  Trace trace;
  trace.F_star = to_double(w.reference->F_star);
  trace.rows.push_back(observe(w, std::nullopt, current_D(w)));
  const auto stride = static_cast<long long>(options.stride);
  for (long long t = 1; t <= iterations; ++t) {
    TraceRow row = step(w);
    if (t % stride == 0 || t == iterations) trace.rows.push_back(std::move(row));
  }
  const Vec<double> xf = to_double(w.x());
  trace.final_x.assign(xf.data(), xf.data() + xf.size());
  return trace;
}

struct DescentCheck {
  double lhs = 0.0;  // mean of F over all n possible activations
  double rhs = 0.0;  // F - (eps lambda / n - eps^2 Lambda^2 / (2 n lambda)) ||g||^2
  bool ok = false;
};

inline constexpr double kDescentSlack = 1e-12;

/// Exhaustive conditional expectation of F after the next iteration versus
/// the expected-descent bound.
template <class S>
DescentCheck expected_descent_check(const World<S>& w) {
  const auto& obj = *w.obj;
  const std::size_t n = w.size();
  S total(0);
  for (std::size_t i = 0; i < n; ++i) {
    World<S> trial = w;
    trial.options.timestamps = false;
    activate(trial, i);
    total += eval_F(obj, trial.x());
  }
  const S lhs = total / S(static_cast<double>(n));
  const Vec<S> x = w.x();
  const S F = eval_F(obj, x);
  const S g2 = eval_grad(obj, x).squaredNorm();
  const RateSpectra r = rate_spectra(obj);
  const S eps = w.epsilon, lambda(r.lambda), Lambda(r.Lambda), nn(static_cast<double>(n));
  const S coeff = eps * lambda / nn - eps * eps * Lambda * Lambda / (S(2) * nn * lambda);
  const S rhs = F - coeff * g2;
  DescentCheck out;
  out.lhs = to_double(lhs);
  out.rhs = to_double(rhs);
  out.ok = to_double(S(lhs - rhs)) <= kDescentSlack;
  return out;
}

/// Distance of every agent's locally held quantities from their centralized
/// values at the current x.
struct CoherenceReport {
  double max_direction_error = 0.0;  // |compute_direction(i) + [Hhat^{-1} g]_i|
  double max_gradient_error = 0.0;   // |g_loc(i) - g_i(x)|
  double max_d0_error = 0.0;         // |d0_loc(i) + g_i(x) / D_ii(x)|
  bool caches_exact = true;          // every cached x_j, d0_j == owner's value
};

template <class S>
CoherenceReport coherence_report(const World<S>& w) {
  using std::abs;
  const auto& obj = *w.obj;
  const Vec<S> x = w.x();
  const Vec<S> g = eval_grad(obj, x);
  const Splitting<S> s = split(obj, x);
  const Vec<S> d = -approx_inverse_apply(s, g);
  CoherenceReport rep;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const auto& a = w.agents[i];
    rep.max_direction_error =
        std::max(rep.max_direction_error, to_double(S(abs(compute_direction(a, obj) - d[k]))));
    rep.max_gradient_error = std::max(rep.max_gradient_error, to_double(S(abs(a.g_loc - g[k]))));
    rep.max_d0_error = std::max(rep.max_d0_error, to_double(S(abs(a.d0_loc + g[k] / s.D[k]))));
    for (const auto& slot : a.cache) {
      const auto& owner = w.agents[slot.id];
      if (!(slot.x == owner.x) || !(slot.d0 == owner.d0_loc)) rep.caches_exact = false;
    }
  }
  return rep;
}

struct AggregateRow {
  long long t = 0;
  double mean_gap = 0.0, std_gap = 0.0;
  double mean_rel_err = 0.0, std_rel_err = 0.0;
  double mean_weighted_err = 0.0, std_weighted_err = 0.0;
};

struct Aggregate {
  std::vector<AggregateRow> rows;
  std::size_t trials = 0;
  double F_star = 0.0;
};

namespace detail {

/// Welford accumulator; identical samples yield exactly that sample as mean.
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void push(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  double stddev() const { return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0; }
};

}  // namespace detail

/// R independent runs with seeds base_seed + r. Trials run on up to
/// `threads` workers (0 = hardware concurrency); aggregation visits trials in
/// index order so the result does not depend on scheduling.
template <class S>
Aggregate monte_carlo(std::shared_ptr<const PenalizedObjective<S>> obj, double epsilon, long long iterations,
                      std::size_t trials, std::uint64_t base_seed, const RunOptions& options = {},
                      unsigned threads = 0) {
  if (trials < 1) throw Error(ErrorCode::InvalidConstants, "monte_carlo needs at least one trial");
  check_stepsize(epsilon, rate_spectra(*obj), options.policy);
  auto reference =
      std::make_shared<const ReferenceSolution<S>>(reference_solution(*obj, default_reference_tolerance<S>()));
  RunOptions opts = options;
  opts.timestamps = false;

  std::vector<Trace> traces(trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t r = next++; r < trials; r = next++)
      traces[r] = run<S>(obj, epsilon, iterations, base_seed + r, opts, reference);
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  Aggregate agg;
  agg.trials = trials;
  agg.F_star = to_double(reference->F_star);
  const std::size_t rows = traces.front().rows.size();
  agg.rows.resize(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    detail::RunningStats gap, rel, weighted;
    for (const auto& tr : traces) {
      const auto& row = tr.rows[k];
      gap.push(row.gap);
      rel.push(row.rel_err);
      weighted.push(row.weighted_err.value_or(0.0));
    }
    auto& out = agg.rows[k];
    out.t = traces.front().rows[k].t;
    out.mean_gap = gap.mean;
    out.std_gap = gap.stddev();
    out.mean_rel_err = rel.mean;
    out.std_rel_err = rel.stddev();
    out.mean_weighted_err = weighted.mean;
    out.std_weighted_err = weighted.stddev();
  }
  return agg;
}

}  // namespace annewton
