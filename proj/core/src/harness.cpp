#include "annewton/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "annewton/acceptance.hpp"
#include "annewton/bounds.hpp"
#include "annewton/gossip.hpp"
#include "annewton/simulator.hpp"
#include "annewton/svg_plot.hpp"
#include "annewton/trace_io.hpp"

namespace annewton {

namespace fs = std::filesystem;

void apply_overrides(RunConfig& cfg, const CliOverrides& cli, const char* nn_seed) {
  if (nn_seed != nullptr && *nn_seed != '\0') {
    const std::string_view s(nn_seed);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
      throw Error(ErrorCode::ConfigParse, fmt::format("NN_SEED='{}' is not an unsigned 64-bit integer", s));
    cfg.seed = v;
  }
  if (cli.seed) cfg.seed = *cli.seed;
  if (cli.trials) cfg.trials = *cli.trials;
  if (cli.iters) cfg.iters = *cli.iters;
  if (cli.out) cfg.out_dir = *cli.out;
  if (cli.stride) cfg.stride = *cli.stride;
  if (cli.epsilon) cfg.epsilon = *cli.epsilon;
  if (cfg.trials < 1) throw Error(ErrorCode::ConfigParse, "--trials must be at least 1");
  if (cfg.stride < 1) throw Error(ErrorCode::ConfigParse, "--stride must be at least 1");
  if (cfg.iters < 0) throw Error(ErrorCode::ConfigParse, "--iters must be non-negative");
}

std::string_view remediation(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "add edges until every agent can reach every other agent";
    case ErrorCode::WeightOutOfRange: return "pick kappa below 1 / max degree so every W_ii stays in (0, 1)";
    case ErrorCode::NotSymmetric: return "W must equal its transpose; mirror each weight across the diagonal";
    case ErrorCode::NotRowStochastic: return "rescale W so every row sums to 1";
    case ErrorCode::NegativeEntry: return "W must be entrywise non-negative";
    case ErrorCode::DiagonalOutOfRange: return "every W_ii must lie strictly between 0 and 1";
    case ErrorCode::SparsityMismatch: return "W_ij may be nonzero only on graph edges; check the edge list";
    case ErrorCode::InvalidGraph: return "use at least 2 agents and an edge list without self-loops or duplicates";
    case ErrorCode::NonPositiveCurvature: return "local functions need a strictly positive curvature bound m";
    case ErrorCode::DimensionMismatch: return "list exactly one local function per agent";
    case ErrorCode::EmptyInterval: return "give an interval with lo < hi";
    case ErrorCode::MaxIterationsExceeded: return "the reference solve did not converge; check the local functions";
    case ErrorCode::MissingCacheEntry: return "agent caches must cover every neighbor; re-initialize the agents";
    case ErrorCode::NotANeighbor: return "messages may only arrive from graph neighbors";
    case ErrorCode::StepsizeInadmissible:
      return "lower run.epsilon below the reported bound, or set run.policy to unchecked";
    case ErrorCode::InvalidConstants: return "check alpha > 0, 0 < m <= M and a connected W";
    case ErrorCode::EpsilonTooLarge: return "lower run.epsilon below min{1, eps_max} (see the bounds table)";
    case ErrorCode::ConfigParse: return "fix the config key named above; unknown keys are rejected";
    case ErrorCode::Io: return "check that the path exists and is readable / writable";
  }
  return "";
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
}

std::string out_path(const RunConfig& cfg, const char* name) { return (fs::path(cfg.out_dir) / name).string(); }

RunOptions run_options(const RunConfig& cfg) {
  RunOptions o;
  o.policy = cfg.policy;
  o.stride = cfg.stride;
  o.timestamps = cfg.timestamps;
  return o;
}

PlotSeries series_from(const Trace& tr, std::string label, std::string color, std::string dash, bool absolute) {
  PlotSeries s{std::move(label), std::move(color), std::move(dash), {}, {}};
  for (const auto& r : tr.rows) {
    s.x.push_back(static_cast<double>(r.t));
    s.y.push_back(absolute ? std::abs(r.rel_err) : r.rel_err);
  }
  return s;
}

std::vector<LocalFunction<double>> locals_of(const RunConfig& cfg) {
  std::vector<LocalFunction<double>> v;
  for (const auto& s : cfg.agents) v.push_back(make_local<double>(s));
  return v;
}

int mode_validate(const RunConfig& cfg, std::ostream& out) {
  const auto obj = build_objective<double>(cfg);
  const auto& net = obj->network();
  fmt::print(out, "network: n = {}, edges = {}, delta = {:.6g}, Delta = {:.6g}, lambda_2(I - W) = {:.6g}\n",
             net.size(), net.graph().edges().size(), net.delta(), net.Delta(),
             algebraic_connectivity(Mat<double>::Identity(static_cast<Eigen::Index>(net.size()),
                                                          static_cast<Eigen::Index>(net.size())) -
                                    net.W()));
  fmt::print(out, "objective: alpha = {}, m = {:.6g}, M = {:.6g}, L = {:.6g}\n", obj->alpha(), obj->m(), obj->M(),
             obj->lip());
  double lo = 0.0, hi = 0.0;
  for (const auto& s : cfg.agents) {
    lo = std::min(lo, s.b);
    hi = std::max(hi, s.b);
  }
  const AuditReport audit = audit_assumptions(*obj, lo - 10.0, hi + 10.0, 2001);
  for (const auto& v : audit.violations)
    fmt::print(out, "assumption violation: agent {} at x = {:.6g}: f'' = {:.6g}, {}\n", v.agent, v.x, v.hess, v.what);
  const RateSpectra spectra = rate_spectra(*obj);
  check_stepsize(cfg.epsilon, spectra, cfg.policy);
  fmt::print(out, "stepsize: epsilon = {} admissible under {} (eps_max = {:.6g})\n", cfg.epsilon,
             to_string(cfg.policy), max_stepsize(spectra));
  if (!audit.ok()) {
    fmt::print(out, "validate: FAILED (declared curvature bounds do not hold)\n");
    return 1;
  }
  fmt::print(out, "validate: OK\n");
  return 0;
}

int mode_bounds(const RunConfig& cfg, std::ostream& out) {
  const auto obj = build_objective<double>(cfg);
  const auto ref = reference_solution(*obj, default_reference_tolerance<double>());
  const Vec<double> x0 = Vec<double>::Zero(static_cast<Eigen::Index>(obj->size()));
  const double gap0 = eval_F(*obj, x0) - ref.F_star;
  const ProblemConstants pc = problem_constants(*obj, cfg.epsilon, gap0);
  const RateConstantsFull rc = compute_constants(pc, cfg.policy);
  fmt::print(out, "F(x(0)) = {:.17g}, F* = {:.17g}\n", eval_F(*obj, x0), ref.F_star);
  print_constants_table(out, pc, rc);
  ensure_dir(cfg.out_dir);
  const std::string path = out_path(cfg, "constants.txt");
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  write_constants_kv(file, pc, rc);
  fmt::print(out, "wrote {}\n", path);
  return 0;
}

int mode_run(const RunConfig& cfg, std::ostream& out) {
  const auto obj = build_objective<double>(cfg);
  ensure_dir(cfg.out_dir);
  const RunOptions opts = run_options(cfg);
  if (cfg.trials == 1) {
    const Trace tr = run<double>(obj, cfg.epsilon, cfg.iters, cfg.seed, opts);
    const std::string path = out_path(cfg, "newton_trace.csv");
    write_trace_csv_file(path, tr);
    const auto& last = tr.rows.back();
    fmt::print(out, "t = {}: F = {:.17g}, F* = {:.17g}, rel_err = {:.6g}, messages = {}\nwrote {}\n", last.t,
               last.F, tr.F_star, last.rel_err, last.messages, path);
    if (cfg.plot) {
      PlotSpec spec;
      spec.title = "asynchronous network Newton";
      const std::string svg = out_path(cfg, "newton.svg");
      write_svg_file(svg, spec, {series_from(tr, "network Newton", "#1f77b4", "", false)});
      fmt::print(out, "wrote {}\n", svg);
    }
    return 0;
  }
  const Aggregate agg = monte_carlo<double>(obj, cfg.epsilon, cfg.iters, cfg.trials, cfg.seed, opts);
  const std::string path = out_path(cfg, "aggregate.csv");
  write_aggregate_csv_file(path, agg);
  const auto& last = agg.rows.back();
  fmt::print(out, "{} trials, t = {}: mean gap = {:.6g}, mean rel_err = {:.6g}\nwrote {}\n", agg.trials, last.t,
             last.mean_gap, last.mean_rel_err, path);
  if (cfg.plot) {
    PlotSeries s{"mean over trials", "#1f77b4", "", {}, {}};
    for (const auto& r : agg.rows) {
      s.x.push_back(static_cast<double>(r.t));
      s.y.push_back(r.mean_rel_err);
    }
    PlotSpec spec;
    spec.title = fmt::format("asynchronous network Newton, {} trials", agg.trials);
    const std::string svg = out_path(cfg, "newton.svg");
    write_svg_file(svg, spec, {s});
    fmt::print(out, "wrote {}\n", svg);
  }
  return 0;
}

constexpr double kSettleThreshold = 1e-3;

int mode_compare(const RunConfig& cfg, std::ostream& out) {
  const auto obj = build_objective<double>(cfg);
  const auto locals = locals_of(cfg);
  ensure_dir(cfg.out_dir);
  const RunOptions opts = run_options(cfg);
  Trace newton_first, gossip_first;
  double newton_sum = 0.0, gossip_sum = 0.0;
  std::size_t gossip_censored = 0;
  for (std::size_t r = 0; r < cfg.trials; ++r) {
    const std::uint64_t seed = cfg.seed + r;
    Trace nt = run<double>(obj, cfg.epsilon, cfg.iters, seed, opts);
    Trace gt = gossip_run(locals, obj->network().graph(), cfg.gossip_gamma, cfg.gossip_iters, seed, cfg.stride);
    const auto ns = settle_time(nt, kSettleThreshold);
    const auto gs = settle_time(gt, kSettleThreshold);
    newton_sum += static_cast<double>(ns.value_or(cfg.iters + 1));
    gossip_sum += static_cast<double>(gs.value_or(cfg.gossip_iters + 1));
    if (!gs) ++gossip_censored;
    if (r == 0) {
      newton_first = std::move(nt);
      gossip_first = std::move(gt);
    }
  }
  const auto trials = static_cast<double>(cfg.trials);
  const std::string np = out_path(cfg, "newton_trace.csv");
  const std::string gp = out_path(cfg, "gossip_trace.csv");
  write_trace_csv_file(np, newton_first);
  write_trace_csv_file(gp, gossip_first);
  fmt::print(out, "mean iterations until |rel_err| stays <= {:g} over {} seed(s):\n", kSettleThreshold, cfg.trials);
  fmt::print(out, "  network Newton: {:.2f}\n", newton_sum / trials);
  fmt::print(out, "  gossip (gamma = {}): {:.2f}{}\n", cfg.gossip_gamma, gossip_sum / trials,
             gossip_censored ? fmt::format(" ({} run(s) never settled, counted as {})", gossip_censored,
                                           cfg.gossip_iters + 1)
                             : std::string());
  fmt::print(out, "wrote {}\nwrote {}\n", np, gp);
  if (cfg.plot) {
    PlotSpec spec;
    spec.title = "network Newton vs gossip";
    spec.y_label = "|relative error|";
    const std::string svg = out_path(cfg, "comparison.svg");
    write_svg_file(svg, spec,
                   {series_from(newton_first, "network Newton", "#1f77b4", "", true),
                    series_from(gossip_first, fmt::format("gossip, gamma = {}", cfg.gossip_gamma), "#d62728",
                                "6,4", true)});
    fmt::print(out, "wrote {}\n", svg);
  }
  return 0;
}

int mode_accept(const RunConfig& cfg, std::ostream& out) {
  AcceptanceOptions opts;
  opts.epsilon = cfg.epsilon;
  opts.seed = cfg.seed;
  opts.out_dir = cfg.out_dir;
  const AcceptanceReport report = run_acceptance(opts, out);
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int cli_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.mode) {
      case Mode::Validate: return mode_validate(cfg, out);
      case Mode::Bounds: return mode_bounds(cfg, out);
      case Mode::Run: return mode_run(cfg, out);
      case Mode::Compare: return mode_compare(cfg, out);
      case Mode::Accept: return mode_accept(cfg, out);
    }
  } catch (const Error& e) {
    fmt::print(err, "error: {}\nhint: {}\n", e.what(), remediation(e.code()));
    return 1;
  }
  return 1;
}

}  // namespace annewton
