#include "annewton/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "annewton/bounds.hpp"
#include "annewton/gossip.hpp"
#include "annewton/harness.hpp"
#include "annewton/simulator.hpp"
#include "annewton/splitting.hpp"

namespace annewton {

namespace fs = std::filesystem;

bool AcceptanceReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

PenalizedObjective<double> random_quadratic_instance(Rng& rng) {
  const std::size_t n = 2 + rng.uniform_index(29);
  const double p = rng.uniform(0.1, 0.9);
  const Graph g = Graph::erdos_renyi(n, p, rng.next_u64());
  const ConsensusNetwork net = rng.uniform01() < 0.5
                                   ? laplacian_weights(g, rng.uniform(0.1, 0.9) / static_cast<double>(g.max_degree()))
                                   : metropolis_weights(g);
  std::vector<LocalSpec> specs;
  for (std::size_t i = 0; i < n; ++i) specs.push_back(LocalSpec::quadratic(rng.uniform(0.1, 5.0), rng.uniform(-5, 5)));
  return make_objective<double>(net, rng.uniform(0.1, 5.0), specs);
}

namespace {

constexpr std::uint64_t kInstanceSeed = 20240917;
constexpr std::size_t kInstances = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs `body`, timing it and turning library errors into a failed result.
CriterionResult guarded(int id, std::string name, std::string required,
                        const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.required = std::move(required);
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const Error& e) {
    r.passed = false;
    r.measured = e.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

double max_abs_eigen(const Mat<double>& sym) {
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat<double> dense_approx_inverse(const Splitting<double>& s) {
  const Vec<double> dinv = s.D.cwiseInverse();
  Mat<double> Hinv = dinv.asDiagonal() * s.B * dinv.asDiagonal();
  Hinv.diagonal() += dinv;
  return Hinv;
}

Vec<double> random_point(Rng& rng, std::size_t n, double lo, double hi) {
  Vec<double> x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = rng.uniform(lo, hi);
  return x;
}

RunOptions unchecked() {
  RunOptions o;
  o.policy = StepsizePolicy::Unchecked;
  o.timestamps = false;
  return o;
}

}  // namespace

CriterionResult criterion_splitting_identity(const AcceptanceOptions&) {
  return guarded(1, "splitting identity", "max|H - (D - B)| <= 1e-12, residual <= 1e-10, < 10 s", [](auto& r) {
    const auto t0 = Clock::now();
    Rng rng(kInstanceSeed);
    double split_err = 0.0, residual = 0.0;
    for (std::size_t k = 0; k < kInstances; ++k) {
      const auto obj = random_quadratic_instance(rng);
      const Vec<double> x = random_point(rng, obj.size(), -5, 5);
      const Splitting<double> s = split(obj, x);
      const Mat<double> H = eval_hessian(obj, x);
      Mat<double> DmB = -s.B;
      DmB.diagonal() += s.D;
      split_err = std::max(split_err, (H - DmB).cwiseAbs().maxCoeff());
      residual = std::max(residual, splitting_identity_residual(s, H));
    }
    const double secs = seconds_since(t0);
    r.measured = fmt::format("max|H - (D - B)| = {:.3g}, residual = {:.3g} over {} instances, {:.2f} s", split_err,
                             residual, kInstances, secs);
    r.passed = split_err <= 1e-12 && residual <= 1e-10 && secs < 10.0;
  });
}

CriterionResult criterion_spectral_certificates(const AcceptanceOptions&) {
  return guarded(2, "spectral certificates",
                 "radius <= rho + 1e-10, eig(Hhat^-1) in [lambda, Lambda] +- 1e-10, fig1 radius = 1/3 +- 1e-12",
                 [](auto& r) {
                   Rng rng(kInstanceSeed);
                   double radius_excess = -1e300, low_excess = -1e300, high_excess = -1e300;
                   for (std::size_t k = 0; k < kInstances; ++k) {
                     const auto obj = random_quadratic_instance(rng);
                     const Vec<double> x = random_point(rng, obj.size(), -5, 5);
                     const RateSpectra rs = rate_spectra(obj);
                     const Splitting<double> s = split(obj, x);
                     radius_excess = std::max(radius_excess, max_abs_eigen(normalized_B(s)) - rs.rho);
                     Eigen::SelfAdjointEigenSolver<Mat<double>> es(dense_approx_inverse(s), Eigen::EigenvaluesOnly);
                     low_excess = std::max(low_excess, rs.lambda - es.eigenvalues().minCoeff());
                     high_excess = std::max(high_excess, es.eigenvalues().maxCoeff() - rs.Lambda);
                   }
                   const auto fig1 = fig1_objective<double>();
                   const Vec<double> x0 = Vec<double>::Zero(5);
                   const double fig1_radius = max_abs_eigen(normalized_B(split(*fig1, x0)));
                   const double fig1_err = std::abs(fig1_radius - 1.0 / 3.0);
                   r.measured = fmt::format(
                       "max(radius - rho) = {:.3g}, max(lambda - eig_min) = {:.3g}, max(eig_max - Lambda) = {:.3g}, "
                       "fig1 radius = {:.17g}",
                       radius_excess, low_excess, high_excess, fig1_radius);
                   r.passed = radius_excess <= 1e-10 && low_excess <= 1e-10 && high_excess <= 1e-10 &&
                              fig1_err <= 1e-12;
                 });
}

CriterionResult criterion_coherence(const AcceptanceOptions& o) {
  return guarded(3, "coherence", "|d_i + [Hhat^-1 g]_i| <= 1e-12 and exact caches at all 1000 iterations",
                 [&](auto& r) {
                   auto w = make_world<double>(fig1_objective<double>(), o.epsilon, o.seed, unchecked());
                   double worst = 0.0;
                   bool exact = true;
                   for (int t = 0; t <= 1000; ++t) {
                     const CoherenceReport rep = coherence_report(w);
                     worst = std::max(worst, rep.max_direction_error);
                     exact = exact && rep.caches_exact;
                     if (t < 1000) step(w);
                   }
                   r.measured = fmt::format("max direction error = {:.3g}, caches exact = {}", worst, exact);
                   r.passed = worst <= 1e-12 && exact;
                 });
}

CriterionResult criterion_expected_descent(const AcceptanceOptions& o) {
  return guarded(4, "expected descent", "lhs <= rhs + 1e-12 at all 2000 iterates, < 5 s", [&](auto& r) {
    const auto t0 = Clock::now();
    auto w = make_world<double>(fig1_objective<double>(), o.epsilon, o.seed, unchecked());
    double worst = -1e300;
    long long violations = 0;
    for (int t = 0; t < 2000; ++t) {
      const DescentCheck c = expected_descent_check(w);
      worst = std::max(worst, c.lhs - c.rhs);
      if (!c.ok) ++violations;
      step(w);
    }
    const double secs = seconds_since(t0);
    r.measured = fmt::format("max(lhs - rhs) = {:.3g}, violations = {}, {:.2f} s", worst, violations, secs);
    r.passed = violations == 0 && secs < 5.0;
  });
}

CriterionResult criterion_derived_constants(const AcceptanceOptions&) {
  // Exact values of the closed forms at m = M = 2, delta = Delta = 1/2,
  // alpha = 1, n = 5, eps = 4/5: beta = 208/3375, Gamma2^2 = 8269/10125.
  // The commonly quoted Gamma2 = 0.903708 is a rounding slip (the closed form
  // is 0.90370978), so the exact value is the reference here.
  const double beta_ref = 208.0 / 3375.0;
  const double gamma2_ref = std::sqrt(8269.0 / 10125.0);
  return guarded(5, "derived constants",
                 fmt::format("rho = lambda = 1/3, Lambda = 4/9, eps_max = 1.125 (1e-12); beta = {:.6f}, Gamma2 = "
                             "{:.6f} (1e-6) at eps = 0.8",
                             beta_ref, gamma2_ref),
                 [&](auto& r) {
                   const auto obj = fig1_objective<double>();
                   const auto ref = reference_solution(*obj, 1e-12);
                   const double gap0 = eval_F(*obj, Vec<double>(Vec<double>::Zero(5))) - ref.F_star;
                   // The reference values belong to the fig1 stepsize; a forced
                   // epsilon does not apply here.
                   const RateConstantsFull rc = compute_constants(problem_constants(*obj, 0.8, gap0));
                   r.measured = fmt::format("rho = {:.12g}, lambda = {:.12g}, Lambda = {:.12g}, eps_max = {:.12g}, "
                                            "beta = {:.8f}, Gamma2 = {:.8f} (0.903708 would be off by {:.2g})",
                                            rc.rho, rc.lambda, rc.Lambda, rc.eps_max, rc.beta, rc.Gamma2,
                                            std::abs(rc.Gamma2 - 0.903708));
                   r.passed = std::abs(rc.rho - 1.0 / 3.0) <= 1e-12 && std::abs(rc.lambda - 1.0 / 3.0) <= 1e-12 &&
                              std::abs(rc.Lambda - 4.0 / 9.0) <= 1e-12 && std::abs(rc.eps_max - 1.125) <= 1e-12 &&
                              std::abs(rc.beta - 0.061630) <= 1e-6 && std::abs(rc.beta - beta_ref) <= 1e-6 &&
                              std::abs(rc.Gamma2 - gamma2_ref) <= 1e-6;
                 });
}

CriterionResult criterion_linear_envelope(const AcceptanceOptions& o) {
  return guarded(6, "linear-rate envelope",
                 "mean(F - F*) <= (1 - beta)^t (55 - 50/21) for all t <= 2000, R = 200, < 60 s", [&](auto& r) {
                   const auto t0 = Clock::now();
                   constexpr long long T = 2000;
                   constexpr std::size_t R = 200;
                   const auto obj_d = fig1_objective<double>();
                   const auto obj = fig1_objective<HighPrecision>();
                   RunOptions opts;
                   opts.policy = StepsizePolicy::Theorem2;
                   opts.timestamps = false;
                   check_stepsize(o.epsilon, rate_spectra(*obj_d), opts.policy);
                   const Aggregate agg = monte_carlo<HighPrecision>(obj, o.epsilon, T, R, o.seed, opts, o.threads);
                   const double gap0 = agg.rows.front().mean_gap;
                   const RateConstantsFull rc = compute_constants(problem_constants(*obj_d, o.epsilon, gap0));
                   const ProblemConstants pc = problem_constants(*obj_d, o.epsilon, gap0);
                   double worst_ratio = 0.0;
                   long long worst_t = 0, above = 0;
                   std::ostringstream csv;
                   csv << "t,mean_gap,envelope,margin\n";
                   for (const auto& row : agg.rows) {
                     const double env = linear_envelope(rc, pc, row.t);
                     const double ratio = row.mean_gap / env;
                     if (ratio > worst_ratio) {
                       worst_ratio = ratio;
                       worst_t = row.t;
                     }
                     if (!(row.mean_gap <= env)) ++above;
                     csv << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", row.t, row.mean_gap, env, env - row.mean_gap);
                   }
                   if (!o.out_dir.empty()) {
                     fs::create_directories(o.out_dir);
                     std::ofstream((fs::path(o.out_dir) / "envelope_margin.csv").string()) << csv.str();
                   }
                   const double exact_gap0 = 55.0 - 50.0 / 21.0;
                   const double secs = seconds_since(t0);
                   r.measured = fmt::format(
                       "gap0 = {:.17g}, beta = {:.8f}, max mean/envelope = {:.4g} at t = {}, rows above = {}, "
                       "final mean gap = {:.3g} vs envelope {:.3g}, {:.1f} s",
                       gap0, rc.beta, worst_ratio, worst_t, above, agg.rows.back().mean_gap,
                       linear_envelope(rc, pc, agg.rows.back().t), secs);
                   r.passed = above == 0 && std::abs(gap0 - exact_gap0) <= 1e-12 && secs < 60.0;
                 });
}

CriterionResult criterion_almost_sure(const AcceptanceOptions& o) {
  return guarded(7, "almost-sure convergence proxy", "all 50 runs of T = 5000 reach rel_err <= 1e-8, < 30 s",
                 [&](auto& r) {
                   const auto t0 = Clock::now();
                   const auto obj = fig1_objective<double>();
                   const auto ref = std::make_shared<const ReferenceSolution<double>>(
                       reference_solution(*obj, default_reference_tolerance<double>()));
                   std::size_t reached = 0;
                   long long slowest = 0;
                   for (std::size_t k = 0; k < 50; ++k) {
                     const Trace tr = run<double>(obj, o.epsilon, 5000, o.seed + k, unchecked(), ref);
                     const auto hit = std::find_if(tr.rows.begin(), tr.rows.end(),
                                                   [](const TraceRow& row) { return row.rel_err <= 1e-8; });
                     if (hit != tr.rows.end()) {
                       ++reached;
                       slowest = std::max(slowest, hit->t);
                     }
                   }
                   const double secs = seconds_since(t0);
                   r.measured = fmt::format("{}/50 reached, slowest first hit at t = {}, {:.2f} s", reached, slowest,
                                            secs);
                   r.passed = reached == 50 && secs < 30.0;
                 });
}

CriterionResult criterion_fig1_ordering(const AcceptanceOptions& o) {
  return guarded(8, "fig1 ordering vs gossip",
                 "mean iterations to rel_err <= 1e-3: network Newton < gossip (50 seeds)", [&](auto& r) {
                   constexpr long long T_newton = 2000, T_gossip = 5000;
                   constexpr double gamma = 0.05;
                   const auto obj = fig1_objective<double>();
                   const auto ref = std::make_shared<const ReferenceSolution<double>>(
                       reference_solution(*obj, default_reference_tolerance<double>()));
                   std::vector<LocalFunction<double>> locals = obj->locals();
                   const Graph& graph = obj->network().graph();
                   double newton_sum = 0.0, gossip_sum = 0.0;
                   std::size_t censored = 0;
                   for (std::size_t k = 0; k < 50; ++k) {
                     const Trace nt = run<double>(obj, o.epsilon, T_newton, o.seed + k, unchecked(), ref);
                     const Trace gt = gossip_run(locals, graph, gamma, T_gossip, o.seed + k);
                     newton_sum += static_cast<double>(settle_time(nt, 1e-3).value_or(T_newton + 1));
                     const auto gs = settle_time(gt, 1e-3);
                     if (!gs) ++censored;
                     gossip_sum += static_cast<double>(gs.value_or(T_gossip + 1));
                   }
                   const double newton_mean = newton_sum / 50.0, gossip_mean = gossip_sum / 50.0;
                   r.measured = fmt::format(
                       "network Newton {:.2f}, gossip {:.2f} (gamma = {}, {} of 50 never settled by T = {})",
                       newton_mean, gossip_mean, gamma, censored, T_gossip);
                   r.passed = newton_mean < gossip_mean;
                 });
}

CriterionResult criterion_finite_differences(const AcceptanceOptions&) {
  return guarded(9, "finite-difference derivatives",
                 "|grad - central diff| <= 1e-6, |hess - diff(grad)| <= 1e-4 at 50 points", [](auto& r) {
                   Rng rng(kInstanceSeed + 9);
                   std::vector<LocalSpec> specs;
                   for (int i = 0; i < 8; ++i)
                     specs.push_back(i % 2 == 0 ? LocalSpec::quadratic(rng.uniform(0.5, 2.0), rng.uniform(-3, 3))
                                                : LocalSpec::logcosh_ridge(rng.uniform(0.5, 2.0), rng.uniform(-3, 3),
                                                                           rng.uniform(0.1, 1.0)));
                   const auto obj = make_objective<double>(metropolis_weights(Graph::ring(8)), 1.5, specs);
                   constexpr double h = 1e-5;
                   double grad_err = 0.0, hess_err = 0.0;
                   for (int k = 0; k < 50; ++k) {
                     const Vec<double> x = random_point(rng, obj.size(), -4, 4);
                     const Vec<double> g = eval_grad(obj, x);
                     const Mat<double> H = eval_hessian(obj, x);
                     for (Eigen::Index i = 0; i < x.size(); ++i) {
                       Vec<double> xp = x, xm = x;
                       xp[i] += h;
                       xm[i] -= h;
                       const double fd = (eval_F(obj, xp) - eval_F(obj, xm)) / (2 * h);
                       grad_err = std::max(grad_err, std::abs(fd - g[i]));
                       const Vec<double> col = (eval_grad(obj, xp) - eval_grad(obj, xm)) / (2 * h);
                       hess_err = std::max(hess_err, (col - H.col(i)).cwiseAbs().maxCoeff());
                     }
                   }
                   r.measured = fmt::format("max grad error = {:.3g}, max hess error = {:.3g}", grad_err, hess_err);
                   r.passed = grad_err <= 1e-6 && hess_err <= 1e-4;
                 });
}

CriterionResult criterion_determinism(const AcceptanceOptions& o) {
  return guarded(10, "determinism", "identical config and seed give byte-identical trace CSVs", [&](auto& r) {
    const fs::path root =
        fs::temp_directory_path() / fmt::format("annewton-determinism-{}", Clock::now().time_since_epoch().count());
    RunConfig cfg = paper_fig1_config();
    cfg.mode = Mode::Compare;
    cfg.epsilon = o.epsilon;
    cfg.policy = StepsizePolicy::Unchecked;
    cfg.seed = o.seed;
    cfg.iters = 1000;
    cfg.plot = false;
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      if (!in) throw Error(ErrorCode::Io, "missing " + p.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    std::ostringstream sink;
    std::vector<std::string> files;
    for (const char* sub : {"a", "b"}) {
      cfg.out_dir = (root / sub).string();
      if (cli_run(cfg, sink, sink) != 0) throw Error(ErrorCode::Io, "compare run failed: " + sink.str());
    }
    std::size_t identical = 0, bytes = 0;
    for (const char* name : {"newton_trace.csv", "gossip_trace.csv"}) {
      const std::string a = slurp(root / "a" / name), b = slurp(root / "b" / name);
      bytes += a.size();
      if (a == b) ++identical;
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    r.measured = fmt::format("{}/2 trace files identical ({} bytes)", identical, bytes);
    r.passed = identical == 2;
  });
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} [{:>2}] {}: {} | required: {} ({:.2f} s)", r.passed ? "PASS" : "FAIL", r.id, r.name,
                     r.measured, r.required, r.seconds);
}

AcceptanceReport run_acceptance(const AcceptanceOptions& o, std::ostream& log) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  constexpr Fn criteria[] = {
      criterion_splitting_identity, criterion_spectral_certificates, criterion_coherence,
      criterion_expected_descent,   criterion_derived_constants,     criterion_linear_envelope,
      criterion_almost_sure,        criterion_fig1_ordering,         criterion_finite_differences,
      criterion_determinism,
  };
  AcceptanceReport report;
  for (Fn fn : criteria) {
    report.results.push_back(fn(o));
    log << format_result(report.results.back()) << std::endl;
  }
  const auto passed = std::count_if(report.results.begin(), report.results.end(),
                                    [](const CriterionResult& r) { return r.passed; });
  fmt::print(log, "{}/{} criteria passed\n", passed, report.results.size());
  return report;
}

}  // namespace annewton
