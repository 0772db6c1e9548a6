#include "annewton/bounds.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "annewton/error.hpp"

namespace annewton {

std::string_view to_string(OnsetStatus s) noexcept {
  switch (s) {
    case OnsetStatus::Finite: return "finite";
    case OnsetStatus::Degenerate: return "degenerate";
    case OnsetStatus::AlwaysSatisfied: return "always_satisfied";
  }
  return "unknown";
}

namespace {

void check_invariants(const ProblemConstants& pc) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConstants, what); };
  if (!(pc.m > 0.0 && pc.m <= pc.M)) fail(fmt::format("need 0 < m <= M (m = {}, M = {})", pc.m, pc.M));
  if (!(pc.L >= 0.0)) fail(fmt::format("need L >= 0 (L = {})", pc.L));
  if (!(pc.delta > 0.0 && pc.delta <= pc.Delta && pc.Delta < 1.0))
    fail(fmt::format("need 0 < delta <= Delta < 1 (delta = {}, Delta = {})", pc.delta, pc.Delta));
  if (!(pc.alpha > 0.0)) fail(fmt::format("need alpha > 0 (alpha = {})", pc.alpha));
  if (pc.n < 2) fail(fmt::format("need n >= 2 (n = {})", pc.n));
  if (!(pc.F_gap0 >= 0.0)) fail(fmt::format("need F_gap0 >= 0 (F_gap0 = {})", pc.F_gap0));
  if (!(pc.epsilon > 0.0)) fail(fmt::format("need epsilon > 0 (epsilon = {})", pc.epsilon));
}

}  // namespace

RateConstantsFull compute_constants(const ProblemConstants& pc, StepsizePolicy policy) {
  check_invariants(pc);
  RateConstantsFull rc;
  const RateSpectra spectra = rate_spectra(pc.m, pc.M, pc.delta, pc.Delta, pc.alpha);
  rc.rho = spectra.rho;
  rc.lambda = spectra.lambda;
  rc.Lambda = spectra.Lambda;
  rc.eps_max = max_stepsize(spectra);

  const double eps = pc.epsilon;
  switch (policy) {
    case StepsizePolicy::Theorem2:
      if (!(eps < std::min(1.0, rc.eps_max)))
        throw Error(ErrorCode::EpsilonTooLarge,
                    fmt::format("epsilon = {} must be < min{{1, eps_max}} = {:.6g}", eps, std::min(1.0, rc.eps_max)));
      break;
    case StepsizePolicy::Theorem1:
    case StepsizePolicy::Unchecked:
      if (eps > rc.eps_max && policy == StepsizePolicy::Theorem1)
        throw Error(ErrorCode::EpsilonTooLarge, fmt::format("epsilon = {} exceeds eps_max = {:.6g}", eps, rc.eps_max));
      if (eps > 1.0)
        throw Error(ErrorCode::EpsilonTooLarge, fmt::format("epsilon = {} > 1; the contraction constants need eps <= 1", eps));
      break;
  }

  const double n = static_cast<double>(pc.n);
  const double lam = rc.lambda, Lam = rc.Lambda;
  const double am = pc.alpha * pc.m;
  const double D_lo = 2.0 * (1.0 - pc.Delta) + am;            // lower bound on D_ii
  const double D_hi = 2.0 * (1.0 - pc.delta) + pc.alpha * pc.M;  // upper bound on D_ii

  rc.beta = am * eps * (2.0 * lam * lam - eps * Lam * Lam) / (n * lam);

  const double contraction = 1.0 - eps + eps * rc.rho * rc.rho;
  rc.Gamma2 = std::sqrt((n - 1.0 + contraction * contraction) / n);
  rc.Gamma1 = n * std::sqrt(D_hi) * pc.alpha * pc.L * eps * Lam / (2.0 * D_lo);
  rc.C1 = std::sqrt(eps * pc.alpha * pc.L * Lam / D_lo);
  rc.C2 = rc.C1 * std::pow(2.0 * n * n / lam * pc.F_gap0, 0.25);

  if (rc.C2 == 0.0) {
    rc.t_bar = std::numeric_limits<double>::infinity();
    rc.onset = OnsetStatus::Degenerate;
  } else {
    const double ratio = (1.0 - rc.Gamma2) / (rc.C2 * rc.Gamma2);
    rc.t_bar = 4.0 * std::log(ratio) / std::log1p(-rc.beta) + 2.0;
    rc.onset = ratio >= 1.0 ? OnsetStatus::AlwaysSatisfied : OnsetStatus::Finite;
  }
  return rc;
}

double gamma_t(const RateConstantsFull& rc, long long t) {
  if (t < 2) throw Error(ErrorCode::InvalidConstants, fmt::format("Gamma(t) needs t >= 2, got {}", t));
  return rc.Gamma2 * (1.0 + rc.C2 * std::pow(1.0 - rc.beta, static_cast<double>(t - 2) / 4.0));
}

double linear_envelope(const RateConstantsFull& rc, const ProblemConstants& pc, long long t) {
  if (t < 0) throw Error(ErrorCode::InvalidConstants, "envelope needs t >= 0");
  return std::pow(1.0 - rc.beta, static_cast<double>(t)) * pc.F_gap0;
}

std::optional<double> theta_upper(const RateConstantsFull& rc, long long t) {
  const double g = gamma_t(rc, t);
  if (!(g < 1.0)) return std::nullopt;
  if (rc.Gamma1 == 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 - g) / (rc.Gamma1 * g);
}

void print_constants_table(std::ostream& out, const ProblemConstants& pc, const RateConstantsFull& rc) {
  auto line = [&](std::string_view name, double v, std::string_view note = {}) {
    out << fmt::format("  {:<10} {:>22.12g}  {}\n", name, v, note);
  };
  out << "inputs\n";
  line("m", pc.m);
  line("M", pc.M);
  line("L", pc.L);
  line("delta", pc.delta);
  line("Delta", pc.Delta);
  line("alpha", pc.alpha);
  line("n", static_cast<double>(pc.n));
  line("epsilon", pc.epsilon);
  line("F_gap0", pc.F_gap0, "F(x(0)) - F*");
  out << "constants\n";
  line("rho", rc.rho, "spectral bound on D^-1/2 B D^-1/2");
  line("lambda", rc.lambda, "lower eigenvalue bound of Hhat^-1");
  line("Lambda", rc.Lambda, "upper eigenvalue bound of Hhat^-1");
  line("eps_max", rc.eps_max, "2 (lambda/Lambda)^2");
  line("beta", rc.beta, "linear rate: E[F - F*] <= (1 - beta)^t gap0");
  line("Gamma1", rc.Gamma1);
  line("Gamma2", rc.Gamma2);
  line("C1", rc.C1);
  line("C2", rc.C2);
  line("t_bar", rc.t_bar, to_string(rc.onset));
  if (rc.onset == OnsetStatus::Degenerate)
    out << "  note: L = 0 or C2 = 0, so Gamma(t) = Gamma2 for all t and the quadratic term vanishes\n";
}

void write_constants_kv(std::ostream& out, const ProblemConstants& pc, const RateConstantsFull& rc) {
  auto kv = [&](std::string_view k, double v) { out << fmt::format("{} = {:.17g}\n", k, v); };
  kv("m", pc.m);
  kv("M", pc.M);
  kv("L", pc.L);
  kv("delta", pc.delta);
  kv("Delta", pc.Delta);
  kv("alpha", pc.alpha);
  out << "n = " << pc.n << '\n';
  kv("epsilon", pc.epsilon);
  kv("F_gap0", pc.F_gap0);
  kv("rho", rc.rho);
  kv("lambda", rc.lambda);
  kv("Lambda", rc.Lambda);
  kv("eps_max", rc.eps_max);
  kv("beta", rc.beta);
  kv("Gamma1", rc.Gamma1);
  kv("Gamma2", rc.Gamma2);
  kv("C1", rc.C1);
  kv("C2", rc.C2);
  kv("t_bar", rc.t_bar);
  out << "onset = " << to_string(rc.onset) << '\n';
}

}  // namespace annewton
