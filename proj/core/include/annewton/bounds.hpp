#pragma once

// Closed-form convergence constants of asynchronous network Newton.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "annewton/objective.hpp"
#include "annewton/simulator.hpp"
#include "annewton/splitting.hpp"

namespace annewton {

struct ProblemConstants {
  double m = 0.0;
  double M = 0.0;
  double L = 0.0;
  double delta = 0.0;
  double Delta = 0.0;
  double alpha = 0.0;
  std::size_t n = 0;
  double epsilon = 0.0;
  /// F(x(0)) - F*.
  double F_gap0 = 0.0;
};

enum class OnsetStatus {
  Finite,          // t_bar is a finite bound
  Degenerate,      // C2 = 0: Gamma(t) = Gamma2 < 1 for every t
  AlwaysSatisfied  // (1 - Gamma2) / (C2 Gamma2) >= 1: the formula gives t_bar <= 2
};

std::string_view to_string(OnsetStatus s) noexcept;

struct RateConstantsFull {
  double rho = 0.0;
  double lambda = 0.0;
  double Lambda = 0.0;
  double eps_max = 0.0;
  double beta = 0.0;
  double Gamma1 = 0.0;
  double Gamma2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  /// 4 ln((1 - Gamma2) / (C2 Gamma2)) / ln(1 - beta) + 2; +inf when C2 = 0.
  double t_bar = 0.0;
  OnsetStatus onset = OnsetStatus::Finite;
};

/// Evaluates every constant from its closed form. Throws InvalidConstants on
/// a breach of the input invariants and EpsilonTooLarge when epsilon is
/// outside the policy window (theorem2: eps < min{1, eps_max}; theorem1:
/// eps <= eps_max and eps <= 1, which the Gamma2 / C1 formulas need).
RateConstantsFull compute_constants(const ProblemConstants& pc,
                                    StepsizePolicy policy = StepsizePolicy::Theorem2);

/// Gamma(t) = Gamma2 (1 + C2 (1 - beta)^{(t - 2) / 4}), t >= 2.
double gamma_t(const RateConstantsFull& rc, long long t);

/// (1 - beta)^t (F(x(0)) - F*).
double linear_envelope(const RateConstantsFull& rc, const ProblemConstants& pc, long long t);

/// Upper end of the admissible theta window (0, (1 - Gamma(t)) / (Gamma1 Gamma(t))).
/// +inf when Gamma1 = 0; nullopt when Gamma(t) >= 1 (window empty).
std::optional<double> theta_upper(const RateConstantsFull& rc, long long t);

template <class S>
ProblemConstants problem_constants(const PenalizedObjective<S>& obj, double epsilon, double F_gap0) {
  ProblemConstants pc;
  pc.m = obj.m();
  pc.M = obj.M();
  pc.L = obj.lip();
  pc.delta = obj.network().delta();
  pc.Delta = obj.network().Delta();
  pc.alpha = obj.alpha();
  pc.n = obj.size();
  pc.epsilon = epsilon;
  pc.F_gap0 = F_gap0;
  return pc;
}

/// Labeled human-readable table.
void print_constants_table(std::ostream& out, const ProblemConstants& pc, const RateConstantsFull& rc);
/// `key = value` lines, one per constant, full precision.
void write_constants_kv(std::ostream& out, const ProblemConstants& pc, const RateConstantsFull& rc);

}  // namespace annewton
