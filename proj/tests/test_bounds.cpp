#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "annewton/bounds.hpp"
#include "annewton/rng.hpp"
#include "oracles.hpp"

using namespace annewton;

namespace {

ProblemConstants fig1_constants() {
  ProblemConstants pc;
  pc.m = pc.M = 2;
  pc.L = 0;
  pc.delta = pc.Delta = 0.5;
  pc.alpha = 1;
  pc.n = 5;
  pc.epsilon = 0.8;
  pc.F_gap0 = 55.0 - 50.0 / 21;
  return pc;
}

ErrorCode code_of(const ProblemConstants& pc, StepsizePolicy p = StepsizePolicy::Theorem2) {
  try {
    compute_constants(pc, p);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

// Frozen from an exact rational evaluation of the closed forms:
// beta = 208/3375, Gamma2^2 = 8269/10125.
TEST(Bounds, Fig1Values) {
  const auto rc = compute_constants(fig1_constants());
  EXPECT_NEAR(rc.rho, 1.0 / 3, 1e-15);
  EXPECT_NEAR(rc.lambda, 1.0 / 3, 1e-15);
  EXPECT_NEAR(rc.Lambda, 4.0 / 9, 1e-15);
  EXPECT_NEAR(rc.eps_max, 1.125, 1e-15);
  EXPECT_NEAR(rc.beta, 208.0 / 3375, 1e-15);
  EXPECT_NEAR(rc.beta, 0.061630, 1e-6);
  EXPECT_NEAR(rc.Gamma2, std::sqrt(8269.0 / 10125), 1e-15);
  EXPECT_NEAR(rc.Gamma2, 0.9037098, 1e-7);
  EXPECT_EQ(rc.Gamma1, 0.0);
  EXPECT_EQ(rc.C1, 0.0);
  EXPECT_EQ(rc.C2, 0.0);
  EXPECT_EQ(rc.onset, OnsetStatus::Degenerate);
  EXPECT_TRUE(std::isinf(rc.t_bar));
  for (long long t : {2LL, 3LL, 100LL, 10000LL}) EXPECT_EQ(gamma_t(rc, t), rc.Gamma2);
}

TEST(Bounds, MatchesLongDoubleOracle) {
  Rng rng(3);
  int finite = 0;
  for (int k = 0; k < 500; ++k) {
    ProblemConstants pc;
    pc.m = rng.uniform(0.1, 3);
    pc.M = pc.m + rng.uniform(0, 3);
    pc.L = rng.uniform(0, 2);
    pc.delta = rng.uniform(0.05, 0.9);
    pc.Delta = pc.delta + rng.uniform(0, 0.95 - pc.delta);
    pc.alpha = rng.uniform(0.1, 3);
    pc.n = 2 + rng.uniform_index(30);
    pc.F_gap0 = rng.uniform(0.01, 100);
    const auto probe = oracle::constants(pc.m, pc.M, pc.L, pc.delta, pc.Delta, pc.alpha, pc.n, 0.5, pc.F_gap0);
    pc.epsilon = rng.uniform(0.01, 0.99) * std::min(1.0L, probe.eps_max);
    const auto o = oracle::constants(pc.m, pc.M, pc.L, pc.delta, pc.Delta, pc.alpha, pc.n, pc.epsilon, pc.F_gap0);
    const auto rc = compute_constants(pc);
    auto near = [](double a, long double b) { return std::abs(a - static_cast<double>(b)) <= 1e-12 * std::max(1.0, std::abs(a)); };
    EXPECT_TRUE(near(rc.rho, o.rho));
    EXPECT_TRUE(near(rc.lambda, o.lambda));
    EXPECT_TRUE(near(rc.Lambda, o.Lambda));
    EXPECT_TRUE(near(rc.eps_max, o.eps_max));
    EXPECT_TRUE(near(rc.beta, o.beta));
    EXPECT_TRUE(near(rc.Gamma1, o.Gamma1));
    EXPECT_TRUE(near(rc.Gamma2, o.Gamma2));
    EXPECT_TRUE(near(rc.C1, o.C1));
    EXPECT_TRUE(near(rc.C2, o.C2));
    EXPECT_GT(rc.beta, 0.0);
    EXPECT_LT(rc.beta, 1.0);
    EXPECT_LT(rc.Gamma2, 1.0);
    if (rc.onset == OnsetStatus::Finite) {
      ++finite;
      EXPECT_TRUE(near(rc.t_bar, o.t_bar)) << rc.t_bar << " vs " << static_cast<double>(o.t_bar) << " beta " << rc.beta;
      EXPECT_GT(rc.t_bar, 2.0);
    }
  }
  EXPECT_GT(finite, 0);
}

TEST(Bounds, SmallProblemAllFinitePositive) {
  ProblemConstants pc;
  pc.m = pc.M = pc.L = 1;
  pc.delta = pc.Delta = 0.5;
  pc.alpha = 1;
  pc.n = 2;
  pc.epsilon = 0.5;
  pc.F_gap0 = 1;
  const auto rc = compute_constants(pc);
  for (double v : {rc.rho, rc.lambda, rc.Lambda, rc.eps_max, rc.beta, rc.Gamma1, rc.Gamma2, rc.C1, rc.C2}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_LT(rc.beta, 1.0);
  const auto o = oracle::constants(1, 1, 1, 0.5, 0.5, 1, 2, 0.5, 1);
  EXPECT_NEAR(rc.C2, static_cast<double>(o.C2), 1e-14);
}

TEST(Bounds, InputErrors) {
  auto pc = fig1_constants();
  pc.epsilon = 1.2;
  EXPECT_EQ(code_of(pc), ErrorCode::EpsilonTooLarge);
  pc.epsilon = 1.0;
  EXPECT_EQ(code_of(pc), ErrorCode::EpsilonTooLarge);
  EXPECT_EQ(code_of(pc, StepsizePolicy::Theorem1), ErrorCode::Io);  // accepted
  pc = fig1_constants();
  pc.m = 3;
  EXPECT_EQ(code_of(pc), ErrorCode::InvalidConstants);  // m > M
  pc = fig1_constants();
  pc.delta = 1.0;
  EXPECT_EQ(code_of(pc), ErrorCode::InvalidConstants);
  pc = fig1_constants();
  pc.n = 1;
  EXPECT_EQ(code_of(pc), ErrorCode::InvalidConstants);
  pc = fig1_constants();
  pc.alpha = 0;
  EXPECT_EQ(code_of(pc), ErrorCode::InvalidConstants);
}

TEST(Bounds, GammaIsMonotoneToGamma2) {
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    ProblemConstants pc;
    pc.m = rng.uniform(0.5, 2);
    pc.M = pc.m + rng.uniform(0, 1);
    pc.L = rng.uniform(0.1, 2);
    pc.delta = rng.uniform(0.1, 0.6);
    pc.Delta = pc.delta + 0.1;
    pc.alpha = 1;
    pc.n = 4;
    pc.epsilon = 0.5 * std::min(1.0, max_stepsize(rate_spectra(pc.m, pc.M, pc.delta, pc.Delta, pc.alpha)));
    pc.F_gap0 = rng.uniform(0.1, 10);
    const auto rc = compute_constants(pc);
    EXPECT_DOUBLE_EQ(gamma_t(rc, 2), rc.Gamma2 * (1 + rc.C2));
    double prev = gamma_t(rc, 2);
    for (long long t = 3; t <= 10000; ++t) {
      const double g = gamma_t(rc, t);
      ASSERT_LE(g, prev);
      prev = g;
    }
    EXPECT_NEAR(prev, rc.Gamma2, 1e-3 * rc.Gamma2 + rc.Gamma2 * rc.C2 * std::pow(1 - rc.beta, 2499.5));
  }
  EXPECT_THROW(gamma_t(compute_constants(fig1_constants()), 1), Error);
}

TEST(Bounds, EnvelopeAndThetaWindow) {
  const auto pc = fig1_constants();
  const auto rc = compute_constants(pc);
  EXPECT_EQ(linear_envelope(rc, pc, 0), pc.F_gap0);
  EXPECT_NEAR(linear_envelope(rc, pc, 100), pc.F_gap0 * std::exp(100 * std::log(1 - rc.beta)), 1e-12);
  auto flat = rc;
  flat.beta = 0;
  EXPECT_EQ(linear_envelope(flat, pc, 1000), pc.F_gap0);
  EXPECT_TRUE(std::isinf(*theta_upper(rc, 10)));  // Gamma1 = 0
  auto nonquad = pc;
  nonquad.L = 1;
  nonquad.epsilon = 0.5;
  const auto r2 = compute_constants(nonquad);
  const auto th = theta_upper(r2, 100000);
  ASSERT_TRUE(th.has_value());
  EXPECT_NEAR(*th, (1 - gamma_t(r2, 100000)) / (r2.Gamma1 * gamma_t(r2, 100000)), 1e-12);
  RateConstantsFull wide = r2;
  wide.Gamma2 = 0.9;
  wide.C2 = 1.0;
  EXPECT_FALSE(theta_upper(wide, 2).has_value());  // Gamma(2) = 1.8
}

TEST(Bounds, OnsetAlwaysSatisfiedWhenC2Tiny) {
  auto pc = fig1_constants();
  pc.L = 1e-12;
  pc.F_gap0 = 1e-6;
  const auto rc = compute_constants(pc);
  EXPECT_EQ(rc.onset, OnsetStatus::AlwaysSatisfied);
  EXPECT_LE(rc.t_bar, 2.0);
}

TEST(Bounds, ReportsContainConstants) {
  const auto pc = fig1_constants();
  const auto rc = compute_constants(pc);
  std::ostringstream table, kv;
  print_constants_table(table, pc, rc);
  write_constants_kv(kv, pc, rc);
  EXPECT_NE(table.str().find("eps_max"), std::string::npos);
  EXPECT_NE(table.str().find("1.125"), std::string::npos);
  EXPECT_NE(table.str().find("0.0616296"), std::string::npos);
  EXPECT_NE(kv.str().find("beta = 0.061629629629629"), std::string::npos);
  EXPECT_NE(kv.str().find("t_bar = inf"), std::string::npos);
}
