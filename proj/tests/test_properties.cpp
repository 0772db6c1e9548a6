#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "annewton/acceptance.hpp"
#include "annewton/bounds.hpp"
#include "annewton/gossip.hpp"
#include "annewton/simulator.hpp"
#include "annewton/splitting.hpp"

using namespace annewton;

namespace {

constexpr int kInstances = 100;

Eigen::VectorXd sym_eigs(const Eigen::MatrixXd& A) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

Eigen::VectorXd random_point(Rng& rng, std::size_t n) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-10.0, 10.0);
  return x;
}

}  // namespace

TEST(Properties, WeightMatrices) {
  Rng rng(101);
  for (int k = 0; k < kInstances; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const Eigen::MatrixXd& W = obj.network().W();
    const auto n = W.rows();
    EXPECT_LE((W - W.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((W.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_GE(W.minCoeff(), 0.0);
    const Eigen::VectorXd ev = sym_eigs(W);
    EXPECT_GT(ev.minCoeff(), -1.0);
    EXPECT_NEAR(ev[n - 1], 1.0, 1e-12);
    if (n > 1) EXPECT_LT(ev[n - 2], 1.0 - 1e-10);
    EXPECT_GT(obj.network().delta(), 0.0);
    EXPECT_LE(obj.network().Delta(), W.diagonal().maxCoeff());
    EXPECT_LT(obj.network().Delta(), 1.0);
  }
}

TEST(Properties, HessianAndSplittingSpectra) {
  Rng rng(202);
  for (int k = 0; k < kInstances; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const std::size_t n = obj.size();
    const double a = obj.alpha(), m = obj.m(), M = obj.M();
    const double delta = obj.network().delta(), Delta = obj.network().Delta();
    const Eigen::VectorXd x = random_point(rng, n);
    const Eigen::MatrixXd H = eval_hessian(obj, x);
    const auto s = split(obj, x);
    const RateSpectra r = rate_spectra(obj);
    const double tol = 1e-10;

    Eigen::MatrixXd DminusB = -s.B;
    DminusB.diagonal() += s.D;
    EXPECT_LE((H - DminusB).cwiseAbs().maxCoeff(), 1e-12);

    const Eigen::VectorXd eh = sym_eigs(H);
    EXPECT_GE(eh.minCoeff(), a * m - tol);
    EXPECT_LE(eh.maxCoeff(), 2 * (1 - delta) + a * M + tol);
    EXPECT_GE(s.D.minCoeff(), 2 * (1 - Delta) + a * m - tol);
    EXPECT_LE(s.D.maxCoeff(), 2 * (1 - delta) + a * M + tol);
    const Eigen::VectorXd eb = sym_eigs(s.B);
    EXPECT_GE(eb.minCoeff(), -tol);
    EXPECT_LE(eb.maxCoeff(), 2 * (1 - delta) + tol);

    const Eigen::VectorXd enb = sym_eigs(normalized_B(s));
    EXPECT_GE(enb.minCoeff(), -tol);
    EXPECT_LE(enb.maxCoeff(), r.rho + tol);
    EXPECT_LT(r.rho, 1.0);

    const Eigen::VectorXd dinv = s.D.cwiseInverse();
    const Eigen::MatrixXd Hhat_inv =
        Eigen::MatrixXd(dinv.asDiagonal()) + dinv.asDiagonal() * s.B * dinv.asDiagonal();
    const Eigen::VectorXd ei = sym_eigs(Hhat_inv);
    EXPECT_GE(ei.minCoeff(), r.lambda - tol);
    EXPECT_LE(ei.maxCoeff(), r.Lambda + tol);

    EXPECT_LE(splitting_identity_residual(s, H), 1e-10);
  }
}

TEST(Properties, ConstantsWindow) {
  Rng rng(303);
  for (int k = 0; k < kInstances; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const RateSpectra r = rate_spectra(obj);
    const double cap = std::min(1.0, max_stepsize(r));
    const double eps = rng.uniform(0.01, 0.99) * cap;
    const auto c = compute_constants(problem_constants(obj, eps, 1.0));
    const double n = static_cast<double>(obj.size());
    EXPECT_GT(c.beta, 0.0);
    EXPECT_LT(c.beta, 2.0 / n);
    EXPECT_LT(c.Gamma2, 1.0);
    EXPECT_DOUBLE_EQ(c.eps_max, max_stepsize(r));
    EXPECT_DOUBLE_EQ(c.rho, r.rho);

    // beta changes sign exactly at eps_max.
    ProblemConstants pc = problem_constants(obj, 0.0, 1.0);
    const double sign_above = 2 * r.lambda * r.lambda - 1.01 * c.eps_max * r.Lambda * r.Lambda;
    EXPECT_LT(sign_above, 0.0);
    pc.epsilon = 1.01 * c.eps_max;
    EXPECT_THROW(compute_constants(pc, StepsizePolicy::Theorem2), Error);
  }
}

TEST(Properties, SimulatedRunsOnRandomInstances) {
  Rng rng(404);
  for (int k = 0; k < 12; ++k) {
    auto obj = std::make_shared<const PenalizedObjective<double>>(random_quadratic_instance(rng));
    const double eps = 0.9 * std::min(1.0, max_stepsize(rate_spectra(*obj)));
    auto w = make_world(obj, eps, 1000 + k);
    const std::size_t n = obj->size();
    for (int t = 0; t < 150; ++t) {
      const auto dc = expected_descent_check(w);
      ASSERT_TRUE(dc.ok) << "instance " << k << " t " << t << ": " << dc.lhs << " > " << dc.rhs;
      const Eigen::VectorXd before = w.x();
      const std::uint64_t msgs_before = w.msg_count;
      const TraceRow row = step(w);
      ASSERT_TRUE(row.active.has_value());
      const std::size_t i = *row.active;
      const Eigen::VectorXd diff = w.x() - before;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) ASSERT_EQ(diff[static_cast<Eigen::Index>(j)], 0.0);

      std::uint64_t expected_msgs = obj->network().graph().degree(i);
      for (std::size_t j : obj->network().neighbors(i)) expected_msgs += obj->network().graph().degree(j);
      ASSERT_EQ(w.msg_count - msgs_before, expected_msgs);

      const auto rep = coherence_report(w);
      ASSERT_TRUE(rep.caches_exact);
      ASSERT_LE(rep.max_direction_error, 1e-12);
      ASSERT_LE(rep.max_gradient_error, 1e-12);
      ASSERT_TRUE(std::isfinite(row.F));
    }
  }
}

TEST(Properties, GossipPureAveragingPreservesSum) {
  Rng rng(505);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 2 + rng.uniform_index(20);
    const Graph g = Graph::erdos_renyi(n, 0.4, rng.next_u64());
    std::vector<LocalFunction<double>> locals;
    for (std::size_t i = 0; i < n; ++i) locals.push_back(quadratic<double>(1.0, static_cast<double>(i)));
    GossipState st{{}, 0.0, Rng(rng.next_u64())};
    for (std::size_t i = 0; i < n; ++i) st.x.push_back(rng.uniform(-1.0, 1.0) * 0.5);
    double sum0 = 0.0;
    for (double v : st.x) sum0 += v;
    for (int t = 0; t < 200; ++t) {
      gossip_step(st, locals, g);
      double sum = 0.0;
      for (double v : st.x) sum += v;
      ASSERT_NEAR(sum, sum0, 1e-13);
    }
  }
}
