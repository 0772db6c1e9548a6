#include <cmath>

#include <gtest/gtest.h>

#include "annewton/acceptance.hpp"
#include "annewton/splitting.hpp"
#include "oracles.hpp"

using namespace annewton;

namespace {

PenalizedObjective<double> fig1() { return *fig1_objective<double>(); }

oracle::Dense to_dense(const Mat<double>& m) {
  oracle::Dense d(m.rows(), std::vector<long double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

double max_abs_diff(const oracle::Dense& a, const Mat<double>& b) {
  double worst = 0;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      worst = std::max(worst, std::abs(static_cast<double>(a[i][j]) - b(i, j)));
  return worst;
}

Vec<double> random_vec(Rng& rng, Eigen::Index n) {
  Vec<double> v(n);
  for (auto& x : v) x = rng.uniform(-3, 3);
  return v;
}

}  // namespace

TEST(Splitting, Fig1Entries) {
  const auto s = split(fig1(), Vec<double>(Vec<double>::Zero(5)));
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(s.D[i], 3.0);
    for (int j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(s.B(i, j), i == j ? 0.5 : 0.125);
  }
  const Mat<double> nb = normalized_B(s);
  EXPECT_NEAR(nb(0, 0), 0.5 / 3, 1e-15);
  EXPECT_NEAR(nb(0, 1), 0.125 / 3, 1e-15);
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(nb);
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0 / 3, 1e-12);
}

TEST(Splitting, MetropolisPair) {
  const std::vector<LocalSpec> specs(2, LocalSpec::quadratic(1.0, 0.0));
  const auto obj = make_objective<double>(metropolis_weights(Graph(2, {{0, 1}})), 1.0, specs);
  const auto s = split(obj, Vec<double>(Vec<double>::Zero(2)));
  EXPECT_DOUBLE_EQ(s.D[0], 3.0);
  EXPECT_DOUBLE_EQ(s.D[1], 3.0);
  EXPECT_TRUE(s.B.isApprox(Mat<double>::Constant(2, 2, 0.5)));
}

TEST(Splitting, ApproxInverseOfOnesIsFourNinths) {
  const auto s = split(fig1(), Vec<double>(Vec<double>::Zero(5)));
  const Vec<double> r = approx_inverse_apply(s, Vec<double>(Vec<double>::Ones(5)));
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r[i], 4.0 / 9, 1e-15);
  EXPECT_EQ(approx_inverse_apply(s, Vec<double>(Vec<double>::Zero(5))), Vec<double>::Zero(5));
  EXPECT_THROW(approx_inverse_apply(s, Vec<double>(Vec<double>::Zero(4))), Error);
}

TEST(Splitting, ApproxInverseMatchesDenseOracle) {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const auto n = static_cast<Eigen::Index>(obj.size());
    const auto s = split(obj, random_vec(rng, n));
    std::vector<long double> D(s.D.begin(), s.D.end());
    const auto dense = oracle::approx_inverse(D, to_dense(s.B));
    Mat<double> mine(n, n);
    for (Eigen::Index j = 0; j < n; ++j) mine.col(j) = approx_inverse_apply(s, Vec<double>(Vec<double>::Unit(n, j)));
    EXPECT_LE(max_abs_diff(dense, mine), 1e-14);
  }
}

TEST(NewtonDirection, Fig1AtZero) {
  const auto obj = fig1();
  const Vec<double> d = newton_direction(obj, Vec<double>(Vec<double>::Zero(5)));
  EXPECT_NEAR(d[0], 7.0 / 6, 1e-15);
  // Second form: D^-1 (B d0 - g) with d0 = -D^-1 g.
  const auto s = split(obj, Vec<double>(Vec<double>::Zero(5)));
  const Vec<double> g = eval_grad(obj, Vec<double>(Vec<double>::Zero(5)));
  const Vec<double> d0 = -g.cwiseQuotient(s.D);
  EXPECT_LE((d - (s.B * d0 - g).cwiseQuotient(s.D)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NewtonDirection, VanishesAtOptimum) {
  const auto obj = fig1();
  Vec<double> xs(5);
  for (int i = 0; i < 5; ++i) xs[i] = (16.0 * (i + 1) + 15) / 21;
  EXPECT_LE(newton_direction(obj, xs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(NewtonDirection, TwoFormsAgreeOnRandomInstances) {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const Vec<double> x = random_vec(rng, static_cast<Eigen::Index>(obj.size()));
    const auto s = split(obj, x);
    const Vec<double> g = eval_grad(obj, x);
    const Vec<double> d0 = -g.cwiseQuotient(s.D);
    EXPECT_LE((newton_direction(obj, x) - (s.B * d0 - g).cwiseQuotient(s.D)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(IdentityResidual, Fig1AndRandom) {
  const auto obj = fig1();
  const Vec<double> x0 = Vec<double>::Zero(5);
  EXPECT_LE(splitting_identity_residual(split(obj, x0), eval_hessian(obj, x0)), 1e-12);
  Rng rng(10);
  for (int k = 0; k < 100; ++k) {
    const Graph g = Graph::erdos_renyi(10, rng.uniform(0.2, 0.8), rng.next_u64());
    std::vector<LocalSpec> specs;
    for (int i = 0; i < 10; ++i) specs.push_back(LocalSpec::logcosh_ridge(rng.uniform(0, 3), rng.uniform(-2, 2), 0.4));
    const auto o = make_objective<double>(metropolis_weights(g), rng.uniform(0.2, 3), specs);
    const Vec<double> x = random_vec(rng, 10);
    EXPECT_LE(splitting_identity_residual(split(o, x), eval_hessian(o, x)), 1e-10);
  }
}

TEST(IdentityResidual, ZeroBGivesExactInverse) {
  const auto obj = fig1();
  const Vec<double> x0 = Vec<double>::Zero(5);
  auto s = split(obj, x0);
  s.B.setZero();
  // With B = 0 the consistent H is D itself, so both sides vanish.
  const Mat<double> H = s.D.asDiagonal();
  EXPECT_EQ(splitting_identity_residual(s, H), 0.0);
}

TEST(IdentityResidual, DetectsWrongHessian) {
  const auto obj = fig1();
  const Vec<double> x0 = Vec<double>::Zero(5);
  Mat<double> H = eval_hessian(obj, x0);
  H(0, 0) += 0.1;
  EXPECT_GT(splitting_identity_residual(split(obj, x0), H), 1e-3);
}

TEST(Truncation, MoreTermsContractFurther) {
  // H^-1 = sum_k (D^-1 B)^k D^-1; the error of the K-term truncation in the
  // D-norm is ||(D^-1/2 B D^-1/2)^K||, so it shrinks with K. The two-term
  // truncation is the one the algorithm uses.
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto obj = random_quadratic_instance(rng);
    const auto n = static_cast<Eigen::Index>(obj.size());
    const Vec<double> x = random_vec(rng, n);
    const auto s = split(obj, x);
    const Mat<double> H = eval_hessian(obj, x);
    const Vec<double> dinv = s.D.cwiseInverse();
    Mat<double> term = dinv.asDiagonal();
    Mat<double> approx = term;
    double prev = 1e300;
    for (int K = 1; K <= 6; ++K) {
      const Mat<double> sq = s.D.cwiseSqrt().asDiagonal() * (Mat<double>::Identity(n, n) - approx * H) *
                             s.D.cwiseSqrt().cwiseInverse().asDiagonal();
      const double err = sq.operatorNorm();
      EXPECT_LE(err, prev + 1e-12);
      if (K == 2) {
        Mat<double> two(n, n);
        for (Eigen::Index j = 0; j < n; ++j) two.col(j) = approx_inverse_apply(s, Vec<double>(Vec<double>::Unit(n, j)));
        EXPECT_LE((two - approx).cwiseAbs().maxCoeff(), 1e-13);
      }
      prev = err;
      term = dinv.asDiagonal() * s.B * term;
      approx += term;
    }
  }
}

TEST(RateSpectra, Fig1) {
  const auto r = rate_spectra(fig1());
  EXPECT_DOUBLE_EQ(r.rho, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.lambda, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.Lambda, 4.0 / 9);
}

TEST(RateSpectra, RayleighQuotientsWithinBounds) {
  Rng rng(33);
  for (int k = 0; k < 30; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const auto n = static_cast<Eigen::Index>(obj.size());
    const auto s = split(obj, random_vec(rng, n));
    const auto r = rate_spectra(obj);
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(normalized_B(s));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LE(es.eigenvalues().maxCoeff(), r.rho + 1e-10);
    for (int t = 0; t < 10; ++t) {
      const Vec<double> v = random_vec(rng, n);
      const double q = v.dot(approx_inverse_apply(s, v)) / v.squaredNorm();
      EXPECT_GE(q, r.lambda - 1e-10);
      EXPECT_LE(q, r.Lambda + 1e-10);
    }
  }
}

TEST(ReferenceSolution, Fig1) {
  const auto ref = reference_solution(fig1(), 1e-12);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ref.x_star[i], (16.0 * (i + 1) + 15) / 21, 1e-12);
  EXPECT_NEAR(ref.F_star, 50.0 / 21, 1e-12);
  EXPECT_LE(ref.grad_norm, 1e-12);
}

TEST(ReferenceSolution, CommonCenterGivesZero) {
  const auto obj = make_objective<double>(metropolis_weights(Graph::star(5)), 1.0,
                                          std::vector<LocalSpec>(5, LocalSpec::quadratic(2.0, -1.5)));
  const auto ref = reference_solution(obj, 1e-12);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ref.x_star[i], -1.5, 1e-12);
  EXPECT_NEAR(ref.F_star, 0.0, 1e-14);
}

TEST(ReferenceSolution, RandomQuadraticsMatchDenseSolve) {
  Rng rng(44);
  for (int k = 0; k < 20; ++k) {
    const auto obj = random_quadratic_instance(rng);
    const auto n = static_cast<Eigen::Index>(obj.size());
    const auto ref = reference_solution(obj, 1e-11);
    EXPECT_LE(eval_grad(obj, ref.x_star).norm(), 1e-10);
    // H x* = -g(0) for quadratics, solved by elimination.
    const Vec<double> g0 = eval_grad(obj, Vec<double>(Vec<double>::Zero(n)));
    std::vector<long double> rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = -g0[i];
    const auto xs = oracle::solve(to_dense(eval_hessian(obj, Vec<double>(Vec<double>::Zero(n)))), rhs);
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(ref.x_star[i], static_cast<double>(xs[i]), 1e-9);
  }
}

TEST(ReferenceSolution, NonQuadraticConverges) {
  std::vector<LocalSpec> specs;
  for (int i = 0; i < 6; ++i) specs.push_back(LocalSpec::logcosh_ridge(3.0, i - 2.5, 0.05));
  const auto obj = make_objective<double>(metropolis_weights(Graph::ring(6)), 2.0, specs);
  const auto ref = reference_solution(obj, 1e-11);
  EXPECT_LE(eval_grad(obj, ref.x_star).norm(), 1e-10);
}
