#pragma once

// Hessian splitting H = D - B and the two-term truncated series inverse
//   Hhat^{-1} = D^{-1} + D^{-1} B D^{-1}
// used to form the approximate Newton direction d = -Hhat^{-1} g.

#include <cmath>
#include <cstddef>

#include "annewton/error.hpp"
#include "annewton/objective.hpp"
#include "annewton/scalar.hpp"

namespace annewton {

template <class S>
struct Splitting {
  /// Diagonal of D: alpha f_i''(x_i) + 2(1 - W_ii).
  Vec<S> D;
  /// B_ii = 1 - W_ii, B_ij = W_ij. Independent of x.
  Mat<S> B;
};

/// Closed-form spectral constants.
///   rho    = 2(1 - delta) / (2(1 - delta) + alpha m)
///   lambda = 1 / (2(1 - delta) + alpha M)
///   Lambda = (1 + rho) / (2(1 - Delta) + alpha m)
struct RateSpectra {
  double rho;
  double lambda;
  double Lambda;
};

inline RateSpectra rate_spectra(double m, double M, double delta, double Delta, double alpha) {
  RateSpectra r{};
  r.rho = 2.0 * (1.0 - delta) / (2.0 * (1.0 - delta) + alpha * m);
  r.lambda = 1.0 / (2.0 * (1.0 - delta) + alpha * M);
  r.Lambda = (1.0 + r.rho) / (2.0 * (1.0 - Delta) + alpha * m);
  return r;
}

template <class S>
RateSpectra rate_spectra(const PenalizedObjective<S>& obj) {
  return rate_spectra(obj.m(), obj.M(), obj.network().delta(), obj.network().Delta(), obj.alpha());
}

/// B = I - 2 W_d + W for a consensus matrix W.
template <class S>
Mat<S> splitting_B(const Mat<S>& W) {
  Mat<S> B = W;
  for (Eigen::Index i = 0; i < W.rows(); ++i) B(i, i) = S(1) - W(i, i);
  return B;
}

/// Diagonal of D only.
template <class S>
Vec<S> diagonal_D(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  detail::check_dim(obj, x);
  const auto n = static_cast<Eigen::Index>(obj.size());
  Vec<S> D(n);
  for (Eigen::Index i = 0; i < n; ++i)
    D[i] = obj.alpha_s() * obj.local(static_cast<std::size_t>(i)).hess(x[i]) + S(2) * (S(1) - obj.W()(i, i));
  return D;
}

template <class S>
Splitting<S> split(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  detail::check_dim(obj, x);
  Splitting<S> s;
  s.D = diagonal_D(obj, x);
  s.B = splitting_B(obj.W());
  return s;
}

/// D^{-1/2} B D^{-1/2}.
template <class S>
Mat<S> normalized_B(const Splitting<S>& s) {
  using std::sqrt;
  const auto n = s.D.size();
  Vec<S> inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt[i] = S(1) / sqrt(s.D[i]);
  return inv_sqrt.asDiagonal() * s.B * inv_sqrt.asDiagonal();
}

/// Hhat^{-1} v = D^{-1} v + D^{-1} B D^{-1} v; never forms the inverse.
template <class S>
Vec<S> approx_inverse_apply(const Splitting<S>& s, const Vec<S>& v) {
  if (v.size() != s.D.size()) throw Error(ErrorCode::DimensionMismatch, "vector length does not match splitting");
  const Vec<S> scaled = v.cwiseQuotient(s.D);
  return scaled + (s.B * scaled).cwiseQuotient(s.D);
}

/// d = -Hhat(x)^{-1} g(x).
template <class S>
Vec<S> newton_direction(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  const Splitting<S> s = split(obj, x);
  return -approx_inverse_apply(s, eval_grad(obj, x));
}

/// Max-abs entry of D^{1/2}(I - Hhat^{-1} H) - (D^{-1/2} B D^{-1/2})^2 D^{1/2}.
template <class S>
S splitting_identity_residual(const Splitting<S>& s, const Mat<S>& H) {
  using std::abs;
  using std::sqrt;
  const auto n = s.D.size();
  if (H.rows() != n || H.cols() != n) throw Error(ErrorCode::DimensionMismatch, "H does not match splitting");
  Vec<S> sqrt_d(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_d[i] = sqrt(s.D[i]);
  Mat<S> approx_inv_H(n, n);
  for (Eigen::Index j = 0; j < n; ++j) approx_inv_H.col(j) = approx_inverse_apply(s, Vec<S>(H.col(j)));
  const Mat<S> lhs = sqrt_d.asDiagonal() * (Mat<S>::Identity(n, n) - approx_inv_H);
  const Mat<S> nb = normalized_B(s);
  const Mat<S> rhs = (nb * nb) * sqrt_d.asDiagonal();
  S worst(0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const S diff = abs(lhs(i, j) - rhs(i, j));
      if (diff > worst) worst = diff;
    }
  return worst;
}

template <class S>
struct ReferenceSolution {
  Vec<S> x_star;
  S F_star;
  S grad_norm;
  int iterations = 0;
};

/// Exact Newton on F with dense solves and a halving line search; for
/// quadratic locals the first full step is exact.
template <class S>
ReferenceSolution<S> reference_solution(const PenalizedObjective<S>& obj, const S& tol, int max_iterations = 200) {
  if (!(tol > S(0))) throw Error(ErrorCode::InvalidConstants, "tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(obj.size());
  ReferenceSolution<S> out;
  out.x_star = Vec<S>::Zero(n);
  S F = eval_F(obj, out.x_star);
  Vec<S> g = eval_grad(obj, out.x_star);
  for (int it = 0; it <= max_iterations; ++it) {
    out.grad_norm = g.norm();
    if (out.grad_norm <= tol) {
      out.F_star = F;
      out.iterations = it;
      return out;
    }
    if (it == max_iterations) break;
    const Mat<S> H = eval_hessian(obj, out.x_star);
    const Vec<S> step = H.ldlt().solve(-g);
    S t(1);
    Vec<S> trial = out.x_star + step;
    S F_trial = eval_F(obj, trial);
    for (int halvings = 0; halvings < 60 && F_trial > F; ++halvings) {
      t /= S(2);
      trial = out.x_star + t * step;
      F_trial = eval_F(obj, trial);
    }
    out.x_star = trial;
    F = F_trial;
    g = eval_grad(obj, out.x_star);
  }
  throw Error(ErrorCode::MaxIterationsExceeded,
              "reference Newton did not reach the gradient tolerance in " + std::to_string(max_iterations) +
                  " iterations");
}

}  // namespace annewton
