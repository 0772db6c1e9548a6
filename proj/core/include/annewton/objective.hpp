#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "annewton/error.hpp"
#include "annewton/scalar.hpp"
#include "annewton/topology.hpp"

namespace annewton {

/// Scalar local cost f_i with analytic derivatives and declared constants:
/// m <= f'' <= M and |f''(x) - f''(y)| <= lip |x - y|.
template <class S>
struct LocalFunction {
  std::function<S(const S&)> value;
  std::function<S(const S&)> grad;
  std::function<S(const S&)> hess;
  double m = 0.0;
  double M = 0.0;
  double lip = 0.0;
  std::string label;
};

/// Serializable description of a catalog local function; `make_local`
/// instantiates it at any scalar precision.
struct LocalSpec {
  enum class Kind { Quadratic, LogCoshRidge };
  Kind kind = Kind::Quadratic;
  double a = 1.0;  // curvature / scale
  double b = 0.0;  // center
  double r = 0.0;  // ridge weight (LogCoshRidge only)

  static LocalSpec quadratic(double a, double b) { return {Kind::Quadratic, a, b, 0.0}; }
  static LocalSpec logcosh_ridge(double a, double b, double r) { return {Kind::LogCoshRidge, a, b, r}; }

  std::string describe() const;
  bool operator==(const LocalSpec&) const = default;
};

/// a (x - b)^2; f'' = 2a exactly, so m = M = 2a and lip = 0.
template <class S>
LocalFunction<S> quadratic(double a, double b) {
  if (!(a > 0.0)) throw Error(ErrorCode::NonPositiveCurvature, "quadratic needs a > 0, got " + std::to_string(a));
  const S sa(a), sb(b), two(2);
  LocalFunction<S> f;
  f.value = [=](const S& x) { return sa * (x - sb) * (x - sb); };
  f.grad = [=](const S& x) { return two * sa * (x - sb); };
  f.hess = [=](const S&) { return two * sa; };
  f.m = f.M = 2.0 * a;
  f.lip = 0.0;
  f.label = LocalSpec::quadratic(a, b).describe();
  return f;
}

/// a log cosh(x - b) + (r/2)(x - b)^2. f'' = a sech^2(x - b) + r lies in
/// [r, a + r] and |f'''| <= 4a / (3 sqrt 3).
template <class S>
LocalFunction<S> logcosh_ridge(double a, double b, double r) {
  if (!(a >= 0.0) || !(r > 0.0))
    throw Error(ErrorCode::NonPositiveCurvature, "logcosh_ridge needs a >= 0 and r > 0");
  const S sa(a), sb(b), sr(r), half(0.5), one(1), two(2);
  LocalFunction<S> f;
  f.value = [=](const S& x) {
    using std::abs;
    using std::exp;
    using std::log;
    const S u = abs(x - sb);
    // log cosh u = u + log(1 + e^{-2u}) - log 2, stable for large u.
    return sa * (u + log(one + exp(-two * u)) - log(two)) + half * sr * (x - sb) * (x - sb);
  };
  f.grad = [=](const S& x) {
    using std::tanh;
    return sa * tanh(x - sb) + sr * (x - sb);
  };
  f.hess = [=](const S& x) {
    using std::tanh;
    const S t = tanh(x - sb);
    return sa * (one - t * t) + sr;
  };
  f.m = r;
  f.M = a + r;
  f.lip = 4.0 * a / (3.0 * std::sqrt(3.0));
  f.label = LocalSpec::logcosh_ridge(a, b, r).describe();
  return f;
}

template <class S>
LocalFunction<S> make_local(const LocalSpec& spec) {
  switch (spec.kind) {
    case LocalSpec::Kind::Quadratic: return quadratic<S>(spec.a, spec.b);
    case LocalSpec::Kind::LogCoshRidge: return logcosh_ridge<S>(spec.a, spec.b, spec.r);
  }
  throw Error(ErrorCode::ConfigParse, "unknown local function kind");
}

/// F(x) = 1/2 x'(I - W)x + alpha sum_i f_i(x_i).
template <class S>
class PenalizedObjective {
 public:
  PenalizedObjective(ConsensusNetwork net, double alpha, std::vector<LocalFunction<S>> locals)
      : net_(std::move(net)), alpha_(alpha), locals_(std::move(locals)) {
    if (!(alpha_ > 0.0)) throw Error(ErrorCode::InvalidConstants, "alpha must be positive");
    if (locals_.size() != net_.size())
      throw Error(ErrorCode::DimensionMismatch, "need one local function per agent: got " +
                                                    std::to_string(locals_.size()) + " for " +
                                                    std::to_string(net_.size()) + " agents");
    const auto n = static_cast<Eigen::Index>(net_.size());
    W_ = cast_matrix<S>(net_.W());
    laplacian_ = Mat<S>::Identity(n, n) - W_;
  }

  const ConsensusNetwork& network() const noexcept { return net_; }
  std::size_t size() const noexcept { return net_.size(); }
  double alpha() const noexcept { return alpha_; }
  const S& alpha_s() const noexcept { return alpha_s_; }
  const std::vector<LocalFunction<S>>& locals() const noexcept { return locals_; }
  const LocalFunction<S>& local(std::size_t i) const { return locals_.at(i); }
  /// W and I - W converted to S.
  const Mat<S>& W() const noexcept { return W_; }
  const Mat<S>& I_minus_W() const noexcept { return laplacian_; }

  /// min_i m_i, max_i M_i, max_i lip_i.
  double m() const;
  double M() const;
  double lip() const;

 private:
  ConsensusNetwork net_;
  double alpha_;
  S alpha_s_{alpha_};
  std::vector<LocalFunction<S>> locals_;
  Mat<S> W_;
  Mat<S> laplacian_;
};

template <class S>
double PenalizedObjective<S>::m() const {
  double v = locals_.front().m;
  for (const auto& f : locals_) v = std::min(v, f.m);
  return v;
}

template <class S>
double PenalizedObjective<S>::M() const {
  double v = locals_.front().M;
  for (const auto& f : locals_) v = std::max(v, f.M);
  return v;
}

template <class S>
double PenalizedObjective<S>::lip() const {
  double v = 0.0;
  for (const auto& f : locals_) v = std::max(v, f.lip);
  return v;
}

template <class S>
PenalizedObjective<S> make_objective(const ConsensusNetwork& net, double alpha, const std::vector<LocalSpec>& specs) {
  std::vector<LocalFunction<S>> locals;
  locals.reserve(specs.size());
  for (const auto& s : specs) locals.push_back(make_local<S>(s));
  return PenalizedObjective<S>(net, alpha, std::move(locals));
}

namespace detail {
template <class S>
void check_dim(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  if (static_cast<std::size_t>(x.size()) != obj.size())
    throw Error(ErrorCode::DimensionMismatch,
                "x has length " + std::to_string(x.size()) + ", expected " + std::to_string(obj.size()));
}
}  // namespace detail

template <class S>
S eval_F(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  detail::check_dim(obj, x);
  const S penalty = S(0.5) * x.dot(obj.I_minus_W() * x);
  S local_sum(0);
  for (std::size_t i = 0; i < obj.size(); ++i) local_sum += obj.local(i).value(x[static_cast<Eigen::Index>(i)]);
  return penalty + obj.alpha_s() * local_sum;
}

/// g_i = [(I - W)x]_i + alpha f_i'(x_i).
template <class S>
Vec<S> eval_grad(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  detail::check_dim(obj, x);
  Vec<S> g = obj.I_minus_W() * x;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    g[k] += obj.alpha_s() * obj.local(i).grad(x[k]);
  }
  return g;
}

/// H = I - W + alpha diag(f_i''(x_i)).
template <class S>
Mat<S> eval_hessian(const PenalizedObjective<S>& obj, const Vec<S>& x) {
  detail::check_dim(obj, x);
  Mat<S> H = obj.I_minus_W();
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    H(k, k) += obj.alpha_s() * obj.local(i).hess(x[k]);
  }
  return H;
}

struct AuditViolation {
  std::size_t agent;
  double x;
  double hess;
  std::string what;
};

struct AuditReport {
  std::vector<bool> agent_ok;
  std::vector<AuditViolation> violations;
  bool ok() const {
    for (bool b : agent_ok)
      if (!b) return false;
    return true;
  }
};

/// Samples f_i'' on an evenly spaced grid over [lo, hi] and checks the
/// declared m, M and Hessian-Lipschitz constant on adjacent grid points.
template <class S>
AuditReport audit_assumptions(const PenalizedObjective<S>& obj, double lo, double hi, std::size_t samples) {
  if (!(lo < hi)) throw Error(ErrorCode::EmptyInterval, "audit interval is empty");
  if (samples < 2) throw Error(ErrorCode::InvalidConstants, "audit needs at least 2 samples");
  constexpr double kSlack = 1e-12;
  AuditReport report;
  report.agent_ok.assign(obj.size(), true);
  const double step = (hi - lo) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const auto& f = obj.local(i);
    double prev_x = lo;
    double prev_h = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      const double x = (k + 1 == samples) ? hi : lo + step * static_cast<double>(k);
      const double h = to_double(f.hess(S(x)));
      const double tol = kSlack * std::max(1.0, std::abs(h));
      if (h < f.m - tol) {
        report.agent_ok[i] = false;
        report.violations.push_back({i, x, h, "hess below declared m = " + std::to_string(f.m)});
      }
      if (h > f.M + tol) {
        report.agent_ok[i] = false;
        report.violations.push_back({i, x, h, "hess above declared M = " + std::to_string(f.M)});
      }
      if (k > 0 && std::abs(h - prev_h) > f.lip * (x - prev_x) + tol) {
        report.agent_ok[i] = false;
        report.violations.push_back(
            {i, x, h, "hess changes faster than declared lip = " + std::to_string(f.lip)});
      }
      prev_x = x;
      prev_h = h;
    }
  }
  return report;
}

}  // namespace annewton
