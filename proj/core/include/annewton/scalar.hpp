#pragma once

// Scalar types used by the numeric core. Everything templated on `S` is
// exercised with `double`; `HighPrecision` exists for checks whose
// quantities drop far below double resolution (e.g. a linear-rate envelope
// after thousands of iterations).

#include <cmath>
#include <type_traits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace annewton {

/// 256-bit binary significand (~77 decimal digits).
using HighPrecision = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
double to_double(const S& v) {
  if constexpr (std::is_same_v<S, double>) {
    return v;
  } else {
    return static_cast<double>(v);
  }
}

template <class S>
Vec<double> to_double(const Vec<S>& v) {
  Vec<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

template <class S>
Mat<S> cast_matrix(const Mat<double>& m) {
  Mat<S> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = S(m(i, j));
  return out;
}

}  // namespace annewton
