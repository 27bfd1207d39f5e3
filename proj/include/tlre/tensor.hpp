#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "tlre/common.hpp"

namespace tlre {

/// Row-major dense matrix. Vectors are stored as 1 x n tensors.
template <class T>
using Tensor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
using Vector = Eigen::Matrix<T, 1, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
bool all_finite(const Tensor<T>& t) {
  return t.allFinite();
}

/// Debug check: throws when `t` holds NaN or Inf.
template <class T>
void assert_finite(const Tensor<T>& t, const std::string& name) {
  if (!t.allFinite()) throw Error("non-finite values in tensor " + name);
}

template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

}  // namespace tlre
