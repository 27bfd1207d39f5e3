#pragma once

// Softmax output layer and cross-entropy loss.

#include <cmath>
#include <cstddef>

#include "tlre/tensor.hpp"

namespace tlre {

inline constexpr double kLogFloor = 1e-12;

/// Row-wise softmax with max subtraction.
template <class T>
Tensor<T> softmax_rows(const Tensor<T>& logits) {
  Tensor<T> out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const T mx = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

template <class T>
Vector<T> softmax(const Vector<T>& logits) {
  Tensor<T> m = logits;
  return softmax_rows<T>(m).row(0);
}

/// probs = softmax(W v + b) for a single pooled vector.
template <class T>
Vector<T> head_forward(const Vector<T>& v, const Tensor<T>& W, const Tensor<T>& b) {
  if (W.cols() != v.cols() || b.cols() != W.rows() || b.rows() != 1) {
    throw Error("head_forward: shape mismatch");
  }
  Vector<T> z = v * W.transpose() + b;
  return softmax<T>(z);
}

/// -log(probs[gold] + kLogFloor).
template <class T>
T cross_entropy(const Vector<T>& probs, std::size_t gold) {
  if (gold >= static_cast<std::size_t>(probs.cols())) throw Error("cross_entropy: gold label out of range");
  return -std::log(probs(static_cast<Eigen::Index>(gold)) + T(kLogFloor));
}

}  // namespace tlre
