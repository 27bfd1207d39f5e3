#pragma once

// Vanilla (non-peephole) LSTM, bidirectional encoding with masked max-pooling
// over time, and the exact backward pass for both.
//
// Gate blocks are stacked in the order input, forget, output, candidate:
//   rows [0,h) input, [h,2h) forget, [2h,3h) output, [3h,4h) candidate.

#include <cstddef>
#include <span>
#include <vector>

#include "tlre/tensor.hpp"

namespace tlre {

template <class T>
struct LstmDirection {
  Tensor<T> W;  // 4h x d_in
  Tensor<T> U;  // 4h x h
  Tensor<T> b;  // 1 x 4h

  Eigen::Index hidden() const { return U.cols(); }
  Eigen::Index input_dim() const { return W.cols(); }

  void check() const {
    const auto h = hidden();
    if (W.rows() != 4 * h || U.rows() != 4 * h || b.rows() != 1 || b.cols() != 4 * h) {
      throw Error("LSTM parameter shapes are inconsistent");
    }
  }
};

template <class T>
struct BiLstmParams {
  LstmDirection<T> fwd;
  LstmDirection<T> bwd;

  Eigen::Index hidden() const { return fwd.hidden(); }
};

template <class T>
struct CellStep {
  Vector<T> h;
  Vector<T> c;
  Vector<T> gates;  // post-activation i, f, o, g
  Vector<T> preactivation;
};

/// One step of the cell for a single input vector.
template <class T>
CellStep<T> lstm_cell_forward(const Vector<T>& x, const Vector<T>& h_prev, const Vector<T>& c_prev,
                              const LstmDirection<T>& p) {
  p.check();
  const auto h = p.hidden();
  if (x.cols() != p.input_dim() || h_prev.cols() != h || c_prev.cols() != h) {
    throw Error("lstm_cell_forward: shape mismatch");
  }
  CellStep<T> s;
  s.preactivation = x * p.W.transpose() + h_prev * p.U.transpose() + p.b;
  s.gates.resize(4 * h);
  for (Eigen::Index j = 0; j < 3 * h; ++j) s.gates(j) = sigmoid(s.preactivation(j));
  for (Eigen::Index j = 3 * h; j < 4 * h; ++j) s.gates(j) = std::tanh(s.preactivation(j));
  s.c = s.gates.segment(h, h).cwiseProduct(c_prev) + s.gates.segment(0, h).cwiseProduct(s.gates.segment(3 * h, h));
  s.h = s.gates.segment(2 * h, h).cwiseProduct(s.c.array().tanh().matrix());
  return s;
}

/// Per-direction activations for a padded batch. Row t * batch + b holds
/// sequence b at time t.
template <class T>
struct DirectionCache {
  Tensor<T> gates;        // post-activation, 4h wide
  Tensor<T> cell;         // c_t after masking
  Tensor<T> cell_tanh;    // tanh(c_t)
  Tensor<T> hidden;       // h_t after masking
  Tensor<T> hidden_prev;  // state entering step t (in this direction's order)
  Tensor<T> cell_prev;
};

template <class T>
struct EncoderCache {
  Eigen::Index batch = 0;
  Eigen::Index steps = 0;
  std::vector<int> lengths;
  Tensor<T> inputs;  // (steps * batch) x d_in
  DirectionCache<T> fwd;
  DirectionCache<T> bwd;
  Tensor<T> pooled;             // batch x 2h
  std::vector<int> argmax_step;  // batch x 2h, row-major

  bool valid(Eigen::Index t, Eigen::Index b) const { return t < lengths[static_cast<std::size_t>(b)]; }
};

namespace detail {

template <class T>
void run_direction(const LstmDirection<T>& p, const Tensor<T>& inputs, const EncoderCache<T>& shape,
                   bool reverse, DirectionCache<T>& out) {
  const auto B = shape.batch;
  const auto S = shape.steps;
  const auto h = p.hidden();
  const Tensor<T> projected = inputs * p.W.transpose();
  out.gates.resize(S * B, 4 * h);
  out.cell.resize(S * B, h);
  out.cell_tanh.resize(S * B, h);
  out.hidden.resize(S * B, h);
  out.hidden_prev.resize(S * B, h);
  out.cell_prev.resize(S * B, h);

  Tensor<T> H = Tensor<T>::Zero(B, h);
  Tensor<T> C = Tensor<T>::Zero(B, h);
  Tensor<T> pre(B, 4 * h);
  for (Eigen::Index k = 0; k < S; ++k) {
    const Eigen::Index t = reverse ? S - 1 - k : k;
    const Eigen::Index r0 = t * B;
    pre.noalias() = projected.middleRows(r0, B);
    pre.noalias() += H * p.U.transpose();
    pre.rowwise() += p.b.row(0);

    out.hidden_prev.middleRows(r0, B) = H;
    out.cell_prev.middleRows(r0, B) = C;
    auto gates = out.gates.middleRows(r0, B);
    gates.leftCols(3 * h) = pre.leftCols(3 * h).unaryExpr([](T v) { return sigmoid(v); });
    gates.rightCols(h) = pre.rightCols(h).array().tanh().matrix();

    C = gates.middleCols(h, h).cwiseProduct(C) + gates.leftCols(h).cwiseProduct(gates.rightCols(h));
    out.cell_tanh.middleRows(r0, B) = C.array().tanh().matrix();
    H = gates.middleCols(2 * h, h).cwiseProduct(out.cell_tanh.middleRows(r0, B));
    for (Eigen::Index b = 0; b < B; ++b) {
      if (!shape.valid(t, b)) {
        H.row(b).setZero();
        C.row(b).setZero();
      }
    }
    out.cell.middleRows(r0, B) = C;
    out.hidden.middleRows(r0, B) = H;
  }
}

/// Backpropagates d(hidden) for one direction. Accumulates into `grad` and
/// returns the gradient w.r.t. `inputs`.
template <class T>
Tensor<T> backprop_direction(const LstmDirection<T>& p, const Tensor<T>& inputs,
                             const EncoderCache<T>& shape, const DirectionCache<T>& cache,
                             bool reverse, const Tensor<T>& d_hidden, LstmDirection<T>& grad) {
  const auto B = shape.batch;
  const auto S = shape.steps;
  const auto h = p.hidden();
  Tensor<T> d_pre = Tensor<T>::Zero(S * B, 4 * h);
  Tensor<T> dh_next = Tensor<T>::Zero(B, h);
  Tensor<T> dc_next = Tensor<T>::Zero(B, h);
  Tensor<T> dh(B, h), dc(B, h);

  for (Eigen::Index k = S - 1; k >= 0; --k) {
    const Eigen::Index t = reverse ? S - 1 - k : k;
    const Eigen::Index r0 = t * B;
    dh = d_hidden.middleRows(r0, B) + dh_next;
    dc = dc_next;
    for (Eigen::Index b = 0; b < B; ++b) {
      if (!shape.valid(t, b)) {
        dh.row(b).setZero();
        dc.row(b).setZero();
      }
    }
    const auto gates = cache.gates.middleRows(r0, B);
    const auto ig = gates.leftCols(h).array();
    const auto fg = gates.middleCols(h, h).array();
    const auto og = gates.middleCols(2 * h, h).array();
    const auto gg = gates.rightCols(h).array();
    const auto tc = cache.cell_tanh.middleRows(r0, B).array();
    const auto cp = cache.cell_prev.middleRows(r0, B).array();

    dc.array() += dh.array() * og * (T(1) - tc * tc);
    auto dp = d_pre.middleRows(r0, B);
    dp.leftCols(h).array() = dc.array() * gg * ig * (T(1) - ig);
    dp.middleCols(h, h).array() = dc.array() * cp * fg * (T(1) - fg);
    dp.middleCols(2 * h, h).array() = dh.array() * tc * og * (T(1) - og);
    dp.rightCols(h).array() = dc.array() * ig * (T(1) - gg * gg);

    dc_next = (dc.array() * fg).matrix();
    dh_next.noalias() = dp * p.U;
  }
  grad.W.noalias() += d_pre.transpose() * inputs;
  grad.U.noalias() += d_pre.transpose() * cache.hidden_prev;
  grad.b += d_pre.colwise().sum();
  Tensor<T> d_inputs = d_pre * p.W;
  return d_inputs;
}

}  // namespace detail

/// Encodes a padded batch. `inputs` rows are ordered time-major
/// (row t * batch + b); steps at or beyond a sequence's length are padding and
/// never influence its pooled vector.
template <class T>
EncoderCache<T> encoder_forward(const BiLstmParams<T>& p, Tensor<T> inputs, std::vector<int> lengths) {
  p.fwd.check();
  p.bwd.check();
  EncoderCache<T> cache;
  cache.batch = static_cast<Eigen::Index>(lengths.size());
  if (cache.batch == 0) throw Error("encoder_forward: empty batch");
  if (inputs.rows() % cache.batch != 0) throw Error("encoder_forward: inputs not a whole number of steps");
  cache.steps = inputs.rows() / cache.batch;
  for (int len : lengths) {
    if (len < 1 || len > cache.steps) throw Error("encoder_forward: valid length must lie in [1, steps]");
  }
  if (inputs.cols() != p.fwd.input_dim() || inputs.cols() != p.bwd.input_dim()) {
    throw Error("encoder_forward: input width does not match the LSTM");
  }
  cache.lengths = std::move(lengths);
  cache.inputs = std::move(inputs);
  detail::run_direction(p.fwd, cache.inputs, cache, false, cache.fwd);
  detail::run_direction(p.bwd, cache.inputs, cache, true, cache.bwd);

  const auto B = cache.batch;
  const auto h = p.hidden();
  cache.pooled.resize(B, 2 * h);
  cache.argmax_step.assign(static_cast<std::size_t>(B * 2 * h), 0);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (Eigen::Index j = 0; j < 2 * h; ++j) {
      const auto& H = j < h ? cache.fwd.hidden : cache.bwd.hidden;
      const Eigen::Index col = j < h ? j : j - h;
      T best = H(b, col);
      int arg = 0;
      for (int t = 1; t < cache.lengths[static_cast<std::size_t>(b)]; ++t) {
        const T v = H(t * B + b, col);
        if (v > best) {  // strict: ties keep the earliest step
          best = v;
          arg = t;
        }
      }
      cache.pooled(b, j) = best;
      cache.argmax_step[static_cast<std::size_t>(b * 2 * h + j)] = arg;
    }
  }
  return cache;
}

/// Routes d(pooled) through the max and both directions. Returns d(inputs).
template <class T>
Tensor<T> encoder_backward(const BiLstmParams<T>& p, const EncoderCache<T>& cache,
                           const Tensor<T>& d_pooled, BiLstmParams<T>& grad) {
  const auto B = cache.batch;
  const auto S = cache.steps;
  const auto h = p.hidden();
  Tensor<T> d_fwd = Tensor<T>::Zero(S * B, h);
  Tensor<T> d_bwd = Tensor<T>::Zero(S * B, h);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (Eigen::Index j = 0; j < 2 * h; ++j) {
      const int t = cache.argmax_step[static_cast<std::size_t>(b * 2 * h + j)];
      if (j < h) {
        d_fwd(t * B + b, j) += d_pooled(b, j);
      } else {
        d_bwd(t * B + b, j - h) += d_pooled(b, j);
      }
    }
  }
  Tensor<T> d_in = detail::backprop_direction(p.fwd, cache.inputs, cache, cache.fwd, false, d_fwd, grad.fwd);
  d_in += detail::backprop_direction(p.bwd, cache.inputs, cache, cache.bwd, true, d_bwd, grad.bwd);
  return d_in;
}

/// Single-sequence encoding: `steps` is m x d_in, the first `valid_len` rows
/// are real tokens. Returns the pooled [h_fwd; h_bwd] vector (1 x 2h).
template <class T>
Vector<T> bilstm_encode(const Tensor<T>& steps, int valid_len, const BiLstmParams<T>& p) {
  if (valid_len < 1) throw Error("bilstm_encode: valid_len must be at least 1");
  if (valid_len > steps.rows()) throw Error("bilstm_encode: valid_len exceeds sequence length");
  auto cache = encoder_forward(p, steps, {valid_len});
  return cache.pooled.row(0);
}

}  // namespace tlre
