#pragma once

#include <cmath>
#include <cstdint>

#include "tlre/params.hpp"

namespace tlre {

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamHyper from(const TrainConfig& c) { return {c.lr, c.beta1, c.beta2, c.adam_eps}; }
};

/// First/second moments mirroring a ModelParams, plus the shared step count.
template <class T>
struct AdamState {
  ModelParams<T> m;
  ModelParams<T> v;
  std::int64_t t = 0;

  static AdamState fresh(const ModelParams<T>& params) { return {zeros_like(params), zeros_like(params), 0}; }
};

/// Bias-corrected Adam over the shared tensors and the selected heads.
/// Heads outside the selection, and their moments, are left untouched.
template <class T>
void adam_step(ModelParams<T>& params, const ModelParams<T>& grads, AdamState<T>& state, const AdamHyper& hp,
               const HeadSelection& heads = std::nullopt) {
  ++state.t;
  const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
  const T b1 = static_cast<T>(hp.beta1), b2 = static_cast<T>(hp.beta2);
  const T lr = static_cast<T>(hp.lr), eps = static_cast<T>(hp.eps);
  const T inv_c1 = static_cast<T>(1.0 / c1), inv_c2 = static_cast<T>(1.0 / c2);

  auto p = named_tensors(params, heads);
  auto g = named_tensors(grads, heads);
  auto m = named_tensors(state.m, heads);
  auto v = named_tensors(state.v, heads);
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw Error("adam_step: gradient/state structure does not match parameters");
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto& P = *p[k].tensor;
    const auto& G = *g[k].tensor;
    auto& M = *m[k].tensor;
    auto& V = *v[k].tensor;
    if (G.rows() != P.rows() || G.cols() != P.cols() || M.rows() != P.rows() || M.cols() != P.cols()) {
      throw Error("adam_step: shape mismatch for " + p[k].name);
    }
    M.array() = b1 * M.array() + (T(1) - b1) * G.array();
    V.array() = b2 * V.array() + (T(1) - b2) * G.array().square();
    P.array() -= lr * (M.array() * inv_c1) / ((V.array() * inv_c2).sqrt() + eps);
  }
}

}  // namespace tlre
