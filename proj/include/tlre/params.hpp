#pragma once

// Trainable tensors of the relation classifier and their initialization.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tlre/config.hpp"
#include "tlre/lstm.hpp"

namespace tlre {

template <class T>
struct Head {
  Tensor<T> W;  // |L| x 2h
  Tensor<T> b;  // 1 x |L|

  Eigen::Index labels() const { return W.rows(); }
};

template <class T>
struct ModelParams {
  Tensor<T> word_emb;  // |V| x d1
  Tensor<T> pos1_emb;  // (2 clip + 2) x d2
  Tensor<T> pos2_emb;  // (2 clip + 2) x d3
  BiLstmParams<T> encoder;
  std::map<std::string, Head<T>> heads;

  Eigen::Index word_dim() const { return word_emb.cols(); }
  Eigen::Index pos1_dim() const { return pos1_emb.cols(); }
  Eigen::Index pos2_dim() const { return pos2_emb.cols(); }
  Eigen::Index input_dim() const { return word_dim() + pos1_dim() + pos2_dim(); }
  Eigen::Index hidden() const { return encoder.hidden(); }

  const Head<T>& head(const std::string& name) const {
    auto it = heads.find(name);
    if (it == heads.end()) throw Error("unknown head '" + name + "'");
    return it->second;
  }
  Head<T>& head(const std::string& name) {
    auto it = heads.find(name);
    if (it == heads.end()) throw Error("unknown head '" + name + "'");
    return it->second;
  }

  bool operator==(const ModelParams& o) const;
};

/// Which heads an operation touches; nullopt means all of them.
using HeadSelection = std::optional<std::string>;

template <class P, class Tens>
struct NamedTensorT {
  std::string name;
  Tens* tensor;
};
template <class T>
using NamedTensor = NamedTensorT<ModelParams<T>, Tensor<T>>;
template <class T>
using ConstNamedTensor = NamedTensorT<const ModelParams<T>, const Tensor<T>>;

namespace detail {
template <class P, class Out>
void collect_tensors(P& p, const HeadSelection& heads, bool include_heads, Out& out) {
  out.push_back({"emb.word", &p.word_emb});
  out.push_back({"emb.pos1", &p.pos1_emb});
  out.push_back({"emb.pos2", &p.pos2_emb});
  out.push_back({"enc.fwd.W", &p.encoder.fwd.W});
  out.push_back({"enc.fwd.U", &p.encoder.fwd.U});
  out.push_back({"enc.fwd.b", &p.encoder.fwd.b});
  out.push_back({"enc.bwd.W", &p.encoder.bwd.W});
  out.push_back({"enc.bwd.U", &p.encoder.bwd.U});
  out.push_back({"enc.bwd.b", &p.encoder.bwd.b});
  for (auto& [name, h] : p.heads) {
    if (!include_heads || (heads && *heads != name)) continue;
    out.push_back({"head." + name + ".W", &h.W});
    out.push_back({"head." + name + ".b", &h.b});
  }
}
}  // namespace detail

/// Every tensor in a fixed order: embeddings, encoder, then heads by name.
template <class T>
std::vector<NamedTensor<T>> named_tensors(ModelParams<T>& p, const HeadSelection& heads = std::nullopt) {
  std::vector<NamedTensor<T>> out;
  detail::collect_tensors(p, heads, true, out);
  return out;
}
template <class T>
std::vector<ConstNamedTensor<T>> named_tensors(const ModelParams<T>& p, const HeadSelection& heads = std::nullopt) {
  std::vector<ConstNamedTensor<T>> out;
  detail::collect_tensors(p, heads, true, out);
  return out;
}
/// Embeddings and encoder only.
template <class T>
std::vector<ConstNamedTensor<T>> shared_tensors(const ModelParams<T>& p) {
  std::vector<ConstNamedTensor<T>> out;
  detail::collect_tensors(p, std::nullopt, false, out);
  return out;
}

template <class T>
bool ModelParams<T>::operator==(const ModelParams& o) const {
  auto a = named_tensors(*this);
  auto b = named_tensors(o);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name) return false;
    if (a[i].tensor->rows() != b[i].tensor->rows() || a[i].tensor->cols() != b[i].tensor->cols()) return false;
    if (*a[i].tensor != *b[i].tensor) return false;
  }
  return true;
}

/// Same structure, all zeros.
template <class T>
ModelParams<T> zeros_like(const ModelParams<T>& p) {
  ModelParams<T> z = p;
  for (auto& nt : named_tensors(z)) nt.tensor->setZero();
  return z;
}

template <class U, class T>
ModelParams<U> cast_params(const ModelParams<T>& p) {
  ModelParams<U> out;
  out.word_emb = p.word_emb.template cast<U>();
  out.pos1_emb = p.pos1_emb.template cast<U>();
  out.pos2_emb = p.pos2_emb.template cast<U>();
  for (auto [dst, src] : {std::pair{&out.encoder.fwd, &p.encoder.fwd}, std::pair{&out.encoder.bwd, &p.encoder.bwd}}) {
    dst->W = src->W.template cast<U>();
    dst->U = src->U.template cast<U>();
    dst->b = src->b.template cast<U>();
  }
  for (const auto& [name, h] : p.heads) out.heads[name] = {h.W.template cast<U>(), h.b.template cast<U>()};
  return out;
}

inline double xavier_bound(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <class M>
void fill_uniform(M& t, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<typename M::Scalar>(dist(rng));
}

template <class T>
Head<T> init_head(Eigen::Index labels, Eigen::Index hidden, std::mt19937_64& rng) {
  Head<T> h;
  h.W.resize(labels, 2 * hidden);
  fill_uniform(h.W, xavier_bound(2 * hidden, labels), rng);
  h.b = Tensor<T>::Zero(1, labels);
  return h;
}

template <class T>
Head<T> init_head(Eigen::Index labels, Eigen::Index hidden, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return init_head<T>(labels, hidden, rng);
}

inline constexpr double kEmbeddingInitBound = 0.05;

/// Xavier-uniform LSTM and head weights (gate-wise fan), zero biases except
/// the forget gate at 1, and U(-0.05, 0.05) embeddings.
template <class T>
ModelParams<T> init_params(const TrainConfig& cfg, std::size_t vocab_size,
                           const std::vector<std::pair<std::string, std::size_t>>& heads, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ModelParams<T> p;
  const Eigen::Index h = cfg.hidden;
  const Eigen::Index din = cfg.input_dim();
  p.word_emb.resize(static_cast<Eigen::Index>(vocab_size), cfg.word_dim);
  p.pos1_emb.resize(cfg.position_rows(), cfg.pos1_dim);
  p.pos2_emb.resize(cfg.position_rows(), cfg.pos2_dim);
  fill_uniform(p.word_emb, kEmbeddingInitBound, rng);
  fill_uniform(p.pos1_emb, kEmbeddingInitBound, rng);
  fill_uniform(p.pos2_emb, kEmbeddingInitBound, rng);
  for (auto* dir : {&p.encoder.fwd, &p.encoder.bwd}) {
    dir->W.resize(4 * h, din);
    dir->U.resize(4 * h, h);
    fill_uniform(dir->W, xavier_bound(din, h), rng);
    fill_uniform(dir->U, xavier_bound(h, h), rng);
    dir->b = Tensor<T>::Zero(1, 4 * h);
    dir->b.middleCols(h, h).setConstant(T(1));
  }
  for (const auto& [name, labels] : heads) {
    p.heads[name] = init_head<T>(static_cast<Eigen::Index>(labels), h, rng);
  }
  return p;
}

}  // namespace tlre
