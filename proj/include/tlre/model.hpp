#pragma once

// The relation classifier: word + two relative-position embeddings,
// bidirectional LSTM with max-pooling, and one softmax head per task.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tlre/corpus.hpp"
#include "tlre/ops.hpp"
#include "tlre/params.hpp"

namespace tlre {

/// Relative distance i - e clamped to [-clip, clip], shifted to [0, 2 clip].
inline int position_bucket(long i, long e, int clip) {
  const long d = std::clamp(i - e, -static_cast<long>(clip), static_cast<long>(clip));
  return static_cast<int>(d + clip);
}
inline int position_pad_bucket(int clip) { return 2 * clip + 1; }

/// An instance resolved to embedding-table row ids.
struct EncodedInstance {
  std::vector<int> words;
  std::vector<int> pos1;
  std::vector<int> pos2;
  int label = 0;
  std::string task;

  int length() const { return static_cast<int>(words.size()); }
};

inline EncodedInstance encode_instance(const RelationInstance& inst, const Vocabulary& vocab, int label, int clip) {
  EncodedInstance e;
  e.label = label;
  e.task = inst.origin_task;
  const auto m = inst.tokens.size();
  e.words.reserve(m);
  e.pos1.reserve(m);
  e.pos2.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    e.words.push_back(vocab.lookup(inst.tokens[t]));
    e.pos1.push_back(position_bucket(static_cast<long>(t), static_cast<long>(inst.e1_index), clip));
    e.pos2.push_back(position_bucket(static_cast<long>(t), static_cast<long>(inst.e2_index), clip));
  }
  return e;
}

/// Encodes with label indices from `labels`.
inline std::vector<EncodedInstance> encode_all(std::span<const RelationInstance> instances, const Vocabulary& vocab,
                                               const LabelSet& labels, int clip) {
  std::vector<EncodedInstance> out;
  out.reserve(instances.size());
  for (const auto& r : instances) out.push_back(encode_instance(r, vocab, static_cast<int>(labels.index(r.label)), clip));
  return out;
}

template <class T>
int position_clip_of(const ModelParams<T>& p) {
  return static_cast<int>((p.pos1_emb.rows() - 2) / 2);
}

/// Per-token concatenation of word and position vectors (m x (d1+d2+d3)).
template <class T>
Tensor<T> embed_instance(const RelationInstance& inst, const Vocabulary& vocab, const ModelParams<T>& p,
                         int* valid_len = nullptr) {
  const auto e = encode_instance(inst, vocab, 0, position_clip_of(p));
  Tensor<T> x(e.length(), p.input_dim());
  for (int t = 0; t < e.length(); ++t) {
    x.row(t) << p.word_emb.row(e.words[t]), p.pos1_emb.row(e.pos1[t]), p.pos2_emb.row(e.pos2[t]);
  }
  if (valid_len) *valid_len = e.length();
  return x;
}

template <class T>
struct BatchForward {
  EncoderCache<T> encoder;
  Tensor<T> logits;  // batch x |L|
  Tensor<T> probs;
  std::string head;
};

namespace detail {

template <class T>
Tensor<T> gather_inputs(const ModelParams<T>& p, std::span<const EncodedInstance> batch, Eigen::Index steps) {
  const auto B = static_cast<Eigen::Index>(batch.size());
  const auto d1 = p.word_dim(), d2 = p.pos1_dim(), d3 = p.pos2_dim();
  const int pad_pos = static_cast<int>(p.pos1_emb.rows() - 1);
  Tensor<T> x(steps * B, d1 + d2 + d3);
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto& e = batch[static_cast<std::size_t>(b)];
    for (Eigen::Index t = 0; t < steps; ++t) {
      const bool real = t < e.length();
      const int w = real ? e.words[t] : Vocabulary::kPad;
      const int q1 = real ? e.pos1[t] : pad_pos;
      const int q2 = real ? e.pos2[t] : pad_pos;
      if (w < 0 || w >= p.word_emb.rows() || q1 < 0 || q1 >= p.pos1_emb.rows() || q2 < 0 || q2 >= p.pos2_emb.rows()) {
        throw Error("instance refers to an embedding row outside the model's tables");
      }
      auto row = x.row(t * B + b);
      row.head(d1) = p.word_emb.row(w);
      row.segment(d1, d2) = p.pos1_emb.row(q1);
      row.tail(d3) = p.pos2_emb.row(q2);
    }
  }
  return x;
}

}  // namespace detail

/// Forward pass for a batch padded to its longest instance.
template <class T>
BatchForward<T> forward_batch(const ModelParams<T>& p, std::span<const EncodedInstance> batch, const std::string& head) {
  if (batch.empty()) throw Error("forward_batch: empty batch");
  const auto& h = p.head(head);
  int steps = 0;
  std::vector<int> lengths;
  lengths.reserve(batch.size());
  for (const auto& e : batch) {
    if (e.length() == 0) throw Error("forward_batch: instance without tokens");
    steps = std::max(steps, e.length());
    lengths.push_back(e.length());
  }
  BatchForward<T> out;
  out.head = head;
  out.encoder = encoder_forward(p.encoder, detail::gather_inputs(p, batch, steps), std::move(lengths));
  out.logits = out.encoder.pooled * h.W.transpose();
  out.logits.rowwise() += h.b.row(0);
  out.probs = softmax_rows<T>(out.logits);
  return out;
}

struct Prediction {
  std::vector<double> probs;
  int label = 0;
};

template <class T>
Prediction forward_predict(const RelationInstance& inst, const Vocabulary& vocab, const ModelParams<T>& p,
                           const std::string& head) {
  const EncodedInstance e = encode_instance(inst, vocab, 0, position_clip_of(p));
  auto fw = forward_batch(p, std::span<const EncodedInstance>(&e, 1), head);
  Prediction pred;
  Eigen::Index arg = 0;
  fw.probs.row(0).maxCoeff(&arg);
  pred.label = static_cast<int>(arg);
  for (Eigen::Index k = 0; k < fw.probs.cols(); ++k) pred.probs.push_back(static_cast<double>(fw.probs(0, k)));
  return pred;
}

/// Argmax labels for many instances, evaluated in chunks. Ties go to the
/// lowest label index.
template <class T>
std::vector<int> predict_labels(const ModelParams<T>& p, std::span<const EncodedInstance> data, const std::string& head,
                                std::size_t chunk = 256) {
  std::vector<int> out;
  out.reserve(data.size());
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const auto n = std::min(chunk, data.size() - start);
    auto fw = forward_batch(p, data.subspan(start, n), head);
    for (Eigen::Index r = 0; r < fw.probs.rows(); ++r) {
      Eigen::Index arg = 0;
      fw.probs.row(r).maxCoeff(&arg);
      out.push_back(static_cast<int>(arg));
    }
  }
  return out;
}

/// Mean of -log(p_gold + kLogFloor). log p_gold is taken from the logits
/// (log-sum-exp) so a near-zero loss keeps its relative precision.
template <class T>
double mean_loss(const BatchForward<T>& fw, std::span<const EncodedInstance> batch) {
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto gold = batch[b].label;
    if (gold < 0 || gold >= fw.probs.cols()) throw Error("gold label out of range for head '" + fw.head + "'");
    const auto z = fw.logits.row(static_cast<Eigen::Index>(b)).template cast<double>();
    const double mx = z.maxCoeff();
    const double lse = mx + std::log((z.array() - mx).exp().sum());
    const double log_p = z(gold) - lse;
    total += -log_p - std::log1p(kLogFloor / std::exp(log_p));
  }
  return total / static_cast<double>(batch.size());
}

template <class T>
double batch_loss(const ModelParams<T>& p, std::span<const EncodedInstance> batch, const std::string& head) {
  return mean_loss(forward_batch(p, batch, head), batch);
}

template <class T>
struct LossAndGrads {
  double loss = 0.0;
  ModelParams<T> grads;
};

/// Mean cross-entropy over the batch through `head` and its exact gradient.
/// Every tensor is present in the result; other heads and embedding rows
/// the batch does not touch are exactly zero.
template <class T>
LossAndGrads<T> loss_and_grads(const ModelParams<T>& p, std::span<const EncodedInstance> batch, const std::string& head) {
  if (batch.empty()) throw Error("loss_and_grads: empty batch");
  for (const auto& e : batch) {
    if (e.task != batch.front().task) {
      throw Error("loss_and_grads: batch mixes tasks '" + batch.front().task + "' and '" + e.task + "'");
    }
  }
  auto fw = forward_batch(p, batch, head);
  LossAndGrads<T> out;
  out.loss = mean_loss(fw, batch);
  out.grads = zeros_like(p);

  const auto B = static_cast<Eigen::Index>(batch.size());
  const auto& h = p.head(head);
  // d loss / d logits for -log(p_gold + floor), averaged over the batch.
  Tensor<T> d_logits = fw.probs;
  for (Eigen::Index b = 0; b < B; ++b) {
    const int gold = batch[static_cast<std::size_t>(b)].label;
    const T pg = fw.probs(b, gold);
    const T scale = pg / (pg + static_cast<T>(kLogFloor));
    d_logits(b, gold) -= T(1);
    d_logits.row(b) *= scale / static_cast<T>(B);
  }
  auto& gh = out.grads.head(head);
  gh.W.noalias() = d_logits.transpose() * fw.encoder.pooled;
  gh.b = d_logits.colwise().sum();
  const Tensor<T> d_pooled = d_logits * h.W;

  const Tensor<T> d_inputs = encoder_backward(p.encoder, fw.encoder, d_pooled, out.grads.encoder);
  const auto d1 = p.word_dim(), d2 = p.pos1_dim(), d3 = p.pos2_dim();
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto& e = batch[static_cast<std::size_t>(b)];
    for (int t = 0; t < e.length(); ++t) {
      const auto row = d_inputs.row(t * B + b);
      out.grads.word_emb.row(e.words[t]) += row.head(d1);
      out.grads.pos1_emb.row(e.pos1[t]) += row.segment(d1, d2);
      out.grads.pos2_emb.row(e.pos2[t]) += row.tail(d3);
    }
  }
  return out;
}

}  // namespace tlre
