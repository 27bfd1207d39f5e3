#pragma once

// Central finite-difference verification of loss_and_grads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tlre/model.hpp"

namespace tlre {

struct TensorCheck {
  std::string name;
  std::size_t coords_checked = 0;
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<TensorCheck> tensors;

  double max_rel_error() const {
    double m = 0.0;
    for (const auto& t : tensors) m = std::max(m, t.max_rel_error);
    return m;
  }
  bool passed(double tol = 1e-4) const { return max_rel_error() < tol; }
};

struct GradcheckOptions {
  double delta = 1e-5;
  std::size_t coords_per_tensor = 20;  // 0 checks every coordinate
  std::uint64_t seed = 0;
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

/// Compares `analytic` (structured like `params`) with central differences of
/// the mean batch loss. Coordinates are sampled per tensor when the tensor is
/// larger than `coords_per_tensor`.
inline GradcheckReport compare_gradients(ModelParams<double>& params, const ModelParams<double>& analytic,
                                         std::span<const EncodedInstance> batch, const std::string& head,
                                         const GradcheckOptions& opts = {}) {
  GradcheckReport report;
  std::mt19937_64 rng(opts.seed);
  auto theta = named_tensors(params);
  auto grad = named_tensors(analytic);
  if (theta.size() != grad.size()) throw Error("gradcheck: gradient structure does not match parameters");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto& P = *theta[k].tensor;
    const auto& G = *grad[k].tensor;
    std::vector<Eigen::Index> coords(static_cast<std::size_t>(P.size()));
    std::iota(coords.begin(), coords.end(), Eigen::Index{0});
    if (opts.coords_per_tensor != 0 && coords.size() > opts.coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.coords_per_tensor);
    }
    TensorCheck tc{theta[k].name, coords.size(), 0.0};
    for (auto c : coords) {
      double& x = P.data()[c];
      const double saved = x;
      x = saved + opts.delta;
      const double up = batch_loss(params, batch, head);
      x = saved - opts.delta;
      const double down = batch_loss(params, batch, head);
      x = saved;
      const double numeric = (up - down) / (2.0 * opts.delta);
      tc.max_rel_error = std::max(tc.max_rel_error, relative_error(G.data()[c], numeric));
    }
    report.tensors.push_back(tc);
  }
  return report;
}

inline GradcheckReport finite_diff_gradcheck(ModelParams<double>& params, std::span<const EncodedInstance> batch,
                                             const std::string& head, const GradcheckOptions& opts = {}) {
  const auto lg = loss_and_grads(params, batch, head);
  return compare_gradients(params, lg.grads, batch, head, opts);
}

/// A small double-precision model with a random batch to check it on.
struct GradcheckProblem {
  TrainConfig config;
  ModelParams<double> params;
  std::vector<EncodedInstance> batch;
  std::string head = "main";
};

struct GradcheckShape {
  int hidden = 4;
  std::size_t vocab = 20;  // including <pad> and <unk>
  int max_len = 8;
  std::size_t labels = 3;
  std::size_t batch = 4;
  double weight_bound = 1.0;
};

/// Random instances over word ids [0, vocab). Every tensor is redrawn from
/// U(-weight_bound, weight_bound): at the training init most gradients of so
/// small a model are ~1e-7, where central differences lose their digits.
inline GradcheckProblem make_gradcheck_problem(std::uint64_t seed, const GradcheckShape& shape = {}) {
  if (shape.max_len < 2) throw Error("gradcheck: sentences need at least 2 tokens");
  GradcheckProblem pr;
  auto& c = pr.config;
  c.word_dim = 6;
  c.pos1_dim = 3;
  c.pos2_dim = 3;
  c.hidden = shape.hidden;
  c.position_clip = 6;
  c.precision = Precision::Double;
  pr.params = init_params<double>(c, shape.vocab, {{pr.head, shape.labels}}, seed);
  std::mt19937_64 rng(mix_seed(seed, 99));
  for (auto& nt : named_tensors(pr.params)) fill_uniform(*nt.tensor, shape.weight_bound, rng);
  std::uniform_int_distribution<int> len_dist(2, shape.max_len);
  std::uniform_int_distribution<int> word(0, static_cast<int>(shape.vocab) - 1);
  std::uniform_int_distribution<int> label(0, static_cast<int>(shape.labels) - 1);
  for (std::size_t b = 0; b < shape.batch; ++b) {
    const int m = len_dist(rng);
    std::uniform_int_distribution<int> pos(0, m - 1);
    int e1 = pos(rng), e2 = pos(rng);
    while (e2 == e1) e2 = pos(rng);
    if (e1 > e2) std::swap(e1, e2);
    EncodedInstance e;
    e.label = label(rng);
    e.task = "gradcheck";
    for (int t = 0; t < m; ++t) {
      e.words.push_back(word(rng));
      e.pos1.push_back(position_bucket(t, e1, c.position_clip));
      e.pos2.push_back(position_bucket(t, e2, c.position_clip));
    }
    pr.batch.push_back(std::move(e));
  }
  return pr;
}

/// Gradcheck of every coordinate of every tensor of a fresh problem.
inline GradcheckReport run_gradcheck(std::uint64_t seed, const GradcheckShape& shape = {}) {
  auto pr = make_gradcheck_problem(seed, shape);
  GradcheckOptions opts;
  opts.coords_per_tensor = 0;
  opts.seed = seed;
  return finite_diff_gradcheck(pr.params, pr.batch, pr.head, opts);
}

}  // namespace tlre
