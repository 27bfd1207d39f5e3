#pragma once

// Baseline training and the three transfer frameworks: Mixed (shared model,
// interleaved batches, label bijection), Seq (pretrain on source, transplant
// full or partial parameters), and Multi (shared encoder, one head per task).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlre/adam.hpp"
#include "tlre/corpus.hpp"
#include "tlre/eval.hpp"
#include "tlre/model.hpp"

namespace tlre {

// ---------------------------------------------------------------------------
// Label bijection

class LabelBijection {
 public:
  LabelBijection() = default;
  LabelBijection(std::vector<std::pair<std::string, std::string>> pairs, std::vector<int> source_to_target)
      : pairs_(std::move(pairs)), map_(std::move(source_to_target)) {}

  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  /// Target label index for a source label index.
  int translate(std::size_t source_index) const { return map_.at(source_index); }
  bool is_identity() const {
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (map_[i] != static_cast<int>(i)) return false;
    }
    return true;
  }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::vector<int> map_;
};

using LabelMapping = std::vector<std::pair<std::string, std::string>>;

/// Validates (or, when no mapping is given and the two name sets are equal,
/// derives) a one-to-one, onto mapping from source labels to target labels.
inline LabelBijection check_bijection(const LabelSet& source, const LabelSet& target,
                                      const std::optional<LabelMapping>& mapping = std::nullopt) {
  if (source.size() != target.size()) {
    throw Error("no label bijection: source has " + std::to_string(source.size()) + " labels, target has " +
                std::to_string(target.size()));
  }
  LabelMapping pairs;
  if (mapping) {
    pairs = *mapping;
  } else {
    for (const auto& name : source.names()) {
      if (!target.find(name)) {
        throw Error("no label bijection: source label '" + name +
                    "' has no same-named target label and no mapping was given");
      }
      pairs.emplace_back(name, name);
    }
  }
  std::vector<int> map(source.size(), -1);
  std::set<std::size_t> hit;
  for (const auto& [s, t] : pairs) {
    auto si = source.find(s);
    auto ti = target.find(t);
    if (!si) throw Error("label mapping: '" + s + "' is not a source label");
    if (!ti) throw Error("label mapping: '" + t + "' is not a target label");
    if (map[*si] != -1) throw Error("label mapping: source label '" + s + "' mapped twice");
    if (!hit.insert(*ti).second) throw Error("label mapping is not injective: target label '" + t + "' used twice");
    map[*si] = static_cast<int>(*ti);
  }
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] == -1) throw Error("label mapping is incomplete: source label '" + source.name(i) + "' unmapped");
  }
  return LabelBijection(std::move(pairs), std::move(map));
}

/// Lines of `source_label<TAB>target_label`.
inline LabelMapping read_label_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bijection file " + path.string());
  LabelMapping out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected source<TAB>target");
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

enum class TaskSide { Source, Target };

/// Bernoulli task draw: Source with probability `source_prob`.
class TaskSampler {
 public:
  TaskSampler(double source_prob, std::uint64_t seed) : rng_(seed), dist_(source_prob) {}
  TaskSide next() { return dist_(rng_) ? TaskSide::Source : TaskSide::Target; }

 private:
  std::mt19937_64 rng_;
  std::bernoulli_distribution dist_;
};

/// Endless minibatches over one task: each pass visits a fresh permutation
/// and ends with a possibly short batch.
class BatchStream {
 public:
  BatchStream(std::size_t size, std::size_t batch, std::uint64_t seed) : order_(size), batch_(batch), rng_(seed) {
    if (size == 0) throw Error("BatchStream: empty task");
    if (batch == 0) throw Error("BatchStream: batch size must be positive");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<std::size_t> next() {
    if (cursor_ == order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      cursor_ = 0;
      ++epoch_;
    }
    const auto n = std::min(batch_, order_.size() - cursor_);
    std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + n));
    cursor_ += n;
    return out;
  }

  /// Completed passes over the data.
  std::size_t epoch() const { return cursor_ == order_.size() ? epoch_ + 1 : epoch_; }
  std::size_t batches_per_epoch() const { return (order_.size() + batch_ - 1) / batch_; }

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  std::size_t epoch_ = 0;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// History

struct StepRecord {
  int epoch = 0;
  TaskSide side = TaskSide::Target;
  std::vector<int> labels;  // label indices fed to the head for this batch
  double loss = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  std::optional<EvalReport> test;
  std::optional<EvalReport> dev;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::optional<EvalReport> initial;  // evaluation before the first update
  std::optional<std::size_t> best;
  std::vector<StepRecord> steps;  // filled when RunOptions::record_steps

  const EpochRecord& best_record() const {
    if (!best) throw Error("history has no evaluated epochs");
    return epochs.at(*best);
  }
};

inline RunOutcome outcome_of(const TrainHistory& h) {
  const auto& rec = h.best_record();
  if (!rec.test) throw Error("best epoch has no test evaluation");
  return {rec.test->micro.f1, rec.test->micro.precision, rec.test->micro.recall, rec.epoch};
}

/// epoch,mean_loss,precision,recall,f1 (target test, micro over positives).
inline void write_history_csv(const TrainHistory& h, std::ostream& out) {
  out << "epoch,mean_loss,precision,recall,f1\n";
  out << std::setprecision(9);
  for (const auto& e : h.epochs) {
    out << e.epoch << ',' << e.mean_loss;
    if (e.test) {
      out << ',' << e.test->micro.precision << ',' << e.test->micro.recall << ',' << e.test->micro.f1;
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

template <class T>
struct RunOptions {
  std::function<void(ModelParams<T>&)> on_init;
  bool record_steps = false;
};

template <class T>
struct TrainResult {
  ModelParams<T> params;
  TrainHistory history;
  std::string eval_head;
};

inline const std::string kMainHead = "main";
inline const std::string kSourceHead = "source";
inline const std::string kTargetHead = "target";

namespace detail {

enum SeedStream : std::uint64_t {
  kInitStream = 1,
  kTargetStream = 2,
  kSourceStream = 3,
  kSamplerStream = 4,
  kHeadStream = 5,
  kDevStream = 6,
};

template <class T>
struct Learner {
  ModelParams<T> params;
  AdamState<T> adam;
  AdamHyper hp;

  Learner(ModelParams<T> p, const TrainConfig& cfg)
      : params(std::move(p)), adam(AdamState<T>::fresh(params)), hp(AdamHyper::from(cfg)) {}

  double step(std::span<const EncodedInstance> batch, const std::string& head) {
    auto lg = loss_and_grads(params, batch, head);
    if (!std::isfinite(lg.loss)) throw Error("training diverged: non-finite loss");
    adam_step(params, lg.grads, adam, hp, HeadSelection(head));
    return lg.loss;
  }
};

inline std::vector<EncodedInstance> take(const std::vector<EncodedInstance>& data, const std::vector<std::size_t>& idx) {
  std::vector<EncodedInstance> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data[i]);
  return out;
}

inline std::vector<int> labels_of(std::span<const EncodedInstance> batch) {
  std::vector<int> out;
  for (const auto& e : batch) out.push_back(e.label);
  return out;
}

/// Held-out evaluation data for one head.
struct EvalTarget {
  std::vector<EncodedInstance> test;
  std::vector<EncodedInstance> dev;
  LabelSet labels;
  std::string head;
};

template <class T>
std::optional<EvalReport> evaluate_on(const ModelParams<T>& p, const std::vector<EncodedInstance>& data,
                                      const EvalTarget& target) {
  if (data.empty()) return std::nullopt;
  const auto pred = predict_labels(p, std::span<const EncodedInstance>(data), target.head);
  std::vector<int> gold;
  gold.reserve(data.size());
  for (const auto& e : data) gold.push_back(e.label);
  return evaluate(gold, pred, target.labels);
}

template <class T>
void record_epoch(TrainHistory& h, const ModelParams<T>& p, const EvalTarget& target, const TrainConfig& cfg, int epoch,
                  double loss_sum, std::size_t steps) {
  EpochRecord rec;
  rec.epoch = epoch;
  rec.mean_loss = steps ? loss_sum / static_cast<double>(steps) : 0.0;
  rec.test = evaluate_on(p, target.test, target);
  rec.dev = evaluate_on(p, target.dev, target);
  const bool use_dev = !target.dev.empty();
  auto score_of = [&](const EpochRecord& r) -> std::optional<double> {
    const auto& sel = use_dev ? r.dev : r.test;
    if (!sel) return std::nullopt;
    return sel->score(cfg.averaging);
  };
  h.epochs.push_back(std::move(rec));
  const auto score = score_of(h.epochs.back());
  if (score && (!h.best || *score > *score_of(h.epochs[*h.best]))) h.best = h.epochs.size() - 1;
}

/// Splits a dev set off target train when the config asks for one.
inline std::pair<std::vector<RelationInstance>, std::vector<RelationInstance>> split_dev(
    const std::vector<RelationInstance>& train, const TrainConfig& cfg) {
  if (cfg.dev_fraction <= 0.0) return {train, {}};
  auto part = stratified_partition(train, cfg.dev_fraction, mix_seed(cfg.seed, kDevStream));
  return {std::move(part.remainder), std::move(part.selected)};
}

inline EvalTarget make_eval_target(const TaskSpec& task, const std::vector<RelationInstance>& dev,
                                   const Vocabulary& vocab, const TrainConfig& cfg, const std::string& head) {
  EvalTarget t;
  t.labels = task.labels;
  t.head = head;
  t.test = encode_all(task.test, vocab, task.labels, cfg.position_clip);
  t.dev = encode_all(dev, vocab, task.labels, cfg.position_clip);
  return t;
}

/// Epoch loop over a single task; one stream pass per epoch.
template <class T>
TrainResult<T> train_single(ModelParams<T> init, const std::vector<EncodedInstance>& train, const EvalTarget& target,
                            const TrainConfig& cfg, std::uint64_t stream_seed, const RunOptions<T>& opts) {
  if (train.empty()) throw Error("training set is empty");
  TrainResult<T> out;
  out.eval_head = target.head;
  Learner<T> learner(std::move(init), cfg);
  out.history.initial = evaluate_on(learner.params, target.test, target);
  BatchStream stream(train.size(), static_cast<std::size_t>(cfg.batch_size), stream_seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    const auto steps = stream.batches_per_epoch();
    for (std::size_t s = 0; s < steps; ++s) {
      const auto batch = take(train, stream.next());
      const double loss = learner.step(batch, target.head);
      loss_sum += loss;
      if (opts.record_steps) out.history.steps.push_back({epoch, TaskSide::Target, labels_of(batch), loss});
    }
    record_epoch(out.history, learner.params, target, cfg, epoch, loss_sum, steps);
  }
  out.params = std::move(learner.params);
  return out;
}

/// Interleaved two-task loop shared by Mixed and Multi.
template <class T>
TrainResult<T> train_interleaved(ModelParams<T> init, const std::vector<EncodedInstance>& source,
                                 const std::string& source_head, const std::vector<EncodedInstance>& target,
                                 const EvalTarget& eval, const TrainConfig& cfg, const RunOptions<T>& opts) {
  if (source.empty() || target.empty()) throw Error("interleaved training needs non-empty source and target sets");
  TrainResult<T> out;
  out.eval_head = eval.head;
  Learner<T> learner(std::move(init), cfg);
  out.history.initial = evaluate_on(learner.params, eval.test, eval);
  const auto B = static_cast<std::size_t>(cfg.batch_size);
  BatchStream src_stream(source.size(), B, mix_seed(cfg.seed, kSourceStream));
  BatchStream tgt_stream(target.size(), B, mix_seed(cfg.seed, kTargetStream));
  TaskSampler sampler(cfg.sample_prob, mix_seed(cfg.seed, kSamplerStream));
  const std::size_t steps = (source.size() + target.size() + B - 1) / B;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const TaskSide side = sampler.next();
      const bool from_source = side == TaskSide::Source;
      const auto batch = from_source ? take(source, src_stream.next()) : take(target, tgt_stream.next());
      const double loss = learner.step(batch, from_source ? source_head : eval.head);
      loss_sum += loss;
      if (opts.record_steps) out.history.steps.push_back({epoch, side, labels_of(batch), loss});
    }
    record_epoch(out.history, learner.params, eval, cfg, epoch, loss_sum, steps);
  }
  out.params = std::move(learner.params);
  return out;
}

/// Source instances encoded with their labels translated into target indices.
inline std::vector<EncodedInstance> encode_translated(const TaskSpec& source, const LabelBijection& bij,
                                                      const Vocabulary& vocab, int clip) {
  std::vector<EncodedInstance> out;
  out.reserve(source.train.size());
  for (const auto& r : source.train) {
    out.push_back(encode_instance(r, vocab, bij.translate(source.labels.index(r.label)), clip));
  }
  return out;
}

template <class T>
ModelParams<T> fresh_params(const TrainConfig& cfg, const Vocabulary& vocab,
                            const std::vector<std::pair<std::string, std::size_t>>& heads, const RunOptions<T>& opts) {
  auto p = init_params<T>(cfg, vocab.size(), heads, mix_seed(cfg.seed, kInitStream));
  if (opts.on_init) opts.on_init(p);
  return p;
}

inline void require_test(const TaskSpec& target) {
  if (target.test.empty()) throw Error("target task '" + target.name + "' has no test instances");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trainers

/// Target-only training of a single head.
template <class T>
TrainResult<T> train_baseline(const TaskSpec& task, const Vocabulary& vocab, const TrainConfig& cfg,
                              const RunOptions<T>& opts = {}) {
  cfg.validate();
  if (task.train.empty()) throw Error("train_baseline: task '" + task.name + "' has no training instances");
  detail::require_test(task);
  auto [train, dev] = detail::split_dev(task.train, cfg);
  const auto eval = detail::make_eval_target(task, dev, vocab, cfg, kMainHead);
  auto init = detail::fresh_params<T>(cfg, vocab, {{kMainHead, task.labels.size()}}, opts);
  return detail::train_single(std::move(init), encode_all(train, vocab, task.labels, cfg.position_clip), eval, cfg,
                              mix_seed(cfg.seed, detail::kTargetStream), opts);
}

template <class T>
TrainResult<T> train_baseline(const TaskSpec& task, const TrainConfig& cfg, const RunOptions<T>& opts = {}) {
  return train_baseline<T>(task, build_vocabulary({task.train}), cfg, opts);
}

/// One model and head over the target labels, fed batches from both tasks.
template <class T>
TrainResult<T> train_mixed(const TaskSpec& source, const TaskSpec& target, const LabelBijection& bij,
                           const Vocabulary& vocab, const TrainConfig& cfg, const RunOptions<T>& opts = {}) {
  cfg.validate();
  detail::require_test(target);
  auto [train, dev] = detail::split_dev(target.train, cfg);
  const auto eval = detail::make_eval_target(target, dev, vocab, cfg, kMainHead);
  const auto src = detail::encode_translated(source, bij, vocab, cfg.position_clip);
  auto init = detail::fresh_params<T>(cfg, vocab, {{kMainHead, target.labels.size()}}, opts);
  return detail::train_interleaved(std::move(init), src, kMainHead,
                                   encode_all(train, vocab, target.labels, cfg.position_clip), eval, cfg, opts);
}

enum class TransferMode { Full, Partial };

/// Full: every tensor copied. Partial: embeddings and encoder copied, the
/// head re-initialized at `target_labels` rows under `seed`.
template <class T>
ModelParams<T> transfer_params(const ModelParams<T>& source, TransferMode mode, std::size_t target_labels,
                               std::uint64_t seed, const std::string& head = kMainHead) {
  const auto& src_head = source.head(head);
  ModelParams<T> out = source;
  if (mode == TransferMode::Full) {
    if (src_head.labels() != static_cast<Eigen::Index>(target_labels)) {
      throw Error("full transfer needs equal head sizes: source head has " + std::to_string(src_head.labels()) +
                  " labels, target needs " + std::to_string(target_labels));
    }
    return out;
  }
  if (target_labels == 0) throw Error("partial transfer needs a target label count");
  out.heads.erase(head);
  out.heads[head] = init_head<T>(static_cast<Eigen::Index>(target_labels), source.hidden(), seed);
  return out;
}

template <class T>
struct SeqResult {
  TrainResult<T> source_phase;   // phase 1, evaluated on the source test set
  ModelParams<T> target_initial;  // parameters entering phase 2
  TrainResult<T> target_phase;
};

/// Pretrain on source, transplant, then train on target with a fresh optimizer.
/// Full mode trains phase 1 on source labels translated through `bij` so the
/// head transfers row for row.
template <class T>
SeqResult<T> train_seq(const TaskSpec& source, const TaskSpec& target, const Vocabulary& vocab, const TrainConfig& cfg,
                       TransferMode mode, const std::optional<LabelBijection>& bij = std::nullopt,
                       const RunOptions<T>& opts = {}) {
  cfg.validate();
  detail::require_test(target);
  if (source.train.empty()) throw Error("train_seq: source task has no training instances");
  SeqResult<T> out;
  const int clip = cfg.position_clip;
  const auto stream_seed = mix_seed(cfg.seed, detail::kSourceStream);
  if (mode == TransferMode::Full) {
    const LabelBijection b = bij ? *bij : check_bijection(source.labels, target.labels);
    detail::EvalTarget eval1;
    eval1.labels = target.labels;
    eval1.head = kMainHead;
    for (const auto& r : source.test) {
      eval1.test.push_back(encode_instance(r, vocab, b.translate(source.labels.index(r.label)), clip));
    }
    auto init = detail::fresh_params<T>(cfg, vocab, {{kMainHead, target.labels.size()}}, opts);
    out.source_phase =
        detail::train_single(std::move(init), detail::encode_translated(source, b, vocab, clip), eval1, cfg, stream_seed, opts);
  } else {
    const auto eval1 = detail::make_eval_target(source, {}, vocab, cfg, kMainHead);
    auto init = detail::fresh_params<T>(cfg, vocab, {{kMainHead, source.labels.size()}}, opts);
    out.source_phase = detail::train_single(std::move(init), encode_all(source.train, vocab, source.labels, clip), eval1,
                                            cfg, stream_seed, opts);
  }
  out.target_initial = transfer_params(out.source_phase.params, mode, target.labels.size(),
                                       mix_seed(cfg.seed, detail::kHeadStream));
  auto [train, dev] = detail::split_dev(target.train, cfg);
  const auto eval2 = detail::make_eval_target(target, dev, vocab, cfg, kMainHead);
  out.target_phase = detail::train_single(out.target_initial, encode_all(train, vocab, target.labels, clip), eval2, cfg,
                                          mix_seed(cfg.seed, detail::kTargetStream), opts);
  return out;
}

/// Shared embeddings and encoder with a "source" and a "target" head; each
/// step updates the shared tensors and only the head of the sampled task.
template <class T>
TrainResult<T> train_multi(const TaskSpec& source, const TaskSpec& target, const Vocabulary& vocab,
                           const TrainConfig& cfg, const RunOptions<T>& opts = {}) {
  cfg.validate();
  detail::require_test(target);
  auto [train, dev] = detail::split_dev(target.train, cfg);
  const auto eval = detail::make_eval_target(target, dev, vocab, cfg, kTargetHead);
  auto init = detail::fresh_params<T>(
      cfg, vocab, {{kSourceHead, source.labels.size()}, {kTargetHead, target.labels.size()}}, opts);
  return detail::train_interleaved(std::move(init), encode_all(source.train, vocab, source.labels, cfg.position_clip),
                                   kSourceHead, encode_all(train, vocab, target.labels, cfg.position_clip), eval, cfg,
                                   opts);
}

// ---------------------------------------------------------------------------
// Framework dispatch

enum class Framework { Baseline, Mixed, SeqFull, SeqPartial, Multi };

inline Framework parse_framework(const std::string& s) {
  if (s == "baseline") return Framework::Baseline;
  if (s == "mixed") return Framework::Mixed;
  if (s == "seq-full") return Framework::SeqFull;
  if (s == "seq-partial") return Framework::SeqPartial;
  if (s == "multi") return Framework::Multi;
  throw Error("unknown framework '" + s + "' (expected baseline|mixed|seq-full|seq-partial|multi)");
}

inline std::string framework_name(Framework f) {
  switch (f) {
    case Framework::Baseline: return "baseline";
    case Framework::Mixed: return "mixed";
    case Framework::SeqFull: return "seq-full";
    case Framework::SeqPartial: return "seq-partial";
    case Framework::Multi: return "multi";
  }
  return "?";
}

/// Everything needed to run one framework on one task pair.
struct Experiment {
  Framework framework = Framework::Baseline;
  const TaskSpec* source = nullptr;  // unused by the baseline
  const TaskSpec* target = nullptr;
  std::optional<LabelMapping> mapping;
};

template <class T>
struct ExperimentResult {
  TrainResult<T> result;
  Vocabulary vocab;
  std::map<std::string, LabelSet> head_labels;
};

/// Vocabulary over target train (baseline) or source train then target train.
inline Vocabulary experiment_vocabulary(const Experiment& ex) {
  if (ex.framework == Framework::Baseline || !ex.source) return build_vocabulary({ex.target->train});
  return build_vocabulary({ex.source->train, ex.target->train});
}

/// Checks label-set requirements before any training happens.
inline std::optional<LabelBijection> validate_experiment(const Experiment& ex) {
  if (!ex.target) throw Error("experiment has no target task");
  if (ex.framework != Framework::Baseline && !ex.source) {
    throw Error(framework_name(ex.framework) + " needs a source task");
  }
  if (ex.framework == Framework::Mixed || ex.framework == Framework::SeqFull) {
    return check_bijection(ex.source->labels, ex.target->labels, ex.mapping);
  }
  return std::nullopt;
}

template <class T>
ExperimentResult<T> run_experiment(const Experiment& ex, const TrainConfig& cfg,
                                   const std::function<void(ModelParams<T>&, const Vocabulary&)>& on_init = {},
                                   bool record_steps = false) {
  const auto bij = validate_experiment(ex);
  ExperimentResult<T> out;
  out.vocab = experiment_vocabulary(ex);
  RunOptions<T> opts;
  opts.record_steps = record_steps;
  if (on_init) opts.on_init = [&](ModelParams<T>& p) { on_init(p, out.vocab); };
  const auto& tgt = *ex.target;
  switch (ex.framework) {
    case Framework::Baseline:
      out.result = train_baseline<T>(tgt, out.vocab, cfg, opts);
      out.head_labels.emplace(kMainHead, tgt.labels);
      break;
    case Framework::Mixed:
      out.result = train_mixed<T>(*ex.source, tgt, *bij, out.vocab, cfg, opts);
      out.head_labels.emplace(kMainHead, tgt.labels);
      break;
    case Framework::SeqFull:
    case Framework::SeqPartial: {
      const auto mode = ex.framework == Framework::SeqFull ? TransferMode::Full : TransferMode::Partial;
      out.result = std::move(train_seq<T>(*ex.source, tgt, out.vocab, cfg, mode, bij, opts).target_phase);
      out.head_labels.emplace(kMainHead, tgt.labels);
      break;
    }
    case Framework::Multi:
      out.result = train_multi<T>(*ex.source, tgt, out.vocab, cfg, opts);
      out.head_labels.emplace(kSourceHead, ex.source->labels);
      out.head_labels.emplace(kTargetHead, tgt.labels);
      break;
  }
  return out;
}

}  // namespace tlre
