#pragma once

// Classification metrics, relative improvement, and the multi-run protocol.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tlre/config.hpp"
#include "tlre/corpus.hpp"

namespace tlre {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

inline double f1_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }
inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct EvalReport {
  std::vector<std::string> labels;
  std::size_t negative = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
  std::vector<ClassMetrics> per_class;
  ClassMetrics micro;  // pooled over non-negative classes
  double macro_f1 = 0.0;  // mean F1 over non-negative classes

  double score(Averaging a) const { return a == Averaging::Micro ? micro.f1 : macro_f1; }
};

/// Builds the confusion matrix and metrics from (gold, predicted) index pairs.
inline EvalReport evaluate(std::span<const std::pair<int, int>> predictions, std::vector<std::string> labels,
                           std::size_t negative) {
  if (predictions.empty()) throw Error("evaluate: no predictions");
  const std::size_t L = labels.size();
  if (negative >= L) throw Error("evaluate: negative label out of range");
  EvalReport r;
  r.labels = std::move(labels);
  r.negative = negative;
  r.confusion.assign(L, std::vector<std::size_t>(L, 0));
  for (const auto& [gold, pred] : predictions) {
    if (gold < 0 || pred < 0 || static_cast<std::size_t>(gold) >= L || static_cast<std::size_t>(pred) >= L) {
      throw Error("evaluate: label index outside the label set");
    }
    ++r.confusion[static_cast<std::size_t>(gold)][static_cast<std::size_t>(pred)];
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  double macro = 0.0;
  for (std::size_t c = 0; c < L; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < L; ++k) {
      row += r.confusion[c][k];
      col += r.confusion[k][c];
    }
    const std::size_t diag = r.confusion[c][c];
    ClassMetrics m;
    m.support = row;
    m.precision = safe_ratio(static_cast<double>(diag), static_cast<double>(col));
    m.recall = safe_ratio(static_cast<double>(diag), static_cast<double>(row));
    m.f1 = f1_score(m.precision, m.recall);
    r.per_class.push_back(m);
    if (c != negative) {
      tp += diag;
      fp += col - diag;
      fn += row - diag;
      macro += m.f1;
    }
  }
  r.micro.support = tp + fn;
  r.micro.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  r.micro.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  r.micro.f1 = f1_score(r.micro.precision, r.micro.recall);
  r.macro_f1 = L > 1 ? macro / static_cast<double>(L - 1) : 0.0;
  return r;
}

inline EvalReport evaluate(std::span<const int> gold, std::span<const int> predicted, const LabelSet& labels) {
  if (gold.size() != predicted.size()) throw Error("evaluate: gold and predicted lengths differ");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) pairs.emplace_back(gold[i], predicted[i]);
  return evaluate(pairs, labels.names(), labels.negative());
}

/// 100 (f_tl - f_base) / f_base, unrounded.
inline double relative_improvement(double f_tl, double f_base) {
  if (!(f_base > 0.0)) throw Error("relative_improvement: baseline F1 must be positive");
  return 100.0 * (f_tl - f_base) / f_base;
}

/// Two-decimal presentation of a relative improvement.
inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline void write_report_csv(const EvalReport& r, std::ostream& out) {
  out << "class,precision,recall,f1,support\n";
  out << std::setprecision(6) << std::fixed;
  for (std::size_t c = 0; c < r.labels.size(); ++c) {
    const auto& m = r.per_class[c];
    out << r.labels[c] << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ',' << m.support << '\n';
  }
  out << "micro," << r.micro.precision << ',' << r.micro.recall << ',' << r.micro.f1 << ',' << r.micro.support << '\n';
  out.unsetf(std::ios::fixed);
}

inline nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json j;
  j["labels"] = r.labels;
  j["negative"] = r.labels[r.negative];
  j["confusion"] = r.confusion;
  for (std::size_t c = 0; c < r.labels.size(); ++c) {
    const auto& m = r.per_class[c];
    j["per_class"][r.labels[c]] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  j["micro"] = {{"precision", r.micro.precision}, {"recall", r.micro.recall}, {"f1", r.micro.f1}};
  j["macro_f1"] = r.macro_f1;
  return j;
}

// ---------------------------------------------------------------------------
// Multi-run protocol

struct RunOutcome {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  int best_epoch = -1;
};

struct RunSummary {
  std::vector<RunOutcome> runs;
  std::size_t best_run = 0;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // sample (n - 1) standard deviation

  std::size_t n() const { return runs.size(); }
  const RunOutcome& best() const { return runs.at(best_run); }
};

inline double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline RunSummary summarize_runs(std::vector<RunOutcome> runs) {
  if (runs.empty()) throw Error("summarize_runs: no runs");
  RunSummary s;
  s.runs = std::move(runs);
  std::vector<double> f1s;
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    f1s.push_back(s.runs[i].f1);
    if (s.runs[i].f1 > s.runs[s.best_run].f1) s.best_run = i;
  }
  for (double f : f1s) s.mean_f1 += f;
  s.mean_f1 /= static_cast<double>(f1s.size());
  s.std_f1 = sample_std(f1s);
  return s;
}

/// Runs `train` with seeds base_seed .. base_seed + n - 1 in order.
inline RunSummary run_protocol(const std::function<RunOutcome(std::uint64_t)>& train, std::size_t n,
                               std::uint64_t base_seed) {
  if (n < 1) throw Error("run_protocol: need at least one run");
  std::vector<RunOutcome> runs;
  for (std::size_t k = 0; k < n; ++k) {
    try {
      runs.push_back(train(base_seed + k));
    } catch (const std::exception& e) {
      throw Error("run " + std::to_string(k) + " (seed " + std::to_string(base_seed + k) + ") failed: " + e.what());
    }
  }
  return summarize_runs(std::move(runs));
}

inline nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["n"] = s.n();
  j["mean_f1"] = s.mean_f1;
  j["std_f1"] = s.std_f1;
  j["best_run"] = s.best_run;
  j["best"] = {{"f1", s.best().f1}, {"precision", s.best().precision}, {"recall", s.best().recall},
               {"epoch", s.best().best_epoch}};
  for (const auto& r : s.runs) {
    j["runs"].push_back({{"f1", r.f1}, {"precision", r.precision}, {"recall", r.recall}, {"epoch", r.best_epoch}});
  }
  return j;
}

}  // namespace tlre
