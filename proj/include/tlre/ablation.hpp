#pragma once

// Source-size sweep and equal-size source comparison.

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tlre/eval.hpp"
#include "tlre/transfer.hpp"

namespace tlre {

struct AblationRow {
  std::string setting;
  double fraction = 1.0;
  std::size_t source_size = 0;
  RunSummary summary;
};

inline constexpr std::uint64_t kAblationSampleStream = 100;

/// `fraction` of every source-train class (the whole set at 1.0).
inline TaskSpec subsample_source(const TaskSpec& source, double fraction, std::uint64_t seed) {
  TaskSpec out = source;
  if (fraction == 1.0) return out;
  out.train = stratified_partition(source.train, fraction, seed).selected;
  if (out.train.empty()) throw Error("source subsample at fraction " + std::to_string(fraction) + " is empty");
  return out;
}

template <class T>
RunSummary run_framework_protocol(const Experiment& ex, const TrainConfig& cfg, std::size_t n_runs,
                                  std::uint64_t base_seed) {
  return run_protocol(
      [&](std::uint64_t seed) {
        TrainConfig c = cfg;
        c.seed = seed;
        return outcome_of(run_experiment<T>(ex, c).result.history);
      },
      n_runs, base_seed);
}

inline void require_interleaved(Framework f) {
  if (f != Framework::Mixed && f != Framework::Multi) {
    throw Error("ablation supports the mixed and multi frameworks, got " + framework_name(f));
  }
}

template <class T>
std::vector<AblationRow> ablate_source_size(Framework framework, const TaskSpec& source, const TaskSpec& target,
                                            std::span<const double> fractions, const TrainConfig& cfg,
                                            std::size_t n_runs, std::uint64_t base_seed,
                                            const std::optional<LabelMapping>& mapping = std::nullopt) {
  require_interleaved(framework);
  std::vector<AblationRow> rows;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw Error("ablation fraction must lie in (0,1], got " + std::to_string(f));
    const TaskSpec sub = subsample_source(source, f, mix_seed(base_seed, kAblationSampleStream));
    Experiment ex{framework, &sub, &target, mapping};
    std::ostringstream name;
    name << std::setprecision(6) << f;
    rows.push_back({name.str(), f, sub.train.size(), run_framework_protocol<T>(ex, cfg, n_runs, base_seed)});
  }
  return rows;
}

/// Downsamples every source per class to about `count` instances, then runs
/// the protocol on each.
template <class T>
std::vector<AblationRow> ablate_same_size(Framework framework, std::span<const TaskSpec* const> sources,
                                          const TaskSpec& target, std::size_t count, const TrainConfig& cfg,
                                          std::size_t n_runs, std::uint64_t base_seed) {
  require_interleaved(framework);
  std::vector<AblationRow> rows;
  for (const TaskSpec* src : sources) {
    if (src->train.size() < count) {
      throw Error("source '" + src->name + "' has " + std::to_string(src->train.size()) +
                  " training instances, fewer than " + std::to_string(count));
    }
    const double f = static_cast<double>(count) / static_cast<double>(src->train.size());
    const TaskSpec sub = subsample_source(*src, f, mix_seed(base_seed, kAblationSampleStream));
    Experiment ex{framework, &sub, &target, std::nullopt};
    rows.push_back({src->name, f, sub.train.size(), run_framework_protocol<T>(ex, cfg, n_runs, base_seed)});
  }
  return rows;
}

inline void write_ablation_csv(std::span<const AblationRow> rows, std::ostream& out) {
  out << "setting,fraction,source_size,n,mean_f1,std_f1,best_f1,best_precision,best_recall\n";
  out << std::setprecision(9);
  for (const auto& r : rows) {
    const auto& b = r.summary.best();
    out << r.setting << ',' << r.fraction << ',' << r.source_size << ',' << r.summary.n() << ',' << r.summary.mean_f1
        << ',' << r.summary.std_f1 << ',' << b.f1 << ',' << b.precision << ',' << b.recall << '\n';
  }
}

}  // namespace tlre
