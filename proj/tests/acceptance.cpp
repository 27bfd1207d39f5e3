// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tlre/tlre.hpp"

using namespace tlre;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string history_text(const TrainHistory& h) {
  std::ostringstream out;
  write_history_csv(h, out);
  return out.str();
}

constexpr std::size_t kRuns = 5;
constexpr std::uint64_t kBaseSeed = 1;
constexpr std::uint64_t kDataSeed = 2024;

// One framework over seeds 1..5; keeps the first run's history text.
struct ProtocolRun {
  RunSummary summary;
  std::string first_history;
  double seconds = 0.0;
};

ProtocolRun protocol(const Experiment& ex, const TrainConfig& base) {
  ProtocolRun out;
  const auto t0 = Clock::now();
  out.summary = run_protocol(
      [&](std::uint64_t seed) {
        TrainConfig c = base;
        c.seed = seed;
        const auto r = run_experiment<float>(ex, c);
        if (seed == kBaseSeed) out.first_history = history_text(r.result.history);
        return outcome_of(r.result.history);
      },
      kRuns, kBaseSeed);
  out.seconds = seconds_since(t0);
  return out;
}

SynthConfig similar_pair() {
  SynthConfig s;
  s.source_train = 2000;
  s.target_train = 100;
  s.similarity = 1.0;
  return s;
}

// Shared state between criteria 3, 9 and 10.
struct SimilarPairResults {
  TaskSpec source, target;
  ProtocolRun baseline, mixed, multi;
};
std::optional<SimilarPairResults> g_similar;

Verdict criterion1() {
  const auto t0 = Clock::now();
  const auto report = run_gradcheck(7);
  const double secs = seconds_since(t0);
  std::string worst;
  double worst_err = -1.0;
  for (const auto& t : report.tensors) {
    if (t.max_rel_error > worst_err) {
      worst_err = t.max_rel_error;
      worst = t.name;
    }
  }
  const bool pass = report.tensors.size() == 11 && report.passed(1e-4) && secs < 60.0;
  return {pass, fmt("%zu tensors, max rel error %.3g (%s), %.2fs", report.tensors.size(), worst_err, worst.c_str(), secs)};
}

Verdict criterion2() {
  SynthConfig s;
  s.target_train = 500;
  s.target_test = 200;
  const auto [src, tgt] = synth_tasks(s, kDataSeed);
  (void)src;
  const auto t0 = Clock::now();
  const auto r = run_experiment<float>({Framework::Baseline, nullptr, &tgt, std::nullopt}, TrainConfig{});
  const double secs = seconds_since(t0);
  const auto o = outcome_of(r.result.history);
  return {o.f1 >= 0.95 && secs < 180.0, fmt("best F1 %.4f at epoch %d, %.1fs", o.f1, o.best_epoch, secs)};
}

Verdict criterion3() {
  auto [src, tgt] = synth_tasks(similar_pair(), kDataSeed);
  g_similar.emplace();
  auto& g = *g_similar;
  g.source = std::move(src);
  g.target = std::move(tgt);
  const TrainConfig cfg;
  const auto t0 = Clock::now();
  g.baseline = protocol({Framework::Baseline, nullptr, &g.target, std::nullopt}, cfg);
  g.mixed = protocol({Framework::Mixed, &g.source, &g.target, std::nullopt}, cfg);
  g.multi = protocol({Framework::Multi, &g.source, &g.target, std::nullopt}, cfg);
  const double secs = seconds_since(t0);
  const double b = g.baseline.summary.mean_f1, mx = g.mixed.summary.mean_f1, mt = g.multi.summary.mean_f1;
  const bool pass = mx >= b + 0.05 && mt >= b + 0.05 && secs < 900.0;
  return {pass, fmt("mean best F1 baseline %.4f (sd %.4f), mixed %.4f (sd %.4f), multi %.4f (sd %.4f), %.0fs", b,
                    g.baseline.summary.std_f1, mx, g.mixed.summary.std_f1, mt, g.multi.summary.std_f1, secs)};
}

Verdict criterion4() {
  SynthConfig s = similar_pair();
  s.source_labels = 4;
  s.target_labels = 2;
  s.similarity = 0.9;
  const auto [src, tgt] = synth_tasks(s, kDataSeed);
  const TrainConfig cfg;
  const auto base = protocol({Framework::Baseline, nullptr, &tgt, std::nullopt}, cfg);
  const auto multi = protocol({Framework::Multi, &src, &tgt, std::nullopt}, cfg);

  const auto vocab = experiment_vocabulary({Framework::SeqPartial, &src, &tgt, std::nullopt});
  const auto seq = train_seq<float>(src, tgt, vocab, cfg, TransferMode::Partial);
  const auto shared_src = shared_tensors(seq.source_phase.params);
  const auto shared_tgt = shared_tensors(seq.target_initial);
  bool encoder_equal = shared_src.size() == shared_tgt.size();
  for (std::size_t i = 0; encoder_equal && i < shared_src.size(); ++i) {
    encoder_equal = *shared_src[i].tensor == *shared_tgt[i].tensor;
  }
  const bool completed = static_cast<int>(seq.target_phase.history.epochs.size()) == cfg.epochs;
  const double seq_f1 = outcome_of(seq.target_phase.history).f1;
  const bool pass = multi.summary.mean_f1 >= base.summary.mean_f1 && completed && encoder_equal;
  return {pass, fmt("baseline %.4f, multi %.4f, seq-partial F1 %.4f, completed %s, step-0 encoder equal %s",
                    base.summary.mean_f1, multi.summary.mean_f1, seq_f1, completed ? "yes" : "no",
                    encoder_equal ? "yes" : "no")};
}

Verdict criterion5() {
  struct Case {
    double tl, base, expect;
  };
  const Case cases[] = {{0.680, 0.488, 39.34}, {0.561, 0.390, 43.84}, {0.394, 0.488, -19.26}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const double d = relative_improvement(c.tl, c.base);
    pass = pass && std::abs(d - c.expect) <= 0.01;
    if (!detail.empty()) detail += ", ";
    detail += fmt("(%.3f, %.3f) -> %.4f", c.tl, c.base, d);
  }
  return {pass, detail};
}

Verdict criterion6() {
  TaskSampler s(0.5, mix_seed(kBaseSeed, 4));
  std::vector<TaskSide> draws;
  std::size_t source = 0;
  for (int k = 0; k < 10000; ++k) {
    draws.push_back(s.next());
    source += draws.back() == TaskSide::Source;
  }
  TaskSampler again(0.5, mix_seed(kBaseSeed, 4));
  bool same = true;
  for (auto d : draws) same = same && again.next() == d;
  const double frac = static_cast<double>(source) / 10000.0;
  return {frac >= 0.485 && frac <= 0.515 && same,
          fmt("source fraction %.4f, reproducible %s", frac, same ? "yes" : "no")};
}

Verdict criterion7() {
  SynthConfig s;
  s.source_train = 300;
  s.target_train = 100;
  s.source_labels = 4;
  s.target_labels = 2;
  s.similarity = 0.9;
  const auto [src, tgt] = synth_tasks(s, kDataSeed);
  const auto vocab = build_vocabulary({src.train, tgt.train});
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.word_dim = 20;

  // Multi: replay the interleaved schedule and check the idle head after every step.
  auto p = init_params<float>(cfg, vocab.size(), {{"source", 4}, {"target", 2}}, 1);
  auto adam = AdamState<float>::fresh(p);
  const auto hp = AdamHyper::from(cfg);
  const auto se = encode_all(src.train, vocab, src.labels, cfg.position_clip);
  const auto te = encode_all(tgt.train, vocab, tgt.labels, cfg.position_clip);
  BatchStream ss(se.size(), 32, 1), ts(te.size(), 32, 2);
  TaskSampler sampler(0.5, 3);
  bool isolated = true;
  for (int step = 0; step < 40; ++step) {
    const bool from_source = sampler.next() == TaskSide::Source;
    const std::string active = from_source ? "source" : "target", idle = from_source ? "target" : "source";
    std::vector<EncodedInstance> batch;
    for (auto i : (from_source ? ss : ts).next()) batch.push_back(from_source ? se[i] : te[i]);
    const auto before = p.head(idle);
    adam_step(p, loss_and_grads(p, batch, active).grads, adam, hp, HeadSelection(active));
    isolated = isolated && p.head(idle).W == before.W && p.head(idle).b == before.b;
  }

  const auto q = init_params<float>(cfg, vocab.size(), {{"main", 4}}, 9);
  const bool full_identity = transfer_params(q, TransferMode::Full, 4, 0) == q;
  const auto partial = transfer_params(q, TransferMode::Partial, 2, 5);
  const auto a = shared_tensors(q), b = shared_tensors(partial);
  bool partial_identity = a.size() == b.size() && partial.head("main").labels() == 2;
  for (std::size_t i = 0; partial_identity && i < a.size(); ++i) partial_identity = *a[i].tensor == *b[i].tensor;

  int rejected = 0;
  for (auto f : {Framework::Mixed, Framework::SeqFull}) {
    try {
      validate_experiment({f, &src, &tgt, std::nullopt});
    } catch (const Error&) {
      ++rejected;
    }
  }
  const LabelSet three({"Neg", "A", "B"}, 0);
  try {
    check_bijection(three, three, LabelMapping{{"Neg", "Neg"}, {"A", "B"}, {"B", "B"}});
  } catch (const Error&) {
    ++rejected;
  }
  const bool pass = isolated && full_identity && partial_identity && rejected == 3;
  return {pass, fmt("head isolation over 40 steps %s, full identity %s, partial identity off-head %s, %d/3 rejections",
                    isolated ? "yes" : "no", full_identity ? "yes" : "no", partial_identity ? "yes" : "no",
                    rejected)};
}

Verdict criterion8() {
  std::mt19937_64 rng(88);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int L = std::uniform_int_distribution<int>(2, 7)(rng);
    const int neg = std::uniform_int_distribution<int>(0, L - 1)(rng);
    // Random confusion matrix, expanded into (gold, pred) pairs.
    std::vector<std::vector<std::size_t>> m(L, std::vector<std::size_t>(L));
    std::vector<int> gold, pred;
    for (int g = 0; g < L; ++g) {
      for (int q = 0; q < L; ++q) {
        m[g][q] = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
        for (std::size_t k = 0; k < m[g][q]; ++k) {
          gold.push_back(g);
          pred.push_back(q);
        }
      }
    }
    if (gold.empty()) {
      gold.push_back(0);
      pred.push_back(0);
      m[0][0] = 1;
    }
    std::vector<std::string> names;
    for (int k = 0; k < L; ++k) names.push_back("c" + std::to_string(k));
    const auto r = evaluate(gold, pred, LabelSet(names, static_cast<std::size_t>(neg)));
    auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };
    auto f1 = [](double p, double q) { return p + q > 0 ? 2 * p * q / (p + q) : 0.0; };
    double tp = 0, fp = 0, fn = 0;
    for (int c = 0; c < L; ++c) {
      double row = 0, col = 0;
      for (int k = 0; k < L; ++k) {
        row += static_cast<double>(m[c][k]);
        col += static_cast<double>(m[k][c]);
      }
      const double d = static_cast<double>(m[c][c]);
      const double P = ratio(d, col), R = ratio(d, row);
      worst = std::max({worst, std::abs(r.per_class[c].precision - P), std::abs(r.per_class[c].recall - R),
                        std::abs(r.per_class[c].f1 - f1(P, R))});
      if (c != neg) {
        tp += d;
        fp += col - d;
        fn += row - d;
      }
    }
    const double P = ratio(tp, tp + fp), R = ratio(tp, tp + fn);
    worst = std::max({worst, std::abs(r.micro.precision - P), std::abs(r.micro.recall - R),
                      std::abs(r.micro.f1 - f1(P, R))});
  }

  // Floor quota per class on random labelled sets.
  bool quota_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RelationInstance> data;
    const int classes = std::uniform_int_distribution<int>(1, 5)(rng);
    const int n = std::uniform_int_distribution<int>(1, 120)(rng);
    for (int i = 0; i < n; ++i) {
      RelationInstance r;
      r.id = std::to_string(i);
      r.label = "c" + std::to_string(std::uniform_int_distribution<int>(0, classes - 1)(rng));
      data.push_back(r);
    }
    const double f = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const auto part = stratified_partition(data, f, rng());
    const auto all = class_counts(data), sel = class_counts(part.selected);
    for (const auto& [label, count] : all) {
      const auto it = sel.find(label);
      const std::size_t got = it == sel.end() ? 0 : it->second;
      quota_ok = quota_ok && got == static_cast<std::size_t>(std::floor(f * static_cast<double>(count) + 1e-9));
    }
    quota_ok = quota_ok && part.selected.size() + part.remainder.size() == data.size();
  }
  return {worst <= 1e-12 && quota_ok, fmt("max metric deviation %.3g, floor quota %s", worst, quota_ok ? "ok" : "violated")};
}

Verdict criterion9() {
  if (!g_similar) return {false, "needs the similar-pair runs"};
  const auto& g = *g_similar;
  const std::vector<double> fractions{0.2};
  const auto t0 = Clock::now();
  const auto rows = ablate_source_size<float>(Framework::Mixed, g.source, g.target, fractions, TrainConfig{}, kRuns,
                                              kBaseSeed);
  const double secs = seconds_since(t0);
  // The fraction-1.0 row is the full-source Mixed protocol already run above.
  const double f02 = rows.at(0).summary.mean_f1, f10 = g.mixed.summary.mean_f1, base = g.baseline.summary.mean_f1;
  const bool pass = f02 > base && f10 >= f02 - 0.03;
  return {pass, fmt("mixed mean F1 at 0.2 (%zu source instances) %.4f, at 1.0 %.4f, baseline %.4f, %.0fs",
                    rows.at(0).source_size, f02, f10, base, secs)};
}

Verdict criterion10() {
  if (!g_similar) return {false, "needs the similar-pair runs"};
  const auto& g = *g_similar;
  TrainConfig c;
  c.seed = kBaseSeed;
  const auto base = run_experiment<float>({Framework::Baseline, nullptr, &g.target, std::nullopt}, c);
  const auto mixed = run_experiment<float>({Framework::Mixed, &g.source, &g.target, std::nullopt}, c);
  const auto multi = run_experiment<float>({Framework::Multi, &g.source, &g.target, std::nullopt}, c);
  const bool b = history_text(base.result.history) == g.baseline.first_history;
  const bool mx = history_text(mixed.result.history) == g.mixed.first_history;
  const bool mt = history_text(multi.result.history) == g.multi.first_history;
  return {b && mx && mt, fmt("history CSV identical on re-run: baseline %s, mixed %s, multi %s", b ? "yes" : "no",
                             mx ? "yes" : "no", mt ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  }
  std::cout << (failed ? "acceptance: FAIL (" + std::to_string(failed) + " failed)" : std::string("acceptance: PASS"))
            << std::endl;
  return failed ? 1 : 0;
}
