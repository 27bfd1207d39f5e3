#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlre/tlre.hpp"

namespace tlre::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared plumbing

/// Config file values overlaid with flags that were given on the command line.
struct Settings {
  std::string config_path;
  std::vector<std::string> overrides;  // KEY=VALUE
  std::map<std::string, std::string> flags;

  KeyValues resolve() const {
    KeyValues kv = config_path.empty() ? KeyValues{} : KeyValues::read(config_path);
    for (const auto& [k, v] : flags) kv.set(k, v);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) throw Error("--set expects KEY=VALUE, got '" + o + "'");
      kv.set(o.substr(0, eq), o.substr(eq + 1));
    }
    return kv;
  }
};

void add_settings(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", s.overrides, "override one config key (KEY=VALUE), repeatable");
}

/// Registers a string flag whose value, when given, overrides config key `key`.
CLI::Option* flag_option(CLI::App* cmd, Settings& s, const std::string& name, const std::string& key,
                         const std::string& help) {
  return cmd->add_option_function<std::string>(name, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

std::string absolute_or_empty(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

void require_distinct(const fs::path& in, const fs::path& out) {
  if (fs::exists(out) && fs::equivalent(in, out)) throw Error("output " + out.string() + " would overwrite input");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  KeyValues kv;
  kv.set(what, s);
  return kv.number<double>(what, 0.0);
}

void write_key(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << " = \"" << value << "\"\n";
}

// ---------------------------------------------------------------------------
// Task loading

struct TaskKeys {
  std::string dir, train, test, labels;
};

TaskKeys read_task_keys(const KeyValues& kv, const std::string& side) {
  return {absolute_or_empty(kv.str(side, "")), absolute_or_empty(kv.str(side + "_train", "")),
          absolute_or_empty(kv.str(side + "_test", "")), absolute_or_empty(kv.str("labels_" + side, ""))};
}

std::optional<TaskSpec> load_task(const TaskKeys& k, const std::string& side, bool normalize) {
  if (!k.dir.empty()) {
    if (!k.train.empty() || !k.test.empty()) throw Error("give either --" + side + " DIR or --" + side + "-train FILE");
    return load_task_dir(k.dir, side, normalize);
  }
  if (k.train.empty()) return std::nullopt;
  if (k.labels.empty()) throw Error("--" + side + "-train needs --labels-" + side);
  TaskSpec t = load_jsonl_dataset(k.train, k.labels, {normalize, side});
  if (!k.test.empty()) t.test = read_instances_jsonl(k.test, t.labels, {normalize, side});
  return t;
}

void write_task_keys(std::ostream& out, const TaskKeys& k, const std::string& side) {
  if (!k.dir.empty()) write_key(out, side, k.dir);
  if (!k.train.empty()) write_key(out, side + "_train", k.train);
  if (!k.test.empty()) write_key(out, side + "_test", k.test);
  if (!k.labels.empty()) write_key(out, "labels_" + side, k.labels);
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string in, labels, out;
  bool no_normalize = false;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  require_distinct(a.in, a.out);
  const LabelSet labels = read_labels(a.labels);
  std::ifstream in(a.in);
  if (!in) throw Error("cannot open " + a.in);
  std::vector<RelationInstance> instances;
  std::size_t sentences = 0, records = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      if (j.contains("entities")) {
        ++sentences;
        for (auto& inst : blind_and_expand(sentence_from_json(j), labels.negative_name())) {
          validate_instance(inst, &labels);
          instances.push_back(std::move(inst));
        }
      } else {
        ++records;
        auto inst = instance_from_json(j, !a.no_normalize);
        validate_instance(inst, &labels);
        instances.push_back(std::move(inst));
      }
    } catch (const std::exception& e) {
      throw Error(a.in + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  write_instances_jsonl(instances, fs::path(a.out));
  out << "wrote " << instances.size() << " instances to " << a.out << " (" << sentences << " sentences expanded, "
      << records << " instance records)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
  std::string in, labels, out_selected, out_remainder;
  double fraction = 0.0;
  std::uint64_t seed = 1;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  require_distinct(a.in, a.out_selected);
  require_distinct(a.in, a.out_remainder);
  const LabelSet labels = read_labels(a.labels);
  const auto data = read_instances_jsonl(a.in, labels, {false, ""});
  const auto part = stratified_partition(data, a.fraction, a.seed);
  write_instances_jsonl(part.selected, fs::path(a.out_selected));
  write_instances_jsonl(part.remainder, fs::path(a.out_remainder));
  const auto counts = class_counts(part.selected);
  out << "selected " << part.selected.size() << ", remainder " << part.remainder.size() << "\n";
  for (const auto& [label, n] : counts) out << "  " << label << ": " << n << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  Settings settings;
  std::string out_src, out_tgt;
};

void write_synth_config(const SynthConfig& c, std::uint64_t seed, std::ostream& out) {
  out << "seed = " << seed << "\n"
      << "source_train = " << c.source_train << "\n"
      << "source_test = " << c.source_test << "\n"
      << "target_train = " << c.target_train << "\n"
      << "target_test = " << c.target_test << "\n"
      << "source_labels = " << c.source_labels << "\n"
      << "target_labels = " << c.target_labels << "\n"
      << "source_triggers = " << c.source_triggers << "\n"
      << "target_triggers = " << c.target_triggers << "\n"
      << "vocab_size = " << c.vocab_size << "\n"
      << "min_len = " << c.min_len << "\n"
      << "max_len = " << c.max_len << "\n"
      << "similarity = " << format_double(c.similarity) << "\n";
  write_key(out, "entity_type", c.entity_type);
  write_key(out, "source_name", c.source_name);
  write_key(out, "target_name", c.target_name);
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const KeyValues kv = a.settings.resolve();
  const SynthConfig sc = synth_config_from(kv);
  const auto seed = kv.number<std::uint64_t>("seed", 1);
  kv.require_all_used();
  const auto [src, tgt] = synth_tasks(sc, seed);
  for (const auto& [task, dir] : {std::pair{&src, a.out_src}, std::pair{&tgt, a.out_tgt}}) {
    write_task_dir(*task, dir);
    auto f = open_out(fs::path(dir) / "config.resolved.toml");
    write_synth_config(sc, seed, f);
    out << task->name << ": " << task->train.size() << " train, " << task->test.size() << " test, "
        << task->labels.size() << " labels -> " << dir << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  Settings settings;
  std::string out;
};

struct TrainPlan {
  Framework framework = Framework::Baseline;
  TaskKeys source, target;
  std::string bijection, pretrained;
  std::size_t n_runs = 1;
  bool normalize = true;
  TrainConfig cfg;
};

TrainPlan read_train_plan(const KeyValues& kv) {
  TrainPlan p;
  const auto fw = kv.str("framework", "");
  if (fw.empty()) throw Error("train: --framework is required");
  p.framework = parse_framework(fw);
  p.source = read_task_keys(kv, "source");
  p.target = read_task_keys(kv, "target");
  p.bijection = absolute_or_empty(kv.str("bijection", ""));
  p.pretrained = absolute_or_empty(kv.str("pretrained", ""));
  const auto n = kv.number<long long>("n_runs", 1);
  if (n < 1) throw Error("n_runs must be at least 1");
  p.n_runs = static_cast<std::size_t>(n);
  const auto norm = kv.str("normalize", "true");
  if (norm != "true" && norm != "false") throw Error("normalize must be true or false");
  p.normalize = norm == "true";
  p.cfg = train_config_from(kv);
  kv.require_all_used();
  return p;
}

void write_train_plan(const TrainPlan& p, const std::string& out_dir, std::ostream& out) {
  out << "# resolved experiment; rerun with: tlre train --config <this file>\n";
  write_key(out, "framework", framework_name(p.framework));
  write_task_keys(out, p.source, "source");
  write_task_keys(out, p.target, "target");
  if (!p.bijection.empty()) write_key(out, "bijection", p.bijection);
  if (!p.pretrained.empty()) write_key(out, "pretrained", p.pretrained);
  out << "n_runs = " << p.n_runs << "\n";
  out << "normalize = " << (p.normalize ? "true" : "false") << "\n";
  write_key(out, "out", out_dir);
  write_train_config(p.cfg, out);
}

template <class T>
int run_training(const TrainPlan& plan, const std::string& out_dir, std::ostream& out) {
  auto target = load_task(plan.target, "target", plan.normalize);
  if (!target) throw Error("train: a target task is required (--target DIR or --target-train FILE)");
  auto source = load_task(plan.source, "source", plan.normalize);
  Experiment ex;
  ex.framework = plan.framework;
  ex.target = &*target;
  ex.source = source ? &*source : nullptr;
  if (!plan.bijection.empty()) ex.mapping = read_label_mapping(plan.bijection);
  validate_experiment(ex);  // fails fast on label-set mismatches

  fs::create_directories(out_dir);
  {
    auto f = open_out(fs::path(out_dir) / "config.resolved.toml");
    write_train_plan(plan, fs::absolute(out_dir).lexically_normal().string(), f);
  }

  std::optional<EmbeddingCoverage> coverage;
  std::function<void(ModelParams<T>&, const Vocabulary&)> on_init;
  if (!plan.pretrained.empty()) {
    on_init = [&](ModelParams<T>& p, const Vocabulary& v) { coverage = load_pretrained_embeddings(plan.pretrained, v, p); };
  }
  std::optional<ExperimentResult<T>> best;
  double best_f1 = -1.0;
  std::size_t run = 0;
  const auto summary = run_protocol(
      [&](std::uint64_t seed) {
        TrainConfig c = plan.cfg;
        c.seed = seed;
        auto r = run_experiment<T>(ex, c, on_init);
        if (plan.n_runs > 1) {
          auto f = open_out(fs::path(out_dir) / ("history_run" + std::to_string(run) + ".csv"));
          write_history_csv(r.result.history, f);
        }
        ++run;
        RunOutcome o = c.epochs > 0 ? outcome_of(r.result.history) : RunOutcome{};
        out << "run " << run - 1 << " seed " << seed << ": best F1 " << std::setprecision(4) << o.f1 << " (epoch "
            << o.best_epoch << ")\n";
        if (o.f1 > best_f1) {
          best_f1 = o.f1;
          best = std::move(r);
        }
        return o;
      },
      plan.n_runs, plan.cfg.seed);

  {
    auto f = open_out(fs::path(out_dir) / "history.csv");
    write_history_csv(best->result.history, f);
  }
  save_checkpoint(best->result.params, best->vocab, plan.cfg, best->head_labels, fs::path(out_dir) / "model.ckpt");
  json j = summary_json(summary);
  j["framework"] = framework_name(plan.framework);
  j["base_seed"] = plan.cfg.seed;
  j["eval_head"] = best->result.eval_head;
  j["vocab_size"] = best->vocab.size();
  if (coverage) j["pretrained"] = {{"found", coverage->found}, {"missing", coverage->missing}, {"warnings", coverage->warnings}};
  {
    auto f = open_out(fs::path(out_dir) / "summary.json");
    f << j.dump(2) << "\n";
  }
  out << framework_name(plan.framework) << ": mean best F1 " << std::setprecision(4) << summary.mean_f1 << " +- "
      << summary.std_f1 << " over " << summary.n() << " run(s); artifacts in " << out_dir << "\n";
  return 0;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  KeyValues kv = a.settings.resolve();
  if (!a.out.empty()) kv.set("out", a.out);
  const std::string out_dir = kv.str("out", "");
  if (out_dir.empty()) throw Error("train: --out DIR is required");
  const TrainPlan plan = read_train_plan(kv);
  return plan.cfg.precision == Precision::Double ? run_training<double>(plan, out_dir, out)
                                                 : run_training<float>(plan, out_dir, out);
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string checkpoint, data, labels, head, out;
};

template <class T>
int run_evaluate(const EvaluateArgs& a, const Checkpoint<double>& ck, std::ostream& out) {
  const ModelParams<T> params = cast_params<T>(ck.params);
  std::string head = a.head;
  if (head.empty()) head = ck.head_labels.count(kTargetHead) ? kTargetHead : kMainHead;
  auto it = ck.head_labels.find(head);
  if (it == ck.head_labels.end()) throw Error("checkpoint has no head '" + head + "'");
  const LabelSet& labels = it->second;

  std::vector<RelationInstance> data;
  if (fs::is_directory(a.data)) {
    if (!a.labels.empty() && !(read_labels(a.labels) == labels)) throw Error("--labels do not match the head's labels");
    const auto task = load_task_dir(a.data, "eval");
    if (!(task.labels == labels)) throw Error("task labels do not match the labels of head '" + head + "'");
    data = task.test.empty() ? task.train : task.test;
  } else {
    const LabelSet given = a.labels.empty() ? labels : read_labels(a.labels);
    if (!(given == labels)) throw Error("--labels do not match the labels of head '" + head + "'");
    data = read_instances_jsonl(a.data, labels, {true, "eval"});
  }
  if (data.empty()) throw Error("no instances to evaluate in " + a.data);
  const auto encoded = encode_all(data, ck.vocab, labels, position_clip_of(params));
  const auto pred = predict_labels(params, std::span<const EncodedInstance>(encoded), head);
  std::vector<int> gold;
  for (const auto& e : encoded) gold.push_back(e.label);
  const EvalReport r = evaluate(gold, pred, labels);

  fs::create_directories(a.out);
  {
    auto f = open_out(fs::path(a.out) / "report.csv");
    write_report_csv(r, f);
  }
  json j = report_json(r);
  j["head"] = head;
  j["instances"] = data.size();
  j["checkpoint"] = fs::absolute(a.checkpoint).lexically_normal().string();
  j["data"] = fs::absolute(a.data).lexically_normal().string();
  {
    auto f = open_out(fs::path(a.out) / "summary.json");
    f << j.dump(2) << "\n";
  }
  out << "head " << head << ", " << data.size() << " instances: P " << std::setprecision(4) << r.micro.precision
      << " R " << r.micro.recall << " F1 " << r.micro.f1 << "\n";
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  // Stored values widen exactly to double; single-precision models are
  // narrowed back before evaluation.
  const auto ck = load_checkpoint<double>(fs::path(a.checkpoint));
  return ck.config.precision == Precision::Double ? run_evaluate<double>(a, ck, out) : run_evaluate<float>(a, ck, out);
}

// ---------------------------------------------------------------------------
// ablate

struct AblateArgs {
  Settings settings;
  std::string out;
};

template <class T>
int run_ablate(const KeyValues& kv, const std::string& out_dir, std::ostream& out) {
  const std::string kind = kv.str("kind", "source-size");
  const Framework fw = parse_framework(kv.str("framework", "mixed"));
  const auto target_dir = absolute_or_empty(kv.str("target", ""));
  if (target_dir.empty()) throw Error("ablate: --target DIR is required");
  const auto n_runs = kv.number<long long>("n_runs", 5);
  if (n_runs < 1) throw Error("n_runs must be at least 1");
  const std::string bijection = absolute_or_empty(kv.str("bijection", ""));
  const std::string source_dir = absolute_or_empty(kv.str("source", ""));
  const std::string sources = kv.str("sources", "");
  const std::string fractions_s = kv.str("fractions", "0.2,0.4,0.6,0.8,1.0");
  const auto count = kv.number<long long>("count", 0);
  const TrainConfig cfg = train_config_from(kv);
  kv.require_all_used();

  const TaskSpec target = load_task_dir(target_dir, "target");
  std::vector<AblationRow> rows;
  std::vector<std::string> resolved_sources;
  if (kind == "source-size") {
    if (source_dir.empty()) throw Error("ablate source-size: --source DIR is required");
    const TaskSpec source = load_task_dir(source_dir, "source");
    std::vector<double> fractions;
    for (const auto& f : split_list(fractions_s)) fractions.push_back(parse_double(f, "fractions"));
    if (fractions.empty()) throw Error("ablate: --fractions is empty");
    std::optional<LabelMapping> mapping;
    if (!bijection.empty()) mapping = read_label_mapping(bijection);
    rows = ablate_source_size<T>(fw, source, target, fractions, cfg, static_cast<std::size_t>(n_runs), cfg.seed, mapping);
  } else if (kind == "same-size") {
    if (count < 1) throw Error("ablate same-size: --count must be positive");
    std::vector<TaskSpec> tasks;
    for (const auto& s : split_list(sources)) {
      resolved_sources.push_back(absolute_or_empty(s));
      tasks.push_back(load_task_dir(resolved_sources.back()));
    }
    if (tasks.empty()) throw Error("ablate same-size: --sources is empty");
    std::vector<const TaskSpec*> ptrs;
    for (const auto& t : tasks) ptrs.push_back(&t);
    rows = ablate_same_size<T>(fw, ptrs, target, static_cast<std::size_t>(count), cfg, static_cast<std::size_t>(n_runs),
                               cfg.seed);
  } else {
    throw Error("ablate: --kind must be source-size or same-size, got '" + kind + "'");
  }

  fs::create_directories(out_dir);
  {
    auto f = open_out(fs::path(out_dir) / "ablation.csv");
    write_ablation_csv(rows, f);
  }
  {
    auto f = open_out(fs::path(out_dir) / "config.resolved.toml");
    f << "# resolved ablation; rerun with: tlre ablate --config <this file>\n";
    write_key(f, "kind", kind);
    write_key(f, "framework", framework_name(fw));
    write_key(f, "target", target_dir);
    if (kind == "source-size") {
      write_key(f, "source", source_dir);
      write_key(f, "fractions", fractions_s);
      if (!bijection.empty()) write_key(f, "bijection", bijection);
    } else {
      std::string joined;
      for (const auto& s : resolved_sources) joined += (joined.empty() ? "" : ",") + s;
      write_key(f, "sources", joined);
      f << "count = " << count << "\n";
    }
    f << "n_runs = " << n_runs << "\n";
    write_key(f, "out", fs::absolute(out_dir).lexically_normal().string());
    write_train_config(cfg, f);
  }
  for (const auto& r : rows) {
    out << r.setting << " (" << r.source_size << " source instances): mean F1 " << std::setprecision(4)
        << r.summary.mean_f1 << " +- " << r.summary.std_f1 << "\n";
  }
  return 0;
}

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  KeyValues kv = a.settings.resolve();
  if (!a.out.empty()) kv.set("out", a.out);
  const std::string out_dir = kv.str("out", "");
  if (out_dir.empty()) throw Error("ablate: --out DIR is required");
  const auto precision = kv.has("precision") ? kv.values().at("precision") : "single";
  return precision == "double" ? run_ablate<double>(kv, out_dir, out) : run_ablate<float>(kv, out_dir, out);
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  std::uint64_t seed = 7;
  GradcheckShape shape;
  double tolerance = 1e-4;
};

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  const auto report = run_gradcheck(a.seed, a.shape);
  out << std::left << std::setw(16) << "tensor" << std::setw(8) << "coords" << "max_rel_error\n";
  for (const auto& t : report.tensors) {
    out << std::setw(16) << t.name << std::setw(8) << t.coords_checked << std::scientific << std::setprecision(3)
        << t.max_rel_error << std::defaultfloat << "\n";
  }
  const bool ok = report.passed(a.tolerance);
  out << (ok ? "PASS" : "FAIL") << ": max relative error " << std::scientific << std::setprecision(3)
      << report.max_rel_error() << std::defaultfloat << " (tolerance " << a.tolerance << ")\n";
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relation extraction with a BLSTM encoder and transfer learning between tasks", "tlre"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Blind, expand, and normalize a JSONL corpus into instance records");
  c_pre->add_option("--in", pre.in, "input JSONL (instance or sentence records)")->required()->check(CLI::ExistingFile);
  c_pre->add_option("--labels", pre.labels, "labels file (one per line, negative marked NEG:)")
      ->required()
      ->check(CLI::ExistingFile);
  c_pre->add_option("--out", pre.out, "output JSONL of instance records")->required();
  c_pre->add_flag("--no-normalize", pre.no_normalize, "keep instance-record tokens as they are");

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Stratified per-class split of an instance file");
  c_split->add_option("--in", split.in)->required()->check(CLI::ExistingFile);
  c_split->add_option("--labels", split.labels)->required()->check(CLI::ExistingFile);
  c_split->add_option("--fraction", split.fraction, "share selected from every class")->required();
  c_split->add_option("--seed", split.seed);
  c_split->add_option("--out-selected", split.out_selected)->required();
  c_split->add_option("--out-remainder", split.out_remainder)->required();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic source/target task pair");
  add_settings(c_synth, synth.settings);
  flag_option(c_synth, synth.settings, "--seed", "seed", "generator seed");
  flag_option(c_synth, synth.settings, "--similarity", "similarity", "shared share of target words and triggers");
  flag_option(c_synth, synth.settings, "--source-labels", "source_labels", "label count of the source task");
  flag_option(c_synth, synth.settings, "--target-labels", "target_labels", "label count of the target task");
  c_synth->add_option("--out-src", synth.out_src, "source task directory")->required();
  c_synth->add_option("--out-tgt", synth.out_tgt, "target task directory")->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train the baseline or a transfer framework");
  add_settings(c_train, train.settings);
  const std::vector<std::pair<std::string, std::string>> train_flags{
      {"--framework", "framework"},         {"--source", "source"},
      {"--target", "target"},               {"--source-train", "source_train"},
      {"--source-test", "source_test"},     {"--labels-source", "labels_source"},
      {"--target-train", "target_train"},   {"--target-test", "target_test"},
      {"--labels-target", "labels_target"}, {"--bijection", "bijection"},
      {"--pretrained", "pretrained"},       {"--n-runs", "n_runs"},
      {"--seed", "seed"},                   {"--epochs", "epochs"},
      {"--precision", "precision"}};
  for (const auto& [flag, key] : train_flags) flag_option(c_train, train.settings, flag, key, "sets config key " + key);
  c_train->add_option("--out", train.out, "output directory");

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Score a checkpoint on labelled instances");
  c_eval->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--data", ev.data, "instance JSONL, or a task directory (its test.jsonl)")
      ->required()
      ->check(CLI::ExistingPath);
  c_eval->add_option("--labels", ev.labels, "labels file; must match the head")->check(CLI::ExistingFile);
  c_eval->add_option("--head", ev.head, "head to score (default: target, else main)");
  c_eval->add_option("--out", ev.out, "output directory")->required();

  AblateArgs abl;
  auto* c_abl = app.add_subcommand("ablate", "Source-size or equal-size source ablation");
  add_settings(c_abl, abl.settings);
  const std::vector<std::pair<std::string, std::string>> abl_flags{
      {"--kind", "kind"},       {"--framework", "framework"}, {"--source", "source"},
      {"--sources", "sources"}, {"--target", "target"},       {"--fractions", "fractions"},
      {"--count", "count"},     {"--n-runs", "n_runs"},       {"--seed", "seed"},
      {"--epochs", "epochs"},   {"--bijection", "bijection"}};
  for (const auto& [flag, key] : abl_flags) flag_option(c_abl, abl.settings, flag, key, "sets config key " + key);
  c_abl->add_option("--out", abl.out, "output directory");

  GradcheckArgs gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
  c_gc->add_option("--seed", gc.seed);
  c_gc->add_option("--hidden", gc.shape.hidden);
  c_gc->add_option("--vocab", gc.shape.vocab);
  c_gc->add_option("--max-len", gc.shape.max_len);
  c_gc->add_option("--labels", gc.shape.labels);
  c_gc->add_option("--batch", gc.shape.batch);
  c_gc->add_option("--tolerance", gc.tolerance);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (c_pre->parsed()) return cmd_preprocess(pre, out);
    if (c_split->parsed()) return cmd_split(split, out);
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_train->parsed()) return cmd_train(train, out);
    if (c_eval->parsed()) return cmd_evaluate(ev, out);
    if (c_abl->parsed()) return cmd_ablate(abl, out);
    if (c_gc->parsed()) return cmd_gradcheck(gc, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace tlre::cli
