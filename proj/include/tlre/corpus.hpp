#pragma once

// Dataset ingestion and preprocessing: token normalization, entity blinding
// with pairwise expansion, stratified partitioning, vocabulary construction,
// JSONL reading/writing and a synthetic task generator.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tlre/common.hpp"

namespace tlre {

struct EntitySpan {
  std::size_t begin = 0;  // first token
  std::size_t end = 0;    // one past the last token
  std::string type;
};

/// A pre-tokenized sentence with its entity mentions. `pair_labels` holds the
/// gold relation for entity pairs (indices into `entities`, lower index first);
/// unlisted pairs get the negative label during expansion.
struct RawSentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<EntitySpan> entities;
  std::map<std::pair<std::size_t, std::size_t>, std::string> pair_labels;
};

struct RelationInstance {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t e1_index = 0;
  std::size_t e2_index = 0;
  std::string e1_type;
  std::string e2_type;
  std::string label;
  std::string origin_task;

  bool operator==(const RelationInstance&) const = default;
};

/// Ordered label names with the designated "no relation" class.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::vector<std::string> names, std::size_t negative)
      : names_(std::move(names)), negative_(negative) {
    if (names_.empty()) throw Error("label set is empty");
    if (negative_ >= names_.size()) throw Error("negative label index out of range");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second) {
        throw Error("duplicate label '" + names_[i] + "'");
      }
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::size_t negative() const { return negative_; }
  const std::string& negative_name() const { return names_.at(negative_); }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index(const std::string& name) const {
    auto i = find(name);
    if (!i) throw Error("unknown label '" + name + "'");
    return *i;
  }

  bool operator==(const LabelSet& o) const {
    return names_ == o.names_ && negative_ == o.negative_;
  }

 private:
  std::vector<std::string> names_;
  std::size_t negative_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TaskSpec {
  std::string name;
  LabelSet labels;
  std::vector<RelationInstance> train;
  std::vector<RelationInstance> test;
};

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary() {
    add(kPadToken);
    add(kUnkToken);
  }

  int add(const std::string& token) {
    auto [it, inserted] = ids_.emplace(token, static_cast<int>(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  int lookup(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }

  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Rebuilds a vocabulary from its id-ordered token list (checkpoint loading).
  static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
    if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
      throw Error("vocabulary must start with <pad>, <unk>");
    }
    Vocabulary v;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      if (v.add(tokens[i]) != static_cast<int>(i)) {
        throw Error("duplicate vocabulary token '" + tokens[i] + "'");
      }
    }
    return v;
  }

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
};

// ---------------------------------------------------------------------------
// Normalization and blinding

/// Lowercases and replaces each maximal digit run with "DG". An existing "DG"
/// is copied verbatim so the function is idempotent. Sentinels pass unchanged.
inline std::string normalize_token(const std::string& raw, bool is_entity_sentinel) {
  if (is_entity_sentinel) return raw;
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw.compare(i, 2, "DG") == 0) {
      out += "DG";
      i += 2;
    } else if (std::isdigit(static_cast<unsigned char>(raw[i]))) {
      while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) ++i;
      out += "DG";
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i])));
      ++i;
    }
  }
  return out;
}

inline std::string sentinel_a(const std::string& type) { return type + "A"; }
inline std::string sentinel_b(const std::string& type) { return type + "B"; }

/// Throws unless `inst` satisfies the RelationInstance invariants (and, when
/// given, carries a label from `labels`).
inline void validate_instance(const RelationInstance& inst, const LabelSet* labels = nullptr) {
  const auto m = inst.tokens.size();
  auto fail = [&](const std::string& what) {
    throw Error("instance '" + inst.id + "': " + what);
  };
  if (m == 0) fail("no tokens");
  if (inst.e1_index >= m) fail("e1 index " + std::to_string(inst.e1_index) + " out of bounds");
  if (inst.e2_index >= m) fail("e2 index " + std::to_string(inst.e2_index) + " out of bounds");
  if (inst.e1_index == inst.e2_index) fail("e1 and e2 share a token");
  if (inst.tokens[inst.e1_index] != sentinel_a(inst.e1_type)) fail("token at e1 is not " + sentinel_a(inst.e1_type));
  if (inst.tokens[inst.e2_index] != sentinel_b(inst.e2_type)) fail("token at e2 is not " + sentinel_b(inst.e2_type));
  if (labels && !labels->find(inst.label)) fail("unknown label '" + inst.label + "'");
}

inline void validate_sentence(const RawSentence& s) {
  std::vector<EntitySpan> sorted = s.entities;
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.begin < b.begin; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& e = sorted[k];
    if (e.begin >= e.end) throw Error("sentence '" + s.id + "': empty entity span");
    if (e.end > s.tokens.size()) throw Error("sentence '" + s.id + "': entity span out of bounds");
    if (e.type.empty()) throw Error("sentence '" + s.id + "': entity without type");
    if (k > 0 && sorted[k - 1].end > e.begin) throw Error("sentence '" + s.id + "': overlapping entities");
  }
}

/// One instance per unordered entity pair. The earlier mention becomes
/// <type>A and the later one <type>B; each targeted mention collapses to a
/// single sentinel token and all other tokens are normalized.
inline std::vector<RelationInstance> blind_and_expand(const RawSentence& s,
                                                      const std::string& negative_label) {
  if (s.entities.size() < 2) {
    throw Error("sentence '" + s.id + "' has " + std::to_string(s.entities.size()) +
                " entities; pairwise expansion needs at least 2 (0 instances produced)");
  }
  validate_sentence(s);

  // Entity order by span start, remembering original indices for pair_labels.
  std::vector<std::size_t> order(s.entities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.entities[a].begin < s.entities[b].begin;
  });

  std::vector<RelationInstance> out;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto& ea = s.entities[order[a]];
      const auto& eb = s.entities[order[b]];
      RelationInstance inst;
      inst.id = s.id + "_" + std::to_string(a) + "_" + std::to_string(b);
      inst.e1_type = ea.type;
      inst.e2_type = eb.type;
      for (std::size_t t = 0; t < s.tokens.size();) {
        if (t == ea.begin) {
          inst.e1_index = inst.tokens.size();
          inst.tokens.push_back(sentinel_a(ea.type));
          t = ea.end;
        } else if (t == eb.begin) {
          inst.e2_index = inst.tokens.size();
          inst.tokens.push_back(sentinel_b(eb.type));
          t = eb.end;
        } else {
          inst.tokens.push_back(normalize_token(s.tokens[t], false));
          ++t;
        }
      }
      auto key = std::minmax(order[a], order[b]);
      auto it = s.pair_labels.find({key.first, key.second});
      inst.label = it == s.pair_labels.end() ? negative_label : it->second;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

/// Hook for filtering negative instances before training. The default keeps
/// everything.
using InstanceFilter = std::function<bool(const RelationInstance&)>;

inline std::vector<RelationInstance> apply_filter(std::vector<RelationInstance> instances,
                                                  const InstanceFilter& keep) {
  if (!keep) return instances;
  std::erase_if(instances, [&](const RelationInstance& r) { return !keep(r); });
  return instances;
}

// ---------------------------------------------------------------------------
// Partitioning

inline std::map<std::string, std::size_t> class_counts(std::span<const RelationInstance> instances) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : instances) ++counts[r.label];
  return counts;
}

/// floor(fraction * count), robust to representation error in `fraction`.
inline std::size_t stratified_quota(double fraction, std::size_t count) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count) + 1e-9));
}

struct Partition {
  std::vector<RelationInstance> selected;
  std::vector<RelationInstance> remainder;
};

/// Selects floor(fraction * |c|) instances of every class c uniformly at random
/// (classes visited in label-name order, one generator seeded once). Both
/// outputs keep the input order.
inline Partition stratified_partition(std::span<const RelationInstance> instances, double fraction,
                                      std::uint64_t seed) {
  if (instances.empty()) throw Error("stratified_partition: empty input");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error("stratified_partition: fraction must lie in (0,1), got " + std::to_string(fraction));
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) by_class[instances[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<char> chosen(instances.size(), 0);
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto quota = stratified_quota(fraction, idx.size());
    for (std::size_t k = 0; k < quota; ++k) chosen[idx[k]] = 1;
  }
  Partition p;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    (chosen[i] ? p.selected : p.remainder).push_back(instances[i]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Vocabulary

/// PAD, UNK, then tokens in first-occurrence order over the collections as given.
inline Vocabulary build_vocabulary(std::initializer_list<std::span<const RelationInstance>> collections) {
  bool any = false;
  Vocabulary v;
  for (const auto& c : collections) {
    for (const auto& inst : c) {
      any = true;
      for (const auto& t : inst.tokens) v.add(t);
    }
  }
  if (!any) throw Error("build_vocabulary: all collections are empty");
  return v;
}

// ---------------------------------------------------------------------------
// Files

inline LabelSet parse_labels(std::istream& in, const std::string& source = "labels") {
  std::vector<std::string> names;
  std::optional<std::size_t> negative;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("NEG:", 0) == 0) {
      if (negative) throw Error(source + ":" + std::to_string(lineno) + ": second NEG: label");
      negative = names.size();
      line = line.substr(4);
    }
    if (line.empty()) throw Error(source + ":" + std::to_string(lineno) + ": empty label name");
    names.push_back(line);
  }
  if (!negative) throw Error(source + ": no label marked with NEG:");
  return LabelSet(std::move(names), *negative);
}

inline LabelSet read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open labels file " + path.string());
  return parse_labels(in, path.string());
}

inline void write_labels(const LabelSet& labels, std::ostream& out) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i == labels.negative()) out << "NEG:";
    out << labels.name(i) << '\n';
  }
}

inline void write_labels(const LabelSet& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_labels(labels, out);
}

inline nlohmann::json instance_to_json(const RelationInstance& r) {
  return nlohmann::json{{"id", r.id},         {"tokens", r.tokens},   {"e1", r.e1_index},
                        {"e2", r.e2_index},   {"e1_type", r.e1_type}, {"e2_type", r.e2_type},
                        {"label", r.label}};
}

/// Parses one instance record. Tokens at e1/e2 become the type sentinels;
/// others are normalized unless `normalize` is false.
inline RelationInstance instance_from_json(const nlohmann::json& j, bool normalize) {
  RelationInstance r;
  r.id = j.at("id").get<std::string>();
  r.tokens = j.at("tokens").get<std::vector<std::string>>();
  const auto e1 = j.at("e1").get<long long>();
  const auto e2 = j.at("e2").get<long long>();
  r.e1_type = j.at("e1_type").get<std::string>();
  r.e2_type = j.at("e2_type").get<std::string>();
  r.label = j.at("label").get<std::string>();
  const auto m = static_cast<long long>(r.tokens.size());
  if (e1 < 0 || e1 >= m) throw Error("e1 index " + std::to_string(e1) + " out of bounds for " + std::to_string(m) + " tokens");
  if (e2 < 0 || e2 >= m) throw Error("e2 index " + std::to_string(e2) + " out of bounds for " + std::to_string(m) + " tokens");
  r.e1_index = static_cast<std::size_t>(e1);
  r.e2_index = static_cast<std::size_t>(e2);
  for (std::size_t t = 0; t < r.tokens.size(); ++t) {
    if (t == r.e1_index) {
      r.tokens[t] = sentinel_a(r.e1_type);
    } else if (t == r.e2_index) {
      r.tokens[t] = sentinel_b(r.e2_type);
    } else if (normalize) {
      r.tokens[t] = normalize_token(r.tokens[t], false);
    }
  }
  return r;
}

inline RawSentence sentence_from_json(const nlohmann::json& j) {
  RawSentence s;
  s.id = j.at("id").get<std::string>();
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  for (const auto& e : j.at("entities")) {
    s.entities.push_back({e.at("start").get<std::size_t>(), e.at("end").get<std::size_t>(),
                          e.at("type").get<std::string>()});
  }
  if (j.contains("relations")) {
    for (const auto& rel : j.at("relations")) {
      auto a = rel.at("e1").get<std::size_t>();
      auto b = rel.at("e2").get<std::size_t>();
      if (a >= s.entities.size() || b >= s.entities.size() || a == b) {
        throw Error("relation refers to invalid entity index");
      }
      s.pair_labels[std::minmax(a, b)] = rel.at("label").get<std::string>();
    }
  }
  return s;
}

struct LoadOptions {
  bool normalize = true;
  std::string origin_task;
};

/// Reads instance records (one JSON object per line). Every failure names the
/// file and line.
inline std::vector<RelationInstance> read_instances_jsonl(const std::filesystem::path& path,
                                                          const LabelSet& labels,
                                                          const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  std::vector<RelationInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto inst = instance_from_json(nlohmann::json::parse(line), opts.normalize);
      inst.origin_task = opts.origin_task;
      validate_instance(inst, &labels);
      out.push_back(std::move(inst));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline void write_instances_jsonl(std::span<const RelationInstance> instances, std::ostream& out) {
  for (const auto& r : instances) out << instance_to_json(r).dump() << '\n';
}

inline void write_instances_jsonl(std::span<const RelationInstance> instances,
                                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_instances_jsonl(instances, out);
}

/// A single JSONL file plus its labels file; all records land in `train`.
inline TaskSpec load_jsonl_dataset(const std::filesystem::path& path,
                                   const std::filesystem::path& labels_path,
                                   LoadOptions opts = {}) {
  TaskSpec t;
  t.name = opts.origin_task.empty() ? path.stem().string() : opts.origin_task;
  opts.origin_task = t.name;
  t.labels = read_labels(labels_path);
  t.train = read_instances_jsonl(path, t.labels, opts);
  return t;
}

/// Task directory layout: labels.txt, train.jsonl, test.jsonl (optional).
inline TaskSpec load_task_dir(const std::filesystem::path& dir, const std::string& name = {},
                              bool normalize = true) {
  TaskSpec t;
  t.name = name.empty() ? dir.filename().string() : name;
  t.labels = read_labels(dir / "labels.txt");
  LoadOptions opts{normalize, t.name};
  t.train = read_instances_jsonl(dir / "train.jsonl", t.labels, opts);
  if (std::filesystem::exists(dir / "test.jsonl")) {
    t.test = read_instances_jsonl(dir / "test.jsonl", t.labels, opts);
  }
  return t;
}

inline void write_task_dir(const TaskSpec& task, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_labels(task.labels, dir / "labels.txt");
  write_instances_jsonl(task.train, dir / "train.jsonl");
  write_instances_jsonl(task.test, dir / "test.jsonl");
}

// ---------------------------------------------------------------------------
// Synthetic tasks

struct SynthConfig {
  std::size_t source_train = 2000;
  std::size_t source_test = 200;
  std::size_t target_train = 100;
  std::size_t target_test = 200;
  std::size_t source_labels = 2;
  std::size_t target_labels = 2;
  std::size_t source_triggers = 0;  // 0 = 3 per label
  std::size_t target_triggers = 0;
  std::size_t vocab_size = 200;     // content words per task
  std::size_t min_len = 6;
  std::size_t max_len = 14;
  double similarity = 1.0;
  std::string entity_type = "Drug";
  std::string source_name = "source";
  std::string target_name = "target";
};

/// Purely alphabetic code for an index, so generated words survive digit
/// normalization intact.
inline std::string letter_code(std::size_t n) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + n % 26));
    n /= 26;
  } while (n > 0);
  return s;
}

/// Label names: "Neg" (negative, index 0), then "RelA", "RelB", ...
inline LabelSet synth_labels(std::size_t count) {
  std::vector<std::string> names{"Neg"};
  for (std::size_t i = 1; i < count; ++i) {
    std::string code = letter_code(i - 1);
    code[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(code[0])));
    names.push_back("Rel" + code);
  }
  return LabelSet(std::move(names), 0);
}

namespace detail {

struct SynthVocab {
  std::vector<std::string> content;
  std::vector<std::string> triggers;  // trigger k signals label k % labels
};

inline RawSentence synth_sentence(const SynthVocab& v, std::size_t labels, const SynthConfig& cfg,
                                  const std::string& id, const LabelSet& label_set,
                                  std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len_dist(cfg.min_len, cfg.max_len);
  std::uniform_int_distribution<std::size_t> word(0, v.content.size() - 1);
  std::uniform_int_distribution<std::size_t> label_dist(0, labels - 1);
  const std::size_t len = len_dist(rng);
  const std::size_t label = label_dist(rng);
  // Triggers of this label: label, label + labels, ...
  const std::size_t per_label = (v.triggers.size() - label + labels - 1) / labels;
  std::uniform_int_distribution<std::size_t> trig_dist(0, per_label - 1);
  const std::string& trigger = v.triggers[label + labels * trig_dist(rng)];

  // Three distinct ordered positions: e1 < trigger < e2.
  std::vector<std::size_t> slots(len);
  for (std::size_t i = 0; i < len; ++i) slots[i] = i;
  std::shuffle(slots.begin(), slots.end(), rng);
  std::sort(slots.begin(), slots.begin() + 3);
  const std::size_t p1 = slots[0], pt = slots[1], p2 = slots[2];

  RawSentence s;
  s.id = id;
  for (std::size_t i = 0; i < len; ++i) {
    if (i == p1 || i == p2) {
      s.tokens.push_back("ent_" + letter_code(word(rng)));
    } else if (i == pt) {
      s.tokens.push_back(trigger);
    } else {
      s.tokens.push_back(v.content[word(rng)]);
    }
  }
  s.entities.push_back({p1, p1 + 1, cfg.entity_type});
  s.entities.push_back({p2, p2 + 1, cfg.entity_type});
  s.pair_labels[{0, 1}] = label_set.name(label);
  return s;
}

}  // namespace detail

/// Generates a source/target pair from a trigger-token template. A fraction
/// `similarity` of the target's content words and trigger slots are shared
/// with the source; the rest are target-only tokens.
inline std::pair<TaskSpec, TaskSpec> synth_tasks(const SynthConfig& cfg, std::uint64_t seed) {
  const std::size_t src_trig = cfg.source_triggers ? cfg.source_triggers : 3 * cfg.source_labels;
  const std::size_t tgt_trig = cfg.target_triggers ? cfg.target_triggers : 3 * cfg.target_labels;
  if (cfg.source_labels < 2 || cfg.target_labels < 2) throw Error("synth: each task needs at least 2 labels");
  if (cfg.source_labels > src_trig || cfg.target_labels > tgt_trig) {
    throw Error("synth: more labels than triggers");
  }
  if (cfg.vocab_size == 0) throw Error("synth: vocab_size must be positive");
  if (cfg.min_len < 3 || cfg.max_len < cfg.min_len) throw Error("synth: need 3 <= min_len <= max_len");
  if (!(cfg.similarity >= 0.0 && cfg.similarity <= 1.0)) throw Error("synth: similarity must lie in [0,1]");
  if (cfg.source_train == 0 || cfg.target_train == 0) throw Error("synth: train sizes must be positive");
  if (cfg.entity_type.empty()) throw Error("synth: entity_type must be non-empty");

  detail::SynthVocab src, tgt;
  const auto shared_words = static_cast<std::size_t>(std::llround(cfg.similarity * cfg.vocab_size));
  for (std::size_t i = 0; i < cfg.vocab_size; ++i) {
    src.content.push_back((i < shared_words ? "c_" : "s_") + letter_code(i));
    tgt.content.push_back((i < shared_words ? "c_" : "t_") + letter_code(i));
  }
  const auto shared_trig = static_cast<std::size_t>(std::llround(cfg.similarity * tgt_trig));
  for (std::size_t i = 0; i < src_trig; ++i) src.triggers.push_back("trig_" + letter_code(i));
  for (std::size_t i = 0; i < tgt_trig; ++i) {
    tgt.triggers.push_back(i < shared_trig && i < src_trig ? src.triggers[i] : "t_trig_" + letter_code(i));
  }

  std::mt19937_64 rng(seed);
  auto make = [&](const detail::SynthVocab& v, std::size_t labels, const std::string& name,
                  std::size_t n_train, std::size_t n_test) {
    TaskSpec t;
    t.name = name;
    t.labels = synth_labels(labels);
    auto gen = [&](std::size_t n, const std::string& split, std::vector<RelationInstance>& dst) {
      for (std::size_t i = 0; i < n; ++i) {
        auto s = detail::synth_sentence(v, labels, cfg, name + "-" + split + "-" + std::to_string(i),
                                        t.labels, rng);
        for (auto& inst : blind_and_expand(s, t.labels.negative_name())) {
          inst.origin_task = name;
          dst.push_back(std::move(inst));
        }
      }
    };
    gen(n_train, "train", t.train);
    gen(n_test, "test", t.test);
    return t;
  };
  TaskSpec source = make(src, cfg.source_labels, cfg.source_name, cfg.source_train, cfg.source_test);
  TaskSpec target = make(tgt, cfg.target_labels, cfg.target_name, cfg.target_train, cfg.target_test);
  return {std::move(source), std::move(target)};
}

}  // namespace tlre
