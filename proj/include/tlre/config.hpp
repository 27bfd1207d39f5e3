#pragma once

// Hyperparameters and the key = value configuration format shared by
// experiment files and synthetic-task files.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "tlre/common.hpp"
#include "tlre/corpus.hpp"

namespace tlre {

enum class Precision { Single, Double };
enum class Averaging { Micro, Macro };

struct TrainConfig {
  int word_dim = 100;
  int pos1_dim = 10;
  int pos2_dim = 10;
  int hidden = 100;
  int batch_size = 100;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 30;
  std::uint64_t seed = 1;
  double sample_prob = 0.5;
  int position_clip = 30;
  Precision precision = Precision::Single;
  // Model selection: 0 selects on the target test set; a value in (0,1)
  // carves that share of target train out as a dev set and selects on it.
  double dev_fraction = 0.0;
  Averaging averaging = Averaging::Micro;

  int input_dim() const { return word_dim + pos1_dim + pos2_dim; }
  int position_rows() const { return 2 * position_clip + 2; }

  void validate() const {
    if (word_dim <= 0 || pos1_dim <= 0 || pos2_dim <= 0 || hidden <= 0) {
      throw Error("config: all dimensions must be positive");
    }
    if (batch_size < 1) throw Error("config: batch_size must be at least 1");
    if (!(sample_prob > 0.0 && sample_prob <= 1.0)) throw Error("config: sample_prob must lie in (0,1]");
    if (position_clip < 0) throw Error("config: position_clip must be non-negative");
    if (epochs < 0) throw Error("config: epochs must be non-negative");
    if (!(lr > 0.0)) throw Error("config: lr must be positive");
    if (!(dev_fraction >= 0.0 && dev_fraction < 1.0)) throw Error("config: dev_fraction must lie in [0,1)");
  }
};

/// Flat `key = value` file. `#` starts a comment, `[section]` headers are
/// accepted and ignored, string values may be double-quoted.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "config") {
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty() || line.front() == '[') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw Error(source + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      if (key.empty()) throw Error(source + ":" + std::to_string(lineno) + ": empty key");
      kv.values_[key] = value;
    }
    return kv;
  }

  static KeyValues read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    return parse(in, path.string());
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string str(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  template <class N>
  N number(const std::string& key, N fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    N out{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw Error("config: key '" + key + "' has invalid numeric value '" + s + "'");
    }
    return out;
  }

  /// Keys never read through str()/number().
  std::set<std::string> unused() const {
    std::set<std::string> out;
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) out.insert(k);
    }
    return out;
  }

  void require_all_used() const {
    auto u = unused();
    if (!u.empty()) throw Error("config: unknown key '" + *u.begin() + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

inline TrainConfig train_config_from(const KeyValues& kv, TrainConfig cfg = {}) {
  cfg.word_dim = kv.number("word_dim", cfg.word_dim);
  cfg.pos1_dim = kv.number("pos1_dim", cfg.pos1_dim);
  cfg.pos2_dim = kv.number("pos2_dim", cfg.pos2_dim);
  cfg.hidden = kv.number("hidden", cfg.hidden);
  cfg.batch_size = kv.number("batch_size", cfg.batch_size);
  cfg.lr = kv.number("lr", cfg.lr);
  cfg.beta1 = kv.number("beta1", cfg.beta1);
  cfg.beta2 = kv.number("beta2", cfg.beta2);
  cfg.adam_eps = kv.number("adam_eps", cfg.adam_eps);
  cfg.epochs = kv.number("epochs", cfg.epochs);
  cfg.seed = kv.number("seed", cfg.seed);
  cfg.sample_prob = kv.number("sample_prob", cfg.sample_prob);
  cfg.position_clip = kv.number("position_clip", cfg.position_clip);
  cfg.dev_fraction = kv.number("dev_fraction", cfg.dev_fraction);
  const auto precision = kv.str("precision", cfg.precision == Precision::Single ? "single" : "double");
  if (precision == "single") {
    cfg.precision = Precision::Single;
  } else if (precision == "double") {
    cfg.precision = Precision::Double;
  } else {
    throw Error("config: precision must be single or double");
  }
  const auto avg = kv.str("averaging", cfg.averaging == Averaging::Micro ? "micro" : "macro");
  if (avg == "micro") {
    cfg.averaging = Averaging::Micro;
  } else if (avg == "macro") {
    cfg.averaging = Averaging::Macro;
  } else {
    throw Error("config: averaging must be micro or macro");
  }
  cfg.validate();
  return cfg;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void write_train_config(const TrainConfig& c, std::ostream& out) {
  out << "word_dim = " << c.word_dim << "\n"
      << "pos1_dim = " << c.pos1_dim << "\n"
      << "pos2_dim = " << c.pos2_dim << "\n"
      << "hidden = " << c.hidden << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "lr = " << format_double(c.lr) << "\n"
      << "beta1 = " << format_double(c.beta1) << "\n"
      << "beta2 = " << format_double(c.beta2) << "\n"
      << "adam_eps = " << format_double(c.adam_eps) << "\n"
      << "epochs = " << c.epochs << "\n"
      << "seed = " << c.seed << "\n"
      << "sample_prob = " << format_double(c.sample_prob) << "\n"
      << "position_clip = " << c.position_clip << "\n"
      << "precision = " << (c.precision == Precision::Single ? "single" : "double") << "\n"
      << "dev_fraction = " << format_double(c.dev_fraction) << "\n"
      << "averaging = " << (c.averaging == Averaging::Micro ? "micro" : "macro") << "\n";
}

inline SynthConfig synth_config_from(const KeyValues& kv, SynthConfig c = {}) {
  c.source_train = kv.number("source_train", c.source_train);
  c.source_test = kv.number("source_test", c.source_test);
  c.target_train = kv.number("target_train", c.target_train);
  c.target_test = kv.number("target_test", c.target_test);
  c.source_labels = kv.number("source_labels", c.source_labels);
  c.target_labels = kv.number("target_labels", c.target_labels);
  c.source_triggers = kv.number("source_triggers", c.source_triggers);
  c.target_triggers = kv.number("target_triggers", c.target_triggers);
  c.vocab_size = kv.number("vocab_size", c.vocab_size);
  c.min_len = kv.number("min_len", c.min_len);
  c.max_len = kv.number("max_len", c.max_len);
  c.similarity = kv.number("similarity", c.similarity);
  c.entity_type = kv.str("entity_type", c.entity_type);
  c.source_name = kv.str("source_name", c.source_name);
  c.target_name = kv.str("target_name", c.target_name);
  return c;
}

}  // namespace tlre
