#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "tlre/config.hpp"
#include "tlre/corpus.hpp"

namespace tlre {
namespace {

TEST(NormalizeToken, LowercasesWords) { EXPECT_EQ(normalize_token("Lithium", false), "lithium"); }

TEST(NormalizeToken, DigitRunBecomesDG) { EXPECT_EQ(normalize_token("43", false), "DG"); }

TEST(NormalizeToken, SentinelUnchanged) { EXPECT_EQ(normalize_token("ProblemA", true), "ProblemA"); }

TEST(NormalizeToken, DigitRunsInsideAlphanumerics) { EXPECT_EQ(normalize_token("ab12cd34", false), "abDGcdDG"); }

TEST(NormalizeToken, IdempotentOnRandomStrings) {
  std::mt19937_64 rng(5);
  const std::string alphabet = "aZ09DGdg-._x7";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(1, 12);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
    const auto once = normalize_token(s, false);
    EXPECT_EQ(normalize_token(once, false), once) << s;
  }
}

RawSentence ex4() {
  RawSentence s;
  s.id = "ex4";
  s.tokens = {"She", "is", "allergic", "to", "augmentin", "which", "gives", "her", "a", "rash"};
  s.entities = {{2, 3, "Problem"}, {9, 10, "Problem"}};
  return s;
}

TEST(BlindAndExpand, PaperExample) {
  auto out = blind_and_expand(ex4(), "None");
  ASSERT_EQ(out.size(), 1u);
  const std::vector<std::string> expect{"she", "is", "ProblemA", "to", "augmentin", "which", "gives", "her", "a", "ProblemB"};
  EXPECT_EQ(out[0].tokens, expect);
  EXPECT_EQ(out[0].e1_index, 2u);
  EXPECT_EQ(out[0].e2_index, 9u);
  EXPECT_EQ(out[0].label, "None");
  EXPECT_NO_THROW(validate_instance(out[0]));
}

TEST(BlindAndExpand, PairCountIsBinomial) {
  for (std::size_t k = 2; k <= 6; ++k) {
    RawSentence s;
    s.id = "k";
    for (std::size_t i = 0; i < 2 * k; ++i) s.tokens.push_back("w" + std::to_string(i));
    for (std::size_t i = 0; i < k; ++i) s.entities.push_back({2 * i, 2 * i + 1, "Drug"});
    EXPECT_EQ(blind_and_expand(s, "Neg").size(), k * (k - 1) / 2);
  }
}

TEST(BlindAndExpand, MultiTokenEntitiesCollapseAndIndicesShift) {
  RawSentence s;
  s.id = "m";
  s.tokens = {"Aspirin", "tablets", "interact", "with", "Warfarin", "Sodium", "45", "mg"};
  s.entities = {{4, 6, "Drug"}, {0, 2, "Drug"}};  // deliberately out of order
  s.pair_labels[{0, 1}] = "Effect";
  auto out = blind_and_expand(s, "Neg");
  ASSERT_EQ(out.size(), 1u);
  const std::vector<std::string> expect{"DrugA", "interact", "with", "DrugB", "DG", "mg"};
  EXPECT_EQ(out[0].tokens, expect);
  EXPECT_EQ(out[0].e1_index, 0u);
  EXPECT_EQ(out[0].e2_index, 3u);
  EXPECT_EQ(out[0].label, "Effect");
}

TEST(BlindAndExpand, ThreeEntitiesLeaveThirdAsText) {
  RawSentence s;
  s.id = "t";
  s.tokens = {"X", "and", "Y", "and", "Z"};
  s.entities = {{0, 1, "Drug"}, {2, 3, "Drug"}, {4, 5, "Drug"}};
  auto out = blind_and_expand(s, "Neg");
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].tokens, (std::vector<std::string>{"DrugA", "and", "DrugB", "and", "z"}));
  EXPECT_EQ(out[2].tokens, (std::vector<std::string>{"x", "and", "DrugA", "and", "DrugB"}));
  for (const auto& r : out) EXPECT_NO_THROW(validate_instance(r));
}

TEST(BlindAndExpand, RejectsFewerThanTwoEntities) {
  RawSentence s;
  s.id = "one";
  s.tokens = {"a", "b"};
  s.entities = {{0, 1, "Drug"}};
  try {
    blind_and_expand(s, "Neg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("0 instances"), std::string::npos);
  }
}

TEST(BlindAndExpand, RejectsOverlappingSpans) {
  RawSentence s;
  s.id = "o";
  s.tokens = {"a", "b", "c"};
  s.entities = {{0, 2, "Drug"}, {1, 3, "Drug"}};
  EXPECT_THROW(blind_and_expand(s, "Neg"), Error);
}

std::vector<RelationInstance> labelled(const std::map<std::string, std::size_t>& counts) {
  std::vector<RelationInstance> out;
  for (const auto& [label, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) {
      RelationInstance r;
      r.id = label + std::to_string(i);
      r.tokens = {"DrugA", "x", "DrugB"};
      r.e1_index = 0;
      r.e2_index = 2;
      r.e1_type = r.e2_type = "Drug";
      r.label = label;
      out.push_back(r);
    }
  }
  return out;
}

TEST(StratifiedPartition, FloorPerClass) {
  auto data = labelled({{"TeRP", 2136}, {"None", 17}});
  auto p = stratified_partition(data, 0.05, 3);
  auto sel = class_counts(p.selected);
  EXPECT_EQ(sel["TeRP"], 106u);
  EXPECT_EQ(sel["None"], 0u);
  EXPECT_EQ(p.selected.size() + p.remainder.size(), data.size());
}

TEST(StratifiedPartition, AdePositiveCount) {
  auto data = labelled({{"ADE", 5968}});
  auto p = stratified_partition(data, 0.3001, 1);
  EXPECT_NEAR(static_cast<double>(p.selected.size()), 1791.0, 1.0);
}

TEST(StratifiedPartition, PropertyDisjointCoveringAndDeterministic) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  std::uniform_real_distribution<double> frac(0.01, 0.99);
  for (int trial = 0; trial < 50; ++trial) {
    auto data = labelled({{"A", size(rng)}, {"B", size(rng)}, {"C", size(rng)}});
    const double f = frac(rng);
    auto p = stratified_partition(data, f, trial);
    auto q = stratified_partition(data, f, trial);
    EXPECT_EQ(p.selected, q.selected);
    auto total = class_counts(data);
    auto sel = class_counts(p.selected);
    for (const auto& [label, n] : total) {
      EXPECT_EQ(sel[label], static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9)));
    }
    std::set<std::string> ids;
    for (const auto& r : p.selected) ids.insert(r.id);
    for (const auto& r : p.remainder) EXPECT_FALSE(ids.count(r.id));
    EXPECT_EQ(p.selected.size() + p.remainder.size(), data.size());
  }
}

TEST(StratifiedPartition, Errors) {
  auto data = labelled({{"A", 4}});
  EXPECT_THROW(stratified_partition({}, 0.3, 1), Error);
  EXPECT_THROW(stratified_partition(data, 0.0, 1), Error);
  EXPECT_THROW(stratified_partition(data, 1.0, 1), Error);
}

TEST(Vocabulary, FirstOccurrenceOrder) {
  RelationInstance r;
  r.tokens = {"she", "is", "she"};
  std::vector<RelationInstance> c{r};
  auto v = build_vocabulary({c});
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.lookup("<pad>"), 0);
  EXPECT_EQ(v.lookup("<unk>"), 1);
  EXPECT_EQ(v.lookup("she"), 2);
  EXPECT_EQ(v.lookup("is"), 3);
  EXPECT_EQ(v.lookup("never-seen"), Vocabulary::kUnk);
}

TEST(Vocabulary, DeterministicAcrossCollections) {
  auto [src, tgt] = synth_tasks(SynthConfig{}, 4);
  auto a = build_vocabulary({src.train, tgt.train});
  auto b = build_vocabulary({src.train, tgt.train});
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.contains("DrugA"));
  EXPECT_THROW(build_vocabulary({std::vector<RelationInstance>{}}), Error);
}

TEST(Labels, ParseNegativeMarker) {
  std::istringstream in("NEG:None\nAdvise\nEffect\n");
  auto l = parse_labels(in);
  EXPECT_EQ(l.size(), 3u);
  EXPECT_EQ(l.negative_name(), "None");
  std::istringstream none("A\nB\n");
  EXPECT_THROW(parse_labels(none), Error);
  std::istringstream dup("NEG:A\nA\n");
  EXPECT_THROW(parse_labels(dup), Error);
}

class JsonlTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = test::scratch_dir("jsonl"); }
  std::filesystem::path dir_;
};

TEST_F(JsonlTest, WellFormedFileLoads) {
  test::write_file(dir_ / "labels.txt", "NEG:Neg\nPos\n");
  std::ostringstream lines;
  for (int i = 0; i < 10; ++i) {
    lines << R"({"id":"s)" << i << R"(","tokens":["Aspirin","raises","43","levels","of","warfarin"],"e1":0,"e2":5,)"
          << R"("e1_type":"Drug","e2_type":"Drug","label":")" << (i % 2 ? "Pos" : "Neg") << "\"}\n";
  }
  test::write_file(dir_ / "data.jsonl", lines.str());
  auto task = load_jsonl_dataset(dir_ / "data.jsonl", dir_ / "labels.txt");
  ASSERT_EQ(task.train.size(), 10u);
  EXPECT_EQ(task.train[0].tokens, (std::vector<std::string>{"DrugA", "raises", "DG", "levels", "of", "DrugB"}));
  EXPECT_EQ(task.train[0].origin_task, "data");
  EXPECT_EQ(class_counts(task.train)["Pos"], 5u);

  auto raw = read_instances_jsonl(dir_ / "data.jsonl", task.labels, {false, "x"});
  EXPECT_EQ(raw[0].tokens[2], "43");
  EXPECT_EQ(raw[0].tokens[1], "raises");
}

TEST_F(JsonlTest, OutOfBoundsIndexNamesLine) {
  test::write_file(dir_ / "labels.txt", "NEG:Neg\nPos\n");
  test::write_file(dir_ / "bad.jsonl",
                   R"({"id":"a","tokens":["x","y"],"e1":0,"e2":1,"e1_type":"D","e2_type":"D","label":"Pos"})" "\n"
                   R"({"id":"b","tokens":["x","y"],"e1":2,"e2":1,"e1_type":"D","e2_type":"D","label":"Pos"})" "\n");
  try {
    load_jsonl_dataset(dir_ / "bad.jsonl", dir_ / "labels.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST_F(JsonlTest, UnknownLabelAndMalformedLine) {
  test::write_file(dir_ / "labels.txt", "NEG:Neg\nEffect\n");
  test::write_file(dir_ / "typo.jsonl",
                   R"({"id":"a","tokens":["x","y"],"e1":0,"e2":1,"e1_type":"D","e2_type":"D","label":"Effct"})" "\n");
  EXPECT_THROW(load_jsonl_dataset(dir_ / "typo.jsonl", dir_ / "labels.txt"), Error);
  test::write_file(dir_ / "broken.jsonl", "{not json\n");
  try {
    load_jsonl_dataset(dir_ / "broken.jsonl", dir_ / "labels.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("broken.jsonl:1"), std::string::npos);
  }
}

TEST_F(JsonlTest, TaskRoundTrip) {
  SynthConfig cfg;
  cfg.source_train = 50;
  cfg.target_train = 20;
  auto [src, tgt] = synth_tasks(cfg, 2);
  write_task_dir(src, dir_ / "src");
  auto back = load_task_dir(dir_ / "src", src.name);
  EXPECT_EQ(back.labels, src.labels);
  EXPECT_EQ(back.train, src.train);
  EXPECT_EQ(back.test, src.test);
}

TEST(Synth, SimilarityOneSharesEveryToken) {
  auto [src, tgt] = synth_tasks(SynthConfig{}, 3);
  EXPECT_EQ(src.labels, tgt.labels);
  std::set<std::string> s, t;
  for (const auto& r : src.train) s.insert(r.tokens.begin(), r.tokens.end());
  for (const auto& r : tgt.train) t.insert(r.tokens.begin(), r.tokens.end());
  for (const auto& tok : t) EXPECT_TRUE(s.count(tok)) << tok;
}

TEST(Synth, SimilarityZeroSharesOnlySentinels) {
  SynthConfig cfg;
  cfg.similarity = 0.0;
  auto [src, tgt] = synth_tasks(cfg, 3);
  std::set<std::string> s;
  for (const auto& r : src.train) s.insert(r.tokens.begin(), r.tokens.end());
  for (const auto& r : tgt.train) {
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      if (i == r.e1_index || i == r.e2_index) continue;
      EXPECT_FALSE(s.count(r.tokens[i])) << r.tokens[i];
    }
  }
}

TEST(Synth, DeterministicAndValid) {
  SynthConfig cfg;
  cfg.source_train = 2000;
  cfg.target_train = 100;
  cfg.similarity = 0.9;
  auto [a1, b1] = synth_tasks(cfg, 17);
  auto [a2, b2] = synth_tasks(cfg, 17);
  std::ostringstream x, y;
  write_instances_jsonl(a1.train, x);
  write_instances_jsonl(b1.train, x);
  write_instances_jsonl(a2.train, y);
  write_instances_jsonl(b2.train, y);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(a1.train.size(), 2000u);
  EXPECT_EQ(b1.train.size(), 100u);
  for (const auto& r : a1.train) EXPECT_NO_THROW(validate_instance(r, &a1.labels));
}

TEST(Synth, LabelIsAFunctionOfTheTrigger) {
  SynthConfig cfg;
  cfg.source_labels = 4;
  auto [src, tgt] = synth_tasks(cfg, 8);
  std::map<std::string, std::string> trigger_label;
  for (const auto& r : src.train) {
    // The trigger sits strictly between the sentinels and is the only "trig_" token.
    for (std::size_t i = r.e1_index + 1; i < r.e2_index; ++i) {
      if (r.tokens[i].find("trig_") != std::string::npos) {
        auto [it, fresh] = trigger_label.emplace(r.tokens[i], r.label);
        EXPECT_EQ(it->second, r.label);
      }
    }
  }
  EXPECT_EQ(trigger_label.size(), 12u);
}

TEST(Synth, InconsistentConfig) {
  SynthConfig cfg;
  cfg.source_labels = 5;
  cfg.source_triggers = 3;
  EXPECT_THROW(synth_tasks(cfg, 1), Error);
  SynthConfig bad_len;
  bad_len.min_len = 2;
  EXPECT_THROW(synth_tasks(bad_len, 1), Error);
  SynthConfig bad_rho;
  bad_rho.similarity = 1.5;
  EXPECT_THROW(synth_tasks(bad_rho, 1), Error);
}

TEST(Filter, DefaultHookKeepsEverything) {
  auto data = labelled({{"A", 3}, {"Neg", 2}});
  EXPECT_EQ(apply_filter(data, {}).size(), 5u);
  EXPECT_EQ(apply_filter(data, [](const RelationInstance& r) { return r.label != "Neg"; }).size(), 3u);
}

TEST(KeyValues, ParsesAndRejectsUnknownKeys) {
  std::istringstream in("# experiment\n[train]\nhidden = 8\nlr = 0.01\nprecision = \"double\"\n");
  auto kv = KeyValues::parse(in);
  auto cfg = train_config_from(kv);
  EXPECT_EQ(cfg.hidden, 8);
  EXPECT_DOUBLE_EQ(cfg.lr, 0.01);
  EXPECT_EQ(cfg.precision, Precision::Double);
  kv.require_all_used();
  kv.set("hiden", "3");
  EXPECT_THROW(kv.require_all_used(), Error);
  std::istringstream bad("hidden = eight\n");
  EXPECT_THROW(train_config_from(KeyValues::parse(bad)), Error);
}

}  // namespace
}  // namespace tlre
