#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using tlre::test::read_file;
using tlre::test::scratch_dir;
using tlre::test::write_file;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "tlre");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tlre::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Small synthetic pair plus tiny model settings, shared by the training tests.
const std::vector<std::string> kSmallSynth{"--set", "source_train=120", "--set", "source_test=30",
                                           "--set", "target_train=40",  "--set", "target_test=40",
                                           "--set", "vocab_size=30"};
const std::vector<std::string> kTinyModel{"--set", "word_dim=6", "--set", "pos1_dim=2", "--set", "pos2_dim=2",
                                          "--set", "hidden=4",   "--set", "batch_size=20", "--epochs", "2"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void synth(const fs::path& dir, const std::string& source_labels = "2") {
  const auto r = run(concat({"synth", "--seed", "3", "--source-labels", source_labels, "--target-labels", "2",
                             "--out-src", (dir / "src").string(), "--out-tgt", (dir / "tgt").string()},
                            kSmallSynth));
  ASSERT_EQ(r.code, 0) << r.err;
}

}  // namespace

TEST(Cli, GradcheckPasses) {
  const auto r = run({"gradcheck", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_NE(r.out.find("enc.fwd.U"), std::string::npos);
}

TEST(Cli, UnknownSubcommandFails) {
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_NE(run({}).code, 0);
}

TEST(Cli, UnknownConfigKeyFails) {
  const auto dir = scratch_dir("cli_badkey");
  synth(dir);
  const auto r = run({"train", "--framework", "baseline", "--target", (dir / "tgt").string(), "--set", "hiden=4",
                      "--out", (dir / "out").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("hiden"), std::string::npos) << r.err;
}

TEST(Cli, MixedRejectsMismatchedLabelSets) {
  const auto dir = scratch_dir("cli_mismatch");
  synth(dir, "4");
  const auto r = run(concat({"train", "--framework", "mixed", "--source", (dir / "src").string(), "--target",
                             (dir / "tgt").string(), "--out", (dir / "out").string()},
                            kTinyModel));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("source has 4 labels, target has 2"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "model.ckpt"));
}

TEST(Cli, SynthTrainEvaluatePipeline) {
  const auto dir = scratch_dir("cli_pipeline");
  synth(dir);
  ASSERT_TRUE(fs::exists(dir / "src" / "train.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "tgt" / "labels.txt"));
  ASSERT_TRUE(fs::exists(dir / "tgt" / "config.resolved.toml"));

  const auto out = dir / "out";
  const auto tr = run(concat({"train", "--framework", "multi", "--source", (dir / "src").string(), "--target",
                              (dir / "tgt").string(), "--n-runs", "2", "--out", out.string()},
                             kTinyModel));
  ASSERT_EQ(tr.code, 0) << tr.err;
  for (const char* f : {"history.csv", "history_run0.csv", "history_run1.csv", "summary.json", "model.ckpt",
                        "config.resolved.toml"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto history = read_file(out / "history.csv");
  EXPECT_EQ(history.substr(0, history.find('\n')), "epoch,mean_loss,precision,recall,f1");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 3);
  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  EXPECT_EQ(summary.at("n"), 2);
  EXPECT_EQ(summary.at("framework"), "multi");
  EXPECT_EQ(summary.at("eval_head"), "target");

  const auto ev_out = dir / "eval";
  const auto ev = run({"evaluate", "--checkpoint", (out / "model.ckpt").string(), "--data", (dir / "tgt").string(),
                       "--labels", (dir / "tgt" / "labels.txt").string(), "--out", ev_out.string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  const auto report = read_file(ev_out / "report.csv");
  EXPECT_NE(report.find("micro,"), std::string::npos);
  // Scoring the checkpoint on target test reproduces the best run's last epoch.
  const auto ev_summary = nlohmann::json::parse(read_file(ev_out / "summary.json"));
  const auto best = summary.at("best_run").get<int>();
  const auto run_hist = read_file(out / ("history_run" + std::to_string(best) + ".csv"));
  const auto last = run_hist.substr(run_hist.rfind('\n', run_hist.size() - 2) + 1);
  const double last_f1 = std::stod(last.substr(last.rfind(',') + 1));
  EXPECT_NEAR(ev_summary.at("micro").at("f1").get<double>(), last_f1, 1e-6);

  // Labels that do not belong to the head are refused.
  write_file(dir / "other_labels.txt", "NEG:Neg\nRelA\nRelB\n");
  const auto bad = run({"evaluate", "--checkpoint", (out / "model.ckpt").string(), "--data", (dir / "tgt").string(),
                        "--labels", (dir / "other_labels.txt").string(), "--out", (dir / "eval2").string()});
  EXPECT_NE(bad.code, 0);
}

TEST(Cli, ResolvedConfigReproducesRun) {
  const auto dir = scratch_dir("cli_rerun");
  synth(dir);
  const auto first = dir / "first";
  ASSERT_EQ(run(concat({"train", "--framework", "mixed", "--source", (dir / "src").string(), "--target",
                        (dir / "tgt").string(), "--out", first.string()},
                       kTinyModel))
                .code,
            0);
  const auto second = dir / "second";
  const auto r = run({"train", "--config", (first / "config.resolved.toml").string(), "--out", second.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(first / "history.csv"), read_file(second / "history.csv"));
  EXPECT_EQ(read_file(first / "model.ckpt"), read_file(second / "model.ckpt"));
}

TEST(Cli, PreprocessExpandsSentencesAndLeavesInputAlone) {
  const auto dir = scratch_dir("cli_pre");
  write_file(dir / "labels.txt", "NEG:none\ninteracts\n");
  const std::string input =
      R"({"id":"s1","tokens":["Aspirin","raises","warfarin","levels","with","heparin","."],)"
      R"("entities":[{"start":0,"end":1,"type":"Drug"},{"start":2,"end":3,"type":"Drug"},)"
      R"({"start":5,"end":6,"type":"Drug"}],"relations":[{"e1":0,"e2":1,"label":"interacts"}]})"
      "\n";
  write_file(dir / "in.jsonl", input);
  const auto r = run({"preprocess", "--in", (dir / "in.jsonl").string(), "--labels", (dir / "labels.txt").string(),
                      "--out", (dir / "out.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir / "in.jsonl"), input);
  const auto text = read_file(dir / "out.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(text.find("\"interacts\""), std::string::npos);
  EXPECT_NE(text.find("DrugA"), std::string::npos);

  // Refuses to overwrite its input.
  EXPECT_NE(run({"preprocess", "--in", (dir / "in.jsonl").string(), "--labels", (dir / "labels.txt").string(),
                 "--out", (dir / "in.jsonl").string()})
                .code,
            0);
}

TEST(Cli, SplitPartitionsPerClass) {
  const auto dir = scratch_dir("cli_split");
  synth(dir);
  const auto in = dir / "tgt" / "train.jsonl";
  const auto before = read_file(in);
  const auto r = run({"split", "--in", in.string(), "--labels", (dir / "tgt" / "labels.txt").string(), "--fraction",
                      "0.25", "--seed", "4", "--out-selected", (dir / "a.jsonl").string(), "--out-remainder",
                      (dir / "b.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(in), before);
  const auto a = read_file(dir / "a.jsonl"), b = read_file(dir / "b.jsonl");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n') + std::count(b.begin(), b.end(), '\n'),
            std::count(before.begin(), before.end(), '\n'));
  EXPECT_GT(std::count(a.begin(), a.end(), '\n'), 0);
}

TEST(Cli, AblateWritesOneRowPerFraction) {
  const auto dir = scratch_dir("cli_ablate");
  synth(dir);
  const auto r = run(concat({"ablate", "--kind", "source-size", "--framework", "multi", "--source",
                             (dir / "src").string(), "--target", (dir / "tgt").string(), "--fractions", "0.5,1.0",
                             "--n-runs", "1", "--out", (dir / "abl").string()},
                            {"--set", "word_dim=6", "--set", "pos1_dim=2", "--set", "pos2_dim=2", "--set", "hidden=4",
                             "--set", "batch_size=20", "--epochs", "1"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_file(dir / "abl" / "ablation.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
