#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "senti/hash.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("senti_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& binary, const std::string& args, const std::string& stdin_text = "") {
    const fs::path in = dir_ / "stdin.txt";
    std::ofstream(in) << stdin_text;
    const std::string cmd = "cd '" + dir_.string() + "' && '" + binary + "' " + args + " <stdin.txt >stdout.txt 2>stderr.txt";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir_ / "stdout.txt");
    r.err = slurp(dir_ / "stderr.txt");
    return r;
  }
  Outcome senti(const std::string& args, const std::string& stdin_text = "") { return run(SENTI_BIN, args, stdin_text); }

  // Synthetic airline CSV plus a small run config next to it.
  void make_workspace(const json& grid = json()) {
    ASSERT_EQ(run(SENTI_SYNTH_BIN, "--out tweets.csv --rows 400 --seed 3").code, 0);
    json cfg{{"dataset",
              {{"name", "twitter_us_airline"},
               {"csv", "tweets.csv"},
               {"text_column", "text"},
               {"label_column", "airline_sentiment"},
               {"class_names", {"negative", "neutral", "positive"}}}},
             {"preprocess", {{"max_len", 12}}},
             {"architecture",
              {{"d_model", 16}, {"num_layers", 1}, {"num_heads", 2}, {"ffn_dim", 32}, {"dense1_units", 16}}},
             {"hyperparameters", {{"epochs", 1}, {"hidden", 8}, {"batch_size", 16}}},
             {"limit", 300},
             {"out_dir", "out"}};
    if (!grid.is_null()) cfg["grid"] = grid;
    std::ofstream(dir_ / "cfg.json") << cfg.dump(2);
  }

  fs::path dir_;
};

TEST_F(Cli, MissingSubcommandIsUsageError) {
  const Outcome r = senti("");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error: kind=usage"), std::string::npos);
  EXPECT_NE(r.err.find("Subcommands:"), std::string::npos);
}

TEST_F(Cli, UnknownSubcommandOrFlagIsUsageError) {
  EXPECT_EQ(senti("bogus").code, 2);
  const Outcome r = senti("train --nope");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error: kind=usage"), std::string::npos);
  EXPECT_NE(r.err.find("--nope"), std::string::npos);
  EXPECT_EQ(senti("predict").code, 2);
}

TEST_F(Cli, HelpExitsZero) {
  const Outcome r = senti("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

TEST_F(Cli, RuntimeFailuresReportKind) {
  make_workspace();
  const Outcome missing = senti("train --config cfg.json --csv missing.csv");
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("error: kind=config"), std::string::npos);

  std::ofstream(dir_ / "bad.json") << R"({"hyperparameters": {"lr": 0.001}, "colour": "red"})";
  const Outcome bad = senti("train --config bad.json");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("error: kind=config"), std::string::npos);

  std::ofstream(dir_ / "junk.ckpt") << "not a checkpoint";
  const Outcome ckpt = senti("predict --config cfg.json --checkpoint junk.ckpt", "hello\n");
  EXPECT_EQ(ckpt.code, 1);
  EXPECT_NE(ckpt.err.find("error: kind="), std::string::npos);
}

TEST_F(Cli, TrainWritesArtifactsAndIsReproducible) {
  make_workspace();
  const Outcome a = senti("train --config cfg.json --out a");
  ASSERT_EQ(a.code, 0) << a.err;
  const Outcome b = senti("train --config cfg.json --out b");
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* f : {"model.ckpt", "train_report.json", "timings.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;
  }
  EXPECT_EQ(senti::file_hash(dir_ / "a" / "model.ckpt"), senti::file_hash(dir_ / "b" / "model.ckpt"));
  EXPECT_EQ(slurp(dir_ / "a" / "train_report.json"), slurp(dir_ / "b" / "train_report.json"));
  EXPECT_NE(a.out.find("test: n="), std::string::npos);

  const json manifest = json::parse(slurp(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(manifest.at("command"), "train");
  EXPECT_TRUE(manifest.at("inputs").contains("tweets.csv"));
  EXPECT_EQ(manifest.at("inputs").at("tweets.csv"), senti::file_hash(dir_ / "tweets.csv"));
  EXPECT_EQ(manifest.at("config").at("preprocess").at("max_len"), 12);

  const Outcome c = senti("train --config cfg.json --out c --seed 9");
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(senti::file_hash(dir_ / "a" / "model.ckpt"), senti::file_hash(dir_ / "c" / "model.ckpt"));
}

TEST_F(Cli, PredictPrintsOneDistributionPerLine) {
  make_workspace();
  ASSERT_EQ(senti("train --config cfg.json").code, 0);
  const Outcome r = senti("predict --config cfg.json --checkpoint out/model.ckpt",
                      "@ABCAir although hour delay, crew was kind #thanks\nlost my bag again\n");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    std::istringstream fields(row);
    std::string label;
    std::getline(fields, label, '\t');
    std::vector<double> probs;
    std::string best;
    double best_p = -1;
    for (std::string field; std::getline(fields, field, '\t');) {
      const auto eq = field.find('=');
      ASSERT_NE(eq, std::string::npos);
      const double p = std::stod(field.substr(eq + 1));
      if (p > best_p) {
        best_p = p;
        best = field.substr(0, eq);
      }
      probs.push_back(p);
    }
    ASSERT_EQ(probs.size(), 3u);
    EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 5e-6);
    EXPECT_EQ(label, best);
  }
}

TEST_F(Cli, EvaluateWritesMetrics) {
  make_workspace();
  ASSERT_EQ(senti("train --config cfg.json").code, 0);
  const Outcome r = senti("evaluate --config cfg.json --checkpoint out/model.ckpt --out ev");
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = json::parse(slurp(dir_ / "ev" / "metrics.json"));
  EXPECT_GE(m.at("acc").get<double>(), 0.0);
  EXPECT_LE(m.at("acc").get<double>(), 1.0);
  EXPECT_NE(r.out.find("evaluate: n=300"), std::string::npos);
}

TEST_F(Cli, PreprocessThenAugment) {
  make_workspace();
  const Outcome pre = senti("preprocess --config cfg.json --out pp");
  ASSERT_EQ(pre.code, 0) << pre.err;
  const json stats = json::parse(slurp(dir_ / "pp" / "preprocess_stats.json"));
  EXPECT_EQ(stats.at("rows_in"), 400);
  EXPECT_EQ(stats.at("sampled"), 300);
  EXPECT_EQ(stats.at("rows_in").get<int>(), stats.at("documents_out").get<int>() + stats.at("skipped").get<int>());

  const std::string clean = slurp(dir_ / "pp" / "clean.jsonl");
  EXPECT_EQ(std::count(clean.begin(), clean.end(), '\n'), stats.at("kept").get<long>());

  const Outcome aug = senti("augment --config cfg.json --input pp/clean.jsonl --out aug");
  ASSERT_EQ(aug.code, 0) << aug.err;
  const json plan = json::parse(slurp(dir_ / "aug" / "augment_plan.json"));
  const auto targets = plan.at("targets").get<std::vector<long>>();
  const long total = std::accumulate(targets.begin(), targets.end(), 0L);
  const std::string augmented = slurp(dir_ / "aug" / "augmented.jsonl");
  EXPECT_EQ(std::count(augmented.begin(), augmented.end(), '\n'), total);
  for (long t : targets) EXPECT_EQ(t, targets.front());

  const Outcome train = senti("train --config cfg.json --input aug/augmented.jsonl --out t");
  EXPECT_EQ(train.code, 0) << train.err;
}

TEST_F(Cli, SingletonSweepGivesOneBlock) {
  make_workspace(json{{"variants", {"gru"}}, {"learning_rates", {0.001}}, {"hidden_units", {8}}, {"optimizers", {"adamw"}}});
  const Outcome r = senti("sweep --config cfg.json --out sw");
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t blocks = 0;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("== ", 0) == 0 && line.find(" / ") != std::string::npos) ++blocks;
  }
  EXPECT_EQ(blocks, 1u);
  EXPECT_NE(r.out.find("== gru / adamw =="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "sweep.json"));
  EXPECT_EQ(slurp(dir_ / "sw" / "sweep_tables.txt"), r.out);
}

TEST_F(Cli, SynthWritesRequestedRows) {
  ASSERT_EQ(run(SENTI_SYNTH_BIN, "--out plain.csv --rows 50 --weights 1 1").code, 0);
  const std::string csv = slurp(dir_ / "plain.csv");
  EXPECT_EQ(csv.rfind("text,label\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
  EXPECT_NE(run(SENTI_SYNTH_BIN, "").code, 0);
}

}  // namespace
