// Copyright 2026 The pretext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pretext/pipeline.h"

#include <array>
#include <cstdio>
#include <sstream>

#include "gtest/gtest.h"
#include "pretext/error.h"
#include "test_util.h"

namespace pretext {
namespace {

namespace fs = std::filesystem;
using ::pretext::testing::ReadFile;
using ::pretext::testing::TempDir;
using json = nlohmann::json;

const fs::path kToyDir = fs::path(PRETEXT_SOURCE_DIR) / "data" / "toy";

json ToyJson() { return json::parse(ReadFile(kToyDir / "config.json")); }

RunConfig ToyConfig(const fs::path& out, json j = ToyJson()) {
  RunConfig c = ParseRunConfig(j, kToyDir);
  c.output_dir = out;
  return c;
}

// Runs a shell command, returning its exit status and stdout.
std::pair<int, std::string> Shell(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

TEST(ProductExpressionTest, Evaluates) {
  EXPECT_NEAR(EvaluateProductExpression("5.9 × 8.0 × 1.541 × sqrt(2)"),
              5.9 * 8.0 * 1.541 * std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(EvaluateProductExpression("2*3"), 6.0);
  EXPECT_DOUBLE_EQ(EvaluateProductExpression(" (2 * sqrt(4)) "), 4.0);
  EXPECT_DOUBLE_EQ(EvaluateProductExpression("0.5"), 0.5);
  for (const char* bad : {"", "2 +3", "sqrt(2", "2 ×", "abc", "-1"}) {
    EXPECT_THROW(EvaluateProductExpression(bad), ConfigError) << bad;
  }
}

TEST(ParseRunConfigTest, ToyConfig) {
  RunConfig c = ParseRunConfig(ToyJson(), kToyDir);
  EXPECT_EQ(c.private_train, kToyDir / "private_train.jsonl");
  EXPECT_EQ(c.n_clients, 20);
  EXPECT_EQ(c.evolution.t_rounds, 5);
  EXPECT_EQ(c.target_epsilon, 7.58);
  EXPECT_FALSE(c.sigma.has_value());
  EXPECT_EQ(c.expand.target_count, 500);
  EXPECT_EQ(c.master_seed, 42u);
}

TEST(ParseRunConfigTest, Rejections) {
  json both = ToyJson();
  both["privacy"]["sigma"] = 3.0;
  EXPECT_THROW(ParseRunConfig(both, kToyDir), ConfigError);
  json neither = ToyJson();
  neither["privacy"].erase("target_epsilon");
  EXPECT_THROW(ParseRunConfig(neither, kToyDir), ConfigError);
  json unknown = ToyJson();
  unknown["evolution"]["rounds"] = 3;
  EXPECT_THROW(ParseRunConfig(unknown, kToyDir), ConfigError);
  json wrong_type = ToyJson();
  wrong_type["evolution"]["n_syn"] = "many";
  EXPECT_THROW(ParseRunConfig(wrong_type, kToyDir), ConfigError);
  json bad_kind = ToyJson();
  bad_kind["expand"]["generator"] = "gpt";
  EXPECT_THROW(ParseRunConfig(bad_kind, kToyDir), ConfigError);
}

TEST(ParseRunConfigTest, ThresholdExpression) {
  json j = ToyJson();
  j["privacy"].erase("threshold_h");
  j["privacy"]["threshold_h_expr"] = "0.5 × 8 × sqrt(4)";
  EXPECT_DOUBLE_EQ(ParseRunConfig(j, kToyDir).threshold_h, 8.0);
}

TEST(RunPipelineTest, ToyRunWritesAllOutputs) {
  TempDir tmp;
  PipelineResult r = RunPipeline(ToyConfig(tmp.path()), {.threads = 2});
  for (const char* f : {kSyntheticFile, kSeedsFile, kPrivacyReportFile, kFidelityReportFile,
                        kRoundsLogFile}) {
    EXPECT_TRUE(fs::exists(tmp.path() / f)) << f;
  }
  EXPECT_EQ(LoadJsonl(tmp.path() / kSyntheticFile).size(), 500u);
  EXPECT_EQ(LoadJsonl(tmp.path() / kSeedsFile), r.seeds);
  std::istringstream rounds(ReadFile(tmp.path() / kRoundsLogFile));
  int lines = 0;
  for (std::string line; std::getline(rounds, line);) {
    json rec = json::parse(line);
    EXPECT_EQ(rec["round"], ++lines);
    EXPECT_EQ(rec["client_download_floats"], 64 * 384);
  }
  EXPECT_EQ(lines, 5);
  json privacy = json::parse(ReadFile(tmp.path() / kPrivacyReportFile));
  EXPECT_LE(privacy["epsilon"].get<double>(), 7.58);
  EXPECT_GE(privacy["epsilon"].get<double>(), 7.58 - 1e-3);
  EXPECT_EQ(privacy["steps"], 5);
  EXPECT_EQ(privacy["cap"], 8);
  json fidelity = json::parse(ReadFile(tmp.path() / kFidelityReportFile));
  EXPECT_GT(fidelity["distinct_fraction_of_syn"].get<double>(), 0.0);
}

TEST(RunPipelineTest, ByteIdenticalAcrossRunsAndThreads) {
  TempDir a, b;
  RunPipeline(ToyConfig(a.path()), {.threads = 1});
  RunPipeline(ToyConfig(b.path()), {.threads = 4});
  for (const char* f : {kSyntheticFile, kSeedsFile, kPrivacyReportFile, kFidelityReportFile,
                        kRoundsLogFile}) {
    EXPECT_EQ(ReadFile(a.path() / f), ReadFile(b.path() / f)) << f;
  }
  TempDir c;
  RunPipeline(ToyConfig(c.path()), {.seed_override = 43});
  EXPECT_NE(ReadFile(a.path() / kSeedsFile), ReadFile(c.path() / kSeedsFile));
}

TEST(RunPipelineTest, PrivacyReportIgnoresDataAndPostProcessing) {
  TempDir a, b;
  json j = ToyJson();
  RunPipeline(ToyConfig(a.path(), j), {});
  j["expand"]["target_count"] = 0;
  j["evolution"]["k_lookahead"] = 1;
  RunConfig c = ToyConfig(b.path(), j);
  c.master_seed = 1234;
  RunPipeline(c, {});
  EXPECT_EQ(ReadFile(a.path() / kPrivacyReportFile), ReadFile(b.path() / kPrivacyReportFile));
  EXPECT_EQ(LoadJsonl(b.path() / kSyntheticFile), LoadJsonl(b.path() / kSeedsFile));
}

TEST(RunPipelineFromFileTest, ExitCodes) {
  TempDir tmp;
  std::ostringstream err;
  json both = ToyJson();
  both["privacy"]["sigma"] = 3.0;
  EXPECT_EQ(RunPipelineFromFile(tmp.Write("both.json", both.dump()), {}, err), 2);
  EXPECT_NE(err.str().find("config error"), std::string::npos);
  EXPECT_EQ(RunPipelineFromFile(tmp.path() / "missing.json", {}, err), 2);
  EXPECT_EQ(RunPipelineFromFile(tmp.Write("broken.json", "{"), {}, err), 2);

  json missing_data = ToyJson();
  missing_data["data"]["private_train"] = (tmp.path() / "nope.jsonl").string();
  missing_data["output_dir"] = (tmp.path() / "out").string();
  EXPECT_EQ(RunPipelineFromFile(tmp.Write("m.json", missing_data.dump()), {}, err), 1);
  EXPECT_FALSE(fs::exists(tmp.path() / "out" / kSyntheticFile));
}

TEST(CliTest, Subcommands) {
  const std::string cli = PRETEXT_CLI_PATH;
  auto [code, out] = Shell(cli + " calibrate --epsilon 1.29 --delta 3e-6 --steps 11 --cap 8");
  ASSERT_EQ(code, 0);
  json cal = json::parse(out);
  EXPECT_LE(cal["epsilon"].get<double>(), 1.29);
  EXPECT_EQ(cal["cap"], 8);

  std::tie(code, out) = Shell(cli + " account --sigma " +
                              std::to_string(cal["sigma"].get<double>()) +
                              " --cap 8 --steps 11 --delta 3e-6");
  ASSERT_EQ(code, 0);
  EXPECT_NEAR(json::parse(out)["epsilon"].get<double>(), cal["epsilon"].get<double>(), 1e-4);

  TempDir tmp;
  json j = ToyJson();
  j["output_dir"] = tmp.path().string();
  j["expand"]["target_count"] = 20;
  for (const char* k : {"private_train", "private_eval", "public_pool"}) {
    j["data"][k] = (kToyDir / j["data"][k].get<std::string>()).string();
  }
  const fs::path cfg = tmp.Write("config.json", j.dump());
  std::tie(code, out) = Shell(cli + " run --config " + cfg.string() + " --seed 5 --threads 2");
  ASSERT_EQ(code, 0);
  EXPECT_EQ(LoadJsonl(tmp.path() / kSyntheticFile).size(), 20u);

  std::tie(code, out) =
      Shell(cli + " evaluate --synthetic " + (tmp.path() / kSyntheticFile).string() +
            " --eval " + (kToyDir / "private_eval.jsonl").string() + " --init " +
            (tmp.path() / kSeedsFile).string());
  ASSERT_EQ(code, 0);
  EXPECT_TRUE(json::parse(out).contains("mean_nn_distance_eval_to_syn"));

  EXPECT_EQ(Shell(cli + " run --config " + (tmp.path() / "absent.json").string() + " 2>/dev/null")
                .first,
            2);
  EXPECT_NE(Shell(cli + " 2>/dev/null").first, 0);
}

}  // namespace
}  // namespace pretext
