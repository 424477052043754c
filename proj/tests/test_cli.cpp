// Copyright 2026 The unscbias Authors
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

#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "unscbias/cli.hpp"

namespace unscbias {
namespace {

namespace fs = std::filesystem;

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "unscbias");
  return run_cli(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path only_run_dir(const fs::path& root, const std::string& prefix) {
  fs::path found;
  int n = 0;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && e.path().filename().string().rfind(prefix + "-", 0) == 0) {
      found = e.path();
      ++n;
    }
  }
  EXPECT_EQ(n, 1) << prefix;
  return found;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = (dir_ / "corpus.jsonl").string();
    script_ = (dir_ / "script.json").string();
    out_ = (dir_ / "runs").string();
    ASSERT_EQ(cli({"synth-corpus", "--output", corpus_}), 0);
    std::ofstream(script_) << nlohmann::json{{"rules", nlohmann::json::array()}, {"default", "Vote: favour"}}.dump();
  }
  std::vector<std::string> base(const std::string& cmd) {
    return {cmd, "--adapter", "scripted", "--script", script_, "--corpus", corpus_, "--out-dir", out_};
  }
  testing::TempDir dir_;
  std::string corpus_, script_, out_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({"votesim", "--no-such-flag"}), 1);
  EXPECT_EQ(cli({}), 1);
  EXPECT_EQ(cli({"--help"}), 0);
}

TEST_F(CliTest, IngestReportsCounts) { EXPECT_EQ(cli({"ingest", "--corpus", corpus_}), 0); }

TEST_F(CliTest, InvalidCorpusWritesErrorFile) {
  std::ofstream(dir_ / "bad.jsonl") << "{\"schema\":\"unscbias/corpus@1\"}\n{\"id\": 5}\n";
  EXPECT_EQ(cli({"votesim", "--adapter", "scripted", "--script", script_, "--corpus", (dir_ / "bad.jsonl").string(),
                 "--out-dir", out_}),
            2);
  auto err = nlohmann::json::parse(slurp(fs::path(out_) / "error.json"));
  EXPECT_EQ(err.at("schema"), "unscbias/error@1");
  EXPECT_EQ(err.at("kind"), "corpus");
  EXPECT_EQ(err.at("command"), "votesim");
}

TEST_F(CliTest, MissingAdapterIsInvalidInput) {
  EXPECT_EQ(cli({"votesim", "--corpus", corpus_, "--out-dir", out_}), 2);
  EXPECT_EQ(nlohmann::json::parse(slurp(fs::path(out_) / "error.json")).at("kind"), "adapter");
}

TEST_F(CliTest, VotesimThenReport) {
  auto args = base("votesim");
  args.insert(args.end(), {"--runs", "3"});
  ASSERT_EQ(cli(args), 0);
  auto rd = only_run_dir(out_, "votesim");
  for (auto f : {"manifest.json", "trials.jsonl", "transcripts.json", "results/votesim-r1.json", "results/votesim-r3.json"})
    EXPECT_TRUE(fs::exists(rd / f)) << f;
  auto manifest = nlohmann::json::parse(slurp(rd / "manifest.json"));
  EXPECT_EQ(manifest.at("trials_total"), 990);

  // Same invocation again without --resume refuses to overwrite.
  EXPECT_EQ(cli(args), 2);
  args.push_back("--resume");
  EXPECT_EQ(cli(args), 0);
  manifest = nlohmann::json::parse(slurp(rd / "manifest.json"));
  EXPECT_DOUBLE_EQ(manifest.at("cache_hit_ratio").get<double>(), 1.0);

  ASSERT_EQ(cli({"report", "--corpus", corpus_, "--out-dir", out_, "--run-dir", rd.string(), "--output",
                 (dir_ / "report").string()}),
            0);
  auto wf1 = slurp(dir_ / "report" / "wf1.tsv");
  EXPECT_NE(wf1.find("votesim\tUnited States\tpooled\t33.33"), std::string::npos) << wf1;
  EXPECT_TRUE(fs::exists(dir_ / "report" / "agreement.tsv"));

  ASSERT_EQ(cli({"stats", "--test", "votesim", "--run-dir", rd.string(), "--out-dir", out_}), 0);
  EXPECT_TRUE(fs::exists(rd / "stats-votesim.json"));
}

TEST_F(CliTest, ReplayReproducesScriptedRun) {
  auto args = base("votesim");
  args.insert(args.end(), {"--runs", "1"});
  ASSERT_EQ(cli(args), 0);
  auto rd = only_run_dir(out_, "votesim");
  auto out2 = (dir_ / "replay").string();
  ASSERT_EQ(cli({"votesim", "--adapter", "replay", "--archive", (rd / "transcripts.json").string(), "--corpus",
                 corpus_, "--out-dir", out2, "--runs", "1"}),
            0);
  auto rd2 = only_run_dir(out2, "votesim");
  EXPECT_EQ(slurp(rd / "results" / "votesim-r1.json"), slurp(rd2 / "results" / "votesim-r1.json"));
}

TEST_F(CliTest, ConfigFileAndCredentialRedaction) {
  ::setenv("UNSCBIAS_CLI_TEST_KEY", "sk-cli-secret-value", 1);
  nlohmann::json cfg = {{"adapter", {{"kind", "http"}, {"base_url", "http://127.0.0.1:9"}, {"api_key_env", "UNSCBIAS_CLI_TEST_KEY"},
                                     {"max_attempts", 1}, {"timeout_s", 1}}},
                        {"corpus", "corpus.jsonl"},
                        {"runs", 1}};
  std::ofstream(dir_ / "cfg.json") << cfg.dump();
  // The endpoint is unreachable, so every trial fails; the run itself still completes.
  int rc = cli({"votesim", "--config", (dir_ / "cfg.json").string(), "--out-dir", out_});
  EXPECT_TRUE(rc == 0 || rc == 3);
  for (const auto& e : fs::recursive_directory_iterator(out_))
    if (e.is_regular_file()) EXPECT_EQ(slurp(e.path()).find("sk-cli-secret-value"), std::string::npos) << e.path();
  ::unsetenv("UNSCBIAS_CLI_TEST_KEY");
}

TEST_F(CliTest, KeywordsCommand) {
  EXPECT_EQ(cli({"keywords", "--corpus", corpus_, "--min-count", "5", "--out-dir", out_}), 0);
}

}  // namespace
}  // namespace unscbias
