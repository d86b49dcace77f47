/**
 * Copyright 2026 The visbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "visbias/cli.hpp"

using visbias::testing::read_file;
using visbias::testing::TempDir;
using visbias::testing::write_file;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = visbias::cli::run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string data(const std::string& rel) { return (std::filesystem::path(VISBIAS_DATA_DIR) / rel).string(); }

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("visbias-cli");
    const auto r = run({"bench", "build", "--count", "4", "--seed", "3", "--out-dir", (dir_->path() / "bench").string()});
    ASSERT_EQ(r.status, 0) << r.err;
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string manifest() { return (dir_->path() / "bench" / "manifest.jsonl").string(); }
  static std::string path(const std::string& rel) { return (dir_->path() / rel).string(); }
  static TempDir* dir_;
};

TempDir* CliTest::dir_ = nullptr;

}  // namespace

TEST(Cli, HelpAndVersionExitZero) {
  EXPECT_EQ(run({"--help"}).status, 0);
  EXPECT_EQ(run({"--version"}).status, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"frobnicate"}).status, 2);
  EXPECT_EQ(run({"bench", "build"}).status, 2);
}

TEST_F(CliTest, BuildWritesManifestAndRunLog) {
  const auto text = read_file(manifest());
  EXPECT_NE(text.find("frame-manifest/1"), std::string::npos);
  const auto log = read_file(dir_->path() / "bench" / "runs.jsonl");
  const auto entry = nlohmann::json::parse(log.substr(0, log.find('\n')));
  EXPECT_EQ(entry["exit_status"], 0);
  EXPECT_TRUE(entry.contains("run_id"));
  EXPECT_TRUE(entry.contains("config_digest"));
}

TEST_F(CliTest, BiasApplyWritesImage) {
  const auto in = dir_->path() / "bench" / "images" / "animals-0000.png";
  ASSERT_TRUE(std::filesystem::exists(in)) << in;
  const auto r = run({"bias", "apply", "--in", in.string(), "--out", path("out/padded.png"), "--recipe",
                      data("recipes/black_padding_20.json"), "--domain", "animals"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(path("out/padded.png")));
}

TEST_F(CliTest, InapplicableRecipeExitsTwo) {
  const auto in = dir_->path() / "bench" / "images" / "outdoor-0000.png";
  const auto r = run({"bias", "apply", "--in", in.string(), "--out", path("out/kw.png"), "--recipe",
                      data("recipes/bounding_box.json"), "--domain", "outdoor"});
  EXPECT_EQ(r.status, 2);
}

TEST_F(CliTest, MissingInputExitsOne) {
  const auto r = run({"bias", "apply", "--in", path("nope.png"), "--out", path("out/x.png"), "--recipe",
                      data("recipes/brightness_1.2.json")});
  EXPECT_EQ(r.status, 1);
}

TEST_F(CliTest, MissingExecutableInBeautyFilterExitsOne) {
  const auto in = dir_->path() / "bench" / "images" / "people-0000.png";
  write_file(path("beauty.json"), R"({"steps":[{"kind":"beauty_filter","command":"visbias-no-such-tool {in} {out}"}]})");
  const auto r = run({"bias", "apply", "--in", in.string(), "--out", path("out/b.png"), "--recipe", path("beauty.json"),
                      "--domain", "people"});
  EXPECT_EQ(r.status, 1);
}

TEST_F(CliTest, EvalSingleWithMockJudge) {
  const auto r = run({"eval", "single", "--manifest", manifest(), "--judge", data("judges/mock_susceptible.json"),
                      "--recipe", data("recipes/instruction_overlay.json"), "--out-dir", path("eval"), "--cache",
                      path("cache")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto cells = read_file(path("eval/cells.csv"));
  EXPECT_EQ(cells.rfind("domain,bias,n,baseline_mean,biased_mean,pct_change\n", 0), 0u);
  const auto summary = nlohmann::json::parse(read_file(path("eval/summary.json")));
  EXPECT_EQ(summary["cells"].size(), 5u);

  const auto rep = run({"report", "--runs", path("eval/summary.json"), "--format", "md"});
  EXPECT_EQ(rep.status, 0) << rep.err;
  EXPECT_NE(rep.out.find("instruction_overlay"), std::string::npos);
}

TEST_F(CliTest, DryRunSendsNothing) {
  const auto r = run({"eval", "single", "--manifest", manifest(), "--judge", data("judges/mock_susceptible.json"),
                      "--recipe", data("recipes/gamma_1.2.json"), "--out-dir", path("dry"), "--dry-run"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_FALSE(std::filesystem::exists(path("dry/records.jsonl")));
}

TEST_F(CliTest, ConflictingScalesExitTwo) {
  write_file(path("s1.json"), R"({"scale":{"min":1,"max":5},"judge":"a","cells":[
    {"domain":"animals","bias":"gamma","n":2,"baseline_mean":2,"biased_mean":2.2,"pct_change":10}]})");
  write_file(path("s2.json"), R"({"scale":{"min":1,"max":10},"judge":"b","cells":[
    {"domain":"animals","bias":"gamma","n":2,"baseline_mean":2,"biased_mean":2.2,"pct_change":10}]})");
  EXPECT_EQ(run({"report", "--runs", path("s1.json"), path("s2.json")}).status, 2);
}

TEST_F(CliTest, ComboSizeFourExitsTwo) {
  write_file(path("optima.json"), R"({"kind":"gamma","optima":{"animals":{"kind":"gamma","gamma":1.5}}})");
  const auto r = run({"search", "combos", "--manifest", manifest(), "--judge", data("judges/mock_susceptible.json"),
                      "--r", "4", "--optima", path("optima.json"), "--out-dir", path("combos")});
  EXPECT_EQ(r.status, 2);
}

TEST_F(CliTest, MissingCredentialExitsTwo) {
  ::unsetenv("VISBIAS_API_KEY");
  const auto r = run({"eval", "single", "--manifest", manifest(), "--judge", data("judges/openai_compatible.json"),
                      "--out-dir", path("live")});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("VISBIAS_API_KEY"), std::string::npos);
}

TEST_F(CliTest, UnknownPromptExitsTwo) {
  const auto r = run({"eval", "single", "--manifest", manifest(), "--judge", data("judges/mock_susceptible.json"),
                      "--prompt", "fancy", "--out-dir", path("bad")});
  EXPECT_EQ(r.status, 2);
}
