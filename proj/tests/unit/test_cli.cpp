#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <json.hpp>

#include "cli/commands.hpp"
#include "elicit/config.hpp"
#include "unit/test_support.hpp"
#include "unit/tiny_config.hpp"

namespace elicit {
namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("ELICIT_SEED");
    std::ofstream(dir.path() / "tiny.json") << config_to_json(test::tiny_config());
  }
  std::string path(const std::string& name) const { return (dir.path() / name).string(); }

  // Trains the tiny config once and returns the final checkpoint path.
  std::string trained() {
    const auto out = path("run");
    if (!std::filesystem::exists(out + "/final.json")) {
      const auto r = run_cli({"train", "--config", path("tiny.json"), "--out", out, "--quiet"});
      EXPECT_EQ(r.code, 0) << r.err;
    }
    return out + "/final.json";
  }

  test::TempDir dir{"cli"};
};

TEST_F(CliTest, DryRunPrintsTau) {
  const auto r = run_cli({"train", "--dry-run"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tau = 1561"), std::string::npos) << r.out;
  const auto paper = run_cli({"train", "--profile", "paper", "--eps", "0.1", "--dry-run"});
  EXPECT_NE(paper.out.find("tau = 1561"), std::string::npos);
}

TEST_F(CliTest, FlagPrecedence) {
  setenv("ELICIT_SEED", "42", 1);
  auto r = run_cli({"train", "--dry-run", "--set", "epochs=9"});
  unsetenv("ELICIT_SEED");
  auto json_part = r.out.substr(0, r.out.rfind("tau"));
  auto j = nlohmann::json::parse(json_part);
  EXPECT_EQ(j.at("seed"), 42);
  EXPECT_EQ(j.at("epochs"), 9);
  r = run_cli({"train", "--dry-run", "--set", "epochs=9", "--epochs", "4", "--seed", "5"});
  j = nlohmann::json::parse(r.out.substr(0, r.out.rfind("tau")));
  EXPECT_EQ(j.at("seed"), 5);
  EXPECT_EQ(j.at("epochs"), 4);
}

TEST_F(CliTest, BadRegimeIsConfigError) {
  EXPECT_EQ(run_cli({"train", "--regime", "sometimes", "--dry-run"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"train", "--set", "nope=1", "--dry-run"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"train", "--bogus"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"train", "--config", path("missing.json")}).code, cli::kExitIo);
}

TEST_F(CliTest, TrainWritesRun) {
  const auto r = run_cli({"train", "--config", path("tiny.json"), "--out", path("t"), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("wrote 2 metric rows"), std::string::npos) << r.out;
  EXPECT_EQ(lines_of(slurp(path("t") + "/metrics.csv")).size(), 3u);
  EXPECT_TRUE(std::filesystem::exists(path("t") + "/config.json"));
}

TEST_F(CliTest, AuditEmptyPersonaFileIsIoError) {
  const auto ckpt = trained();
  std::ofstream(path("empty.jsonl")).close();
  const auto r = run_cli({"audit", "--checkpoint", ckpt, "--personas", path("empty.jsonl")});
  EXPECT_EQ(r.code, cli::kExitIo);
}

TEST_F(CliTest, AuditReportsJson) {
  const auto ckpt = trained();
  auto r = run_cli({"personas", "--config", path("tiny.json"), "--count", "30", "--out",
                    path("p.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(slurp(path("p.jsonl"))).size(), 30u);
  r = run_cli({"audit", "--checkpoint", ckpt, "--personas", path("p.jsonl"), "--eps", "1.0"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("passed").get<bool>());
  r = run_cli({"audit", "--checkpoint", ckpt, "--personas", path("p.jsonl"), "--eps", "1e-9"});
  EXPECT_EQ(r.code, cli::kExitFailure);
}

TEST_F(CliTest, ScriptedInterview) {
  const auto ckpt = trained();
  const auto r = run_cli({"interview", "--checkpoint", ckpt, "--transcript", path("s.jsonl")},
                         "I lead a small team.\nYes, I do.\nNot really.\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto log = lines_of(slurp(path("s.jsonl")));
  ASSERT_EQ(log.size(), 3u);
  EXPECT_TRUE(nlohmann::json::parse(log[0]).at("q").is_null());
  EXPECT_EQ(nlohmann::json::parse(log[2]).at("text"), "Not really.");
  // Prompts end in "> " without a newline, so the score shares a line with one.
  const auto first = r.out.find("score: ");
  ASSERT_NE(first, std::string::npos);
  EXPECT_EQ(r.out.find("score: ", first + 1), std::string::npos);
  EXPECT_EQ(lines_of(r.out).front(), "Please describe yourself in a few sentences.");
}

TEST_F(CliTest, InterviewRepromptsOnEmptyLine) {
  const auto ckpt = trained();
  const auto r = run_cli({"interview", "--checkpoint", ckpt, "--max-questions", "0",
                          "--transcript", path("e.jsonl")},
                         "\nfinally an answer\n");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Please type an answer"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("e.jsonl"))).at("text"), "finally an answer");
}

TEST_F(CliTest, ArgmaxInterviewIsDeterministic) {
  const auto ckpt = trained();
  const std::string answers = "I write code.\nSometimes.\nYes.\n";
  const auto a = run_cli({"interview", "--checkpoint", ckpt}, answers);
  const auto b = run_cli({"interview", "--checkpoint", ckpt}, answers);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run_cli({"interview", "--checkpoint", ckpt, "--max-questions", "9"}, answers).code,
            cli::kExitConfig);
}

}  // namespace
}  // namespace elicit
