// Copyright 2026 The fusion_eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "test_support.hpp"

using namespace fusion_eval::testing;
namespace fs = std::filesystem;

namespace {

// Runs the CLI with output redirected into `dir`; returns the exit status.
int cli(const TempDir& dir, const std::string& args) {
  const std::string command = std::string("\"") + FUSION_EVAL_CLI + "\" " + args + " >\"" +
                              (dir / "stdout.txt").string() + "\" 2>\"" +
                              (dir / "stderr.txt").string() + "\"";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run and meta-eval reproduce the golden outputs") {
  TempDir dir;
  REQUIRE(cli(dir, "run --dataset fixtures/summeval_4.jsonl --llm mock --parallelism 3 --out " +
                       quoted(dir / "run")) == 0);
  CHECK(read_text(dir / "stdout.txt").find("succeeded: 4") != std::string::npos);
  for (const char* name : {"verdicts.jsonl", "failures.jsonl", "transcripts.jsonl", "metadata.json"}) {
    CHECK(read_text(dir / "run" / name) == read_text(fs::path("golden/run_summeval_4") / name));
  }
  REQUIRE(cli(dir, "meta-eval --predictions " + quoted(dir / "run") +
                       " --human fixtures/summeval_4.jsonl --out " + quoted(dir / "report")) == 0);
  CHECK(read_text(dir / "report" / "report.json") == read_text("golden/report_summeval_4/report.json"));
  CHECK(read_text(dir / "stdout.txt") == read_text("golden/report_summeval_4/report.txt"));
}

TEST_CASE("config errors exit with status 2") {
  TempDir dir;
  CHECK(cli(dir, "run --dataset fixtures/no_such_file.jsonl --out " + quoted(dir / "run")) == 2);
  CHECK(read_text(dir / "stderr.txt").find("ConfigError") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "run"));
  CHECK(cli(dir, "") == 2);
  CHECK(cli(dir, "run --out " + quoted(dir / "run")) == 2);
  CHECK(cli(dir, "run --dataset fixtures/summeval_4.jsonl --llm replay --out " + quoted(dir / "run")) == 2);
  CHECK(cli(dir, "meta-eval --predictions x --human fixtures/summeval_4.jsonl --out " +
                     quoted(dir / "r") + " --evaluator novalue") == 2);
  CHECK(cli(dir, "--help") == 0);
}

TEST_CASE("failure threshold drives the exit status") {
  TempDir dir;
  // An empty cache makes every replay miss.
  fs::create_directories(dir / "empty_cache");
  const auto base = "run --dataset fixtures/summeval_4.jsonl --llm replay --cache-dir " +
                    quoted(dir / "empty_cache") + " --out " + quoted(dir / "run");
  CHECK(cli(dir, base) == 1);
  CHECK(cli(dir, base + " --max-failure-rate 1") == 0);
  CHECK(read_text(dir / "run" / "verdicts.jsonl").empty());
}

TEST_CASE("replay-export feeds a replay run") {
  TempDir dir;
  REQUIRE(cli(dir, "run --dataset fixtures/summeval_4.jsonl --out " + quoted(dir / "run")) == 0);
  REQUIRE(cli(dir, "replay-export --run " + quoted(dir / "run") + " --cache-dir " + quoted(dir / "cache")) == 0);
  REQUIRE(cli(dir, "run --dataset fixtures/summeval_4.jsonl --llm replay --cache-dir " +
                       quoted(dir / "cache") + " --out " + quoted(dir / "replayed")) == 0);
  CHECK(read_text(dir / "run" / "verdicts.jsonl") == read_text(dir / "replayed" / "verdicts.jsonl"));
}

TEST_CASE("config file supplies subcommand options") {
  TempDir dir;
  write_text(dir / "run.toml", "[run]\ndataset = \"fixtures/summeval_4.jsonl\"\nparallelism = 2\nout = \"" +
                                   (dir / "from_config").string() + "\"\n");
  REQUIRE(cli(dir, "--config " + quoted(dir / "run.toml") + " run") == 0);
  CHECK(read_text(dir / "from_config" / "verdicts.jsonl") ==
        read_text("golden/run_summeval_4/verdicts.jsonl"));
}

TEST_CASE("plan writes the prompt") {
  TempDir dir;
  REQUIRE(cli(dir, "plan --no-criteria --out " + quoted(dir / "plan")) == 0);
  const auto prompt = read_text(dir / "plan" / "planning_prompt.txt");
  CHECK(prompt.find("No evaluation criteria are given.") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "plan" / "plan.txt"));
  REQUIRE(cli(dir, "plan --submit --llm mock --out " + quoted(dir / "plan2")) == 0);
  CHECK(fs::exists(dir / "plan2" / "plan.txt"));
}

}  // TEST_SUITE
