/*
 * Copyright 2026 The crisp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Runs the command-line binary and checks exit codes and emitted files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& root() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "crisp_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd = std::string(CRISP_CLI) + " " + args + " > " + (root() / log).string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve on the toy problem exits 0 and writes every output") {
  const fs::path out = root() / "toy";
  REQUIRE(run("solve --problem toy_mpcc -q --out " + out.string()) == 0);
  for (const char* f : {"trajectory.csv", "trace.jsonl", "summary.json", "timing.csv"})
    CHECK(fs::exists(out / f));
  const auto s = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(s["status"] == "Success");
  CHECK(slurp(out / "summary.json").find("wall") == std::string::npos);
}

TEST_CASE("usage and configuration errors exit 1") {
  CHECK(run("solve --problem teapot --out " + (root() / "x").string()) == 1);
  CHECK(run("solve --problem toy_mpcc --set k_max=abc --out " + (root() / "x").string()) == 1);
  CHECK(run("bench --suite nothing --out " + (root() / "x").string()) == 1);
  CHECK(run("frobnicate") == 1);
  std::ofstream(root() / "bad.yaml") << "horizon: [1, oops\n";
  CHECK(run("solve --problem cartpole --params " + (root() / "bad.yaml").string()) == 1);
}

TEST_CASE("solver failure exits 2 and records the status") {
  const fs::path out = root() / "maxout";
  CHECK(run("solve --problem cq_fail -q --set mu_max=10 --out " + out.string()) == 2);
  const auto s = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(s["status"] == "PenaltyMaxOut");
}

TEST_CASE("bench is reproducible apart from the timing file") {
  const fs::path a = root() / "bench_a", b = root() / "bench_b";
  REQUIRE(run("bench --suite toy --jobs 2 --seed 9 --out " + a.string()) == 0);
  REQUIRE(run("bench --suite toy --jobs 1 --seed 9 --out " + b.string()) == 0);
  CHECK(slurp(a / "runs.jsonl") == slurp(b / "runs.jsonl"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "summary.csv").find("success_rate") != std::string::npos);
  CHECK(fs::exists(a / "timing.csv"));
}

TEST_CASE("check passes on shipped problems and reports per-block errors when verbose") {
  CHECK(run("check --problem toy_mpcc") == 0);
  CHECK(run("check --problem transport --points 3 -v", "check.txt") == 0);
  const std::string text = slurp(root() / "check.txt");
  CHECK(text.find("jacobian_eq") != std::string::npos);
  std::ofstream(root() / "corrupt.yaml") << "horizon: 1\n";
  CHECK(run("check --problem transport --params " + (root() / "corrupt.yaml").string()) != 0);
}

TEST_CASE("output directory defaults to the environment variable") {
  const fs::path env = root() / "env_out";
  const std::string cmd = "CRISP_OUT_DIR=" + env.string() + " " + CRISP_CLI + " solve --problem toy_mpcc -q > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(env / "toy_mpcc" / "summary.json"));
}
