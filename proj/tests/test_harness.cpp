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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "crisp/harness.hpp"
#include "json.hpp"

using namespace crisp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "crisp_test_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trajectory one_step(const std::vector<std::string>& names, const std::vector<double>& values) {
  Trajectory t;
  t.names = names;
  t.times = Eigen::VectorXd::Zero(1);
  t.values = Eigen::RowVectorXd::Map(values.data(), static_cast<Eigen::Index>(values.size()));
  return t;
}

}  // namespace

TEST_CASE("success thresholds") {
  const std::vector<TrackedGroup> targets{{TrackKind::Translation, {"x"}, {1.0}},
                                          {TrackKind::Angle, {"th"}, {0.0}}};
  const SuccessCriteria c;
  CHECK(evaluate_success(one_step({"x", "th"}, {1.0, 0.0}), targets, c, 0.0).success);
  CHECK_FALSE(evaluate_success(one_step({"x", "th"}, {1.0, 0.0}), targets, c, 1e-4).success);
  CHECK_FALSE(evaluate_success(one_step({"x", "th"}, {1.0, std::numbers::pi / 4}), targets, c, 0.0).success);
  // Angles wrap: 2 pi is on target.
  const SuccessMetrics wrapped = evaluate_success(one_step({"x", "th"}, {1.0, 2.0 * std::numbers::pi}), targets, c, 0.0);
  CHECK(wrapped.success);
  CHECK(*wrapped.angle_error < 1e-12);
  const SuccessMetrics off = evaluate_success(one_step({"x", "th"}, {1.05, 0.0}), targets, c, 0.0);
  CHECK(off.success);
  CHECK(*off.translation_error == doctest::Approx(0.05));
  CHECK_FALSE(off.velocity_error.has_value());
  CHECK_FALSE(evaluate_success(one_step({"x", "th"}, {1.2, 0.0}), targets, c, 0.0).success);
  CHECK_FALSE(evaluate_success(one_step({"x", "th"}, {1.0, 0.0}), targets, c, kInf).success);
}

TEST_CASE("parameter files") {
  ParamMap p = parse_params("horizon: 10\ncost:\n  Q: [1, 2.5]\nwalls:\n  k1: 3\n");
  CHECK(p.at("horizon") == std::vector<double>{10.0});
  CHECK(p.at("cost.Q") == std::vector<double>{1.0, 2.5});
  CHECK(p.at("walls.k1") == std::vector<double>{3.0});
  CHECK(parse_params(dump_params(p)) == p);
  set_param(p, "walls.k2", "0.1");
  set_param(p, "cost.R", "[1e-3, 2]");
  CHECK(p.at("walls.k2") == std::vector<double>{0.1});
  CHECK(p.at("cost.R") == std::vector<double>{1e-3, 2.0});
  CHECK_THROWS_AS(set_param(p, "x", "abc"), SpecError);
  CHECK_THROWS_AS(parse_params("a: [1, b]\n"), SpecError);
  CHECK_THROWS_AS(parse_params("a: : :\n"), SpecError);
  CHECK_THROWS_AS(load_param_file("/nonexistent/crisp.yaml"), SpecError);
  // Unknown keys and wrong shapes are rejected by the builders.
  CHECK_THROWS_AS(find_problem("cartpole").build({{"walls.k9", {1.0}}}, ProductMode::Equality), SpecError);
  CHECK_THROWS_AS(find_problem("cartpole").build({{"dt", {1.0, 2.0}}}, ProductMode::Equality), SpecError);
}

TEST_CASE("shipped parameter files equal the compiled defaults") {
  for (const ProblemEntry& e : problem_registry()) {
    CAPTURE(e.name);
    const std::string path = default_param_path(e.name);
    REQUIRE(fs::exists(path));
    CHECK(load_param_file(path) == e.defaults());
  }
}

TEST_CASE("solver options by name") {
  SolverConfig c;
  set_solver_option(c, "k_max", "50");
  set_solver_option(c, "mu0", "100");
  set_solver_option(c, "qp_backend", "oracle");
  set_solver_option(c, "complementarity_mode", "inequality");
  set_solver_option(c, "trust_reset_on_penalty_bump", "false");
  set_solver_option(c, "exec", "serial");
  CHECK(c.k_max == 50);
  CHECK(c.mu0 == 100.0);
  CHECK(c.qp_backend == "oracle");
  CHECK(c.complementarity_mode == ProductMode::Inequality);
  CHECK_FALSE(c.trust_reset_on_penalty_bump);
  CHECK(c.exec == Exec::Serial);
  CHECK_THROWS_AS(set_solver_option(c, "k_max", "1.5"), std::invalid_argument);
  CHECK_THROWS_AS(set_solver_option(c, "nope", "1"), std::invalid_argument);
  CHECK_THROWS_AS(set_solver_option(c, "exec", "gpu"), std::invalid_argument);
}

TEST_CASE("trajectory CSV round-trips with 17 digits") {
  const TrajectoryProblem cp = find_problem("cartpole").build({{"horizon", {5.0}}}, ProductMode::Equality);
  Vector x = initial_guess(cp, {GuessMode::NoisyRollout, 2, 0.3});
  const Trajectory t = decode_trajectory(*cp.nlp, x);
  const fs::path dir = scratch("csv");
  write_trajectory_csv((dir / "t.csv").string(), t);
  const Trajectory back = read_trajectory_csv((dir / "t.csv").string());
  CHECK(back.names == t.names);
  CHECK((back.values.array() == t.values.array()).all());
  CHECK((back.times.array() == t.times.array()).all());
  const std::string text = slurp(dir / "t.csv");
  CHECK(text.rfind("time,x,theta,xdot,thetadot,u,lambda1,lambda2\n", 0) == 0);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("suite construction and grids") {
  CHECK(make_suite("cartpole").size() == 10);
  CHECK(make_suite("push_box").size() == 8);
  CHECK(make_suite("transport").size() == 5);
  CHECK_THROWS_AS(make_suite("nope"), std::invalid_argument);
  const auto a = make_suite("cartpole", 5), b = make_suite("cartpole", 5), c = make_suite("cartpole", 6);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].guess.seed == b[i].guess.seed);
  CHECK(a[1].guess.seed != c[1].guess.seed);

  const auto circle = circle_targets(8, 3.0);
  REQUIRE(circle.size() == 8);
  CHECK(circle[0][0] == doctest::Approx(3.0));
  CHECK(circle[2][1] == doctest::Approx(-3.0));  // clockwise
  for (const auto& t : circle) CHECK(std::hypot(t[0], t[1]) == doctest::Approx(3.0));
  CHECK(cartpole_initial_states().size() == 5);
  CHECK(transport_scenarios().size() == 5);
}

TEST_CASE("bench outputs: summary counts and deterministic records") {
  const auto runs = make_suite("toy");
  const auto r1 = run_all(runs, 2);
  const auto r2 = run_all(runs, 1);
  const auto rows = summarize(r1);
  int flagged = 0;
  for (const auto& r : r1) flagged += r.metrics.success;
  int counted = 0;
  for (const auto& row : rows) counted += row.successes;
  CHECK(counted == flagged);

  const fs::path d1 = scratch("bench1"), d2 = scratch("bench2");
  write_runs_jsonl((d1 / "runs.jsonl").string(), r1);
  write_runs_jsonl((d2 / "runs.jsonl").string(), r2);
  write_suite_csv((d1 / "summary.csv").string(), rows);
  write_suite_csv((d2 / "summary.csv").string(), summarize(r2));
  CHECK(slurp(d1 / "runs.jsonl") == slurp(d2 / "runs.jsonl"));
  CHECK(slurp(d1 / "summary.csv").find("wall") == std::string::npos);
  CHECK(format_suite_table(rows).find("success%") != std::string::npos);

  std::istringstream lines(slurp(d1 / "runs.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("status"));
    CHECK(j.contains("tracking_error"));
    CHECK_FALSE(j.contains("wall_time"));
    ++n;
  }
  CHECK(n == static_cast<int>(runs.size()));
}

TEST_CASE("summary and trace files") {
  RunSpec spec;
  spec.problem = "toy_mpcc";
  spec.guess.mode = GuessMode::PassiveRollout;
  const RunResult r = run_one(spec);
  const fs::path dir = scratch("single");
  write_summary_json((dir / "summary.json").string(), r);
  write_trace_jsonl((dir / "trace.jsonl").string(), r.report);
  const auto s = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(s["status"] == "Success");
  CHECK(s["iterations"] == r.report.iterations);
  std::istringstream lines(slurp(dir / "trace.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["schema_version"] == 1);
    CHECK(j["iteration"] == n);
    ++n;
  }
  CHECK(n == r.report.iterations);
}

TEST_CASE("static problem checks flag a corrupted rollout") {
  const TrajectoryProblem good = find_problem("transport").build({{"horizon", {10.0}}}, ProductMode::Equality);
  CHECK(check_problem(good, 5).pass());
  TrajectoryProblem bad = good;
  bad.rollout = [inner = good.rollout] {
    Vector x = inner();
    x[3] += 1.0;
    return x;
  };
  const ProblemCheck c = check_problem(bad, 5);
  CHECK_FALSE(c.rollout_pass);
  CHECK_FALSE(c.worst_rollout_row.empty());
}
