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

// crisp: solve, benchmark and check the shipped trajectory problems.
//
//   crisp solve --problem cartpole --guess rollout --out runs/cp
//   crisp bench --suite desk --jobs 4 --out runs/desk
//   crisp check --problem hopper --verbose
//
// Exit codes: 0 success, 1 usage or configuration error, 2 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "crisp/harness.hpp"

namespace fs = std::filesystem;
using namespace crisp;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kSolverFailure = 2;

struct Overrides {
  ParamMap params;
  SolverConfig config;
};

/// --set problem.<key>=v edits the parameter map; solver.<key>=v or a bare
/// key edits the solver configuration.
Overrides apply_sets(ParamMap params, const std::vector<std::string>& sets) {
  Overrides o{std::move(params), {}};
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    std::string key = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    if (key.rfind("problem.", 0) == 0) {
      set_param(o.params, key.substr(8), value);
    } else {
      if (key.rfind("solver.", 0) == 0) key = key.substr(7);
      set_solver_option(o.config, key, value);
    }
  }
  return o;
}

GuessMode parse_guess(const std::string& s) {
  if (s == "zero") return GuessMode::AllZero;
  if (s == "rollout") return GuessMode::PassiveRollout;
  if (s == "noisy") return GuessMode::NoisyRollout;
  throw std::invalid_argument("--guess expects zero|rollout|noisy");
}

std::string default_out(const std::string& leaf) {
  const char* env = std::getenv("CRISP_OUT_DIR");
  return (fs::path(env && *env ? env : "crisp_out") / leaf).string();
}

ParamMap load_params(const std::string& problem, const std::string& file) {
  find_problem(problem);
  if (!file.empty()) return load_param_file(file);
  const std::string shipped = default_param_path(problem);
  return fs::exists(shipped) ? load_param_file(shipped) : ParamMap{};
}

int cmd_solve(const std::string& problem, const std::string& params_file, const std::string& guess,
              std::uint64_t seed, double sigma, const std::vector<std::string>& sets, std::string out_dir,
              bool emit_traj, bool emit_trace, bool quiet) {
  RunSpec spec;
  Overrides o = apply_sets(load_params(problem, params_file), sets);
  spec.label = problem;
  spec.problem = problem;
  spec.params = std::move(o.params);
  spec.config = o.config;
  spec.guess = {parse_guess(guess), seed, sigma};
  if (out_dir.empty()) out_dir = default_out(problem);

  SolveOptions opts;
  if (!quiet) {
    opts.progress = [](const IterationRecord& r) {
      if (r.iteration % 25 == 0 || r.penalty_bumped)
        std::fprintf(stderr, "iter %5d  merit %.6e  viol %.3e  delta %.3e  rho %+.3f%s\n", r.iteration, r.merit,
                     r.max_violation, r.delta, r.rho, r.penalty_bumped ? "  [penalty]" : "");
    };
  }
  const RunResult result = run_one(spec, {}, opts);

  fs::create_directories(out_dir);
  const auto built = find_problem(problem).build(spec.params, spec.config.complementarity_mode);
  if (emit_traj)
    write_trajectory_csv((fs::path(out_dir) / "trajectory.csv").string(),
                         decode_trajectory(*built.nlp, result.report.x_star));
  if (emit_trace) write_trace_jsonl((fs::path(out_dir) / "trace.jsonl").string(), result.report);
  write_summary_json((fs::path(out_dir) / "summary.json").string(), result);
  write_timing((fs::path(out_dir) / "timing.csv").string(), {result});

  const bool ok = result.error.empty() && result.report.success();
  std::printf("%s: %s after %d iterations, violation %.3e, tracking error %.3e, %.3f s\n", problem.c_str(),
              result.error.empty() ? std::string(to_string(result.report.status)).c_str() : "Error",
              result.report.iterations, result.metrics.violation, result.metrics.tracking_error,
              result.report.wall_time);
  if (!result.error.empty()) std::fprintf(stderr, "error: %s\n", result.error.c_str());
  std::printf("outputs written to %s\n", out_dir.c_str());
  return ok ? kOk : kSolverFailure;
}

int cmd_bench(const std::string& suite, int jobs, std::uint64_t seed, const std::vector<std::string>& sets,
              std::string out_dir) {
  std::vector<RunSpec> runs = make_suite(suite, seed);
  const Overrides o = apply_sets({}, sets);
  for (auto& r : runs) {
    for (const auto& [k, v] : o.params) r.params[k] = v;
    r.config = o.config;
  }
  if (out_dir.empty()) out_dir = default_out("bench_" + suite);
  const std::vector<RunResult> results = run_all(runs, jobs);
  const auto rows = summarize(results);

  fs::create_directories(out_dir);
  write_suite_csv((fs::path(out_dir) / "summary.csv").string(), rows);
  write_runs_jsonl((fs::path(out_dir) / "runs.jsonl").string(), results);
  write_timing((fs::path(out_dir) / "timing.csv").string(), results);
  std::printf("%s", format_suite_table(rows).c_str());
  std::printf("outputs written to %s\n", out_dir.c_str());
  for (const auto& r : results)
    if (!r.error.empty()) std::fprintf(stderr, "%s: %s\n", r.spec.label.c_str(), r.error.c_str());
  return kOk;
}

int cmd_check(const std::string& problem, const std::string& params_file, const std::vector<std::string>& sets,
              int points, bool verbose) {
  const Overrides o = apply_sets(load_params(problem, params_file), sets);
  const TrajectoryProblem built = find_problem(problem).build(o.params, o.config.complementarity_mode);
  const ProblemCheck c = check_problem(built, points);

  std::printf("%s: %d vars, %d equalities, %d inequalities, %zu complementarity pairs\n", problem.c_str(),
              built.nlp->n_vars(), built.nlp->n_eq(), built.nlp->n_ineq(), built.nlp->complementarity().size());
  std::printf("  derivatives   %s  (worst relative error %.3e over %d points)\n", c.derivatives_pass ? "ok  " : "FAIL",
              c.worst_derivative_error, points);
  if (verbose) {
    for (std::size_t i = 0; i < c.derivatives.size(); ++i) {
      const auto& d = c.derivatives[i];
      for (const DerivBlock* b : {&d.gradient, &d.jac_eq, &d.jac_ineq, &d.hessian}) {
        std::printf("    point %2zu %-14s %.3e%s\n", i, b->name.c_str(), b->max_error, b->pass ? "" : "  FAIL");
        for (const auto& label : b->offending_labels) std::printf("      offending: %s\n", label.c_str());
      }
    }
  }
  std::printf("  hessian psd   %s  (min pivot %.3e)\n", c.hessian_pass ? "ok  " : "FAIL", c.min_hessian_pivot);
  std::printf("  rollout       %s  (max dynamics residual %.3e%s%s)\n", c.rollout_pass ? "ok  " : "FAIL",
              c.rollout_residual, c.worst_rollout_row.empty() ? "" : " at ", c.worst_rollout_row.c_str());
  return c.pass() ? kOk : kSolverFailure;
}

int cmd_params(const std::string& problem) {
  std::printf("%s", dump_params(find_problem(problem).defaults()).c_str());
  return kOk;
}

int cmd_list() {
  std::printf("problems:\n");
  for (const auto& e : problem_registry()) std::printf("  %-10s %s\n", e.name.c_str(), e.description.c_str());
  std::printf("suites:\n ");
  for (const auto& s : suite_names()) std::printf(" %s", s.c_str());
  std::printf("\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crisp: trust-region SQP solver for contact-implicit trajectory optimization"};
  app.require_subcommand(1);

  std::string problem, params_file, guess = "rollout", out_dir, suite;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  double sigma = 0.05;
  int jobs = 0, points = 20;
  bool verbose = false, quiet = false, no_traj = false, no_trace = false;

  auto* solve = app.add_subcommand("solve", "solve one problem instance");
  solve->add_option("--problem", problem, "problem name")->required();
  solve->add_option("--params", params_file, "parameter file (defaults to the shipped one)");
  solve->add_option("--guess", guess, "initial guess: zero | rollout | noisy")->capture_default_str();
  solve->add_option("--seed", seed, "seed for the noisy guess")->capture_default_str();
  solve->add_option("--sigma", sigma, "noise level for the noisy guess")->capture_default_str();
  solve->add_option("--set", sets, "override: problem.<key>=v or [solver.]<key>=v");
  solve->add_option("--out", out_dir, "output directory (default $CRISP_OUT_DIR/<problem>)");
  solve->add_flag("--no-trajectory", no_traj, "skip trajectory.csv");
  solve->add_flag("--no-trace", no_trace, "skip trace.jsonl");
  solve->add_flag("-q,--quiet", quiet, "no per-iteration progress");

  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("--suite", suite, "suite name")->required();
  bench->add_option("--jobs", jobs, "concurrent solves (0 = all cores)")->capture_default_str();
  bench->add_option("--seed", seed, "master seed")->capture_default_str();
  bench->add_option("--set", sets, "override applied to every run");
  bench->add_option("--out", out_dir, "output directory (default $CRISP_OUT_DIR/bench_<suite>)");

  auto* check = app.add_subcommand("check", "derivative, Hessian and rollout checks");
  check->add_option("--problem", problem, "problem name")->required();
  check->add_option("--params", params_file, "parameter file");
  check->add_option("--set", sets, "override: problem.<key>=v");
  check->add_option("--points", points, "random points for the derivative check")->capture_default_str();
  check->add_flag("-v,--verbose", verbose, "per-block errors");

  auto* params = app.add_subcommand("params", "print the default parameter file of a problem");
  params->add_option("--problem", problem, "problem name")->required();

  auto* list = app.add_subcommand("list", "list problems and suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve)
      return cmd_solve(problem, params_file, guess, seed, sigma, sets, out_dir, !no_traj, !no_trace, quiet);
    if (*bench) return cmd_bench(suite, jobs, seed, sets, out_dir);
    if (*check) return cmd_check(problem, params_file, sets, points, verbose);
    if (*params) return cmd_params(problem);
    if (*list) return cmd_list();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
