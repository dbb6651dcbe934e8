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

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crisp/harness.hpp"

namespace crisp {

namespace {

using Json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

/// JSON has no representation for inf/nan; encode them as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json opt(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json record_json(const IterationRecord& r) {
  return Json{{"schema_version", kTraceSchemaVersion},
              {"iteration", r.iteration},
              {"merit", num(r.merit)},
              {"objective", num(r.objective)},
              {"max_violation", num(r.max_violation)},
              {"delta", num(r.delta)},
              {"rho", num(r.rho)},
              {"ared", num(r.ared)},
              {"pred", num(r.pred)},
              {"step_norm_inf", num(r.step_norm_inf)},
              {"soc_used", r.soc_used},
              {"accepted", r.accepted},
              {"converged_sentinel", r.converged_sentinel},
              {"penalty_bumped", r.penalty_bumped},
              {"mu_max_entry", num(r.mu_max_entry)},
              {"qp_iterations", r.qp_iterations},
              {"qp_status", std::string(to_string(r.qp_status))}};
}

Json guess_json(const GuessOptions& g) {
  const char* mode = g.mode == GuessMode::AllZero          ? "zero"
                     : g.mode == GuessMode::PassiveRollout ? "rollout"
                                                           : "noisy";
  return Json{{"mode", mode}, {"seed", g.seed}, {"sigma", g.sigma}};
}

Json result_json(const RunResult& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.spec.params) params[k] = v;
  Json j{{"label", r.spec.label},
         {"problem", r.spec.problem},
         {"params", params},
         {"guess", guess_json(r.spec.guess)},
         {"status", r.error.empty() ? std::string(to_string(r.report.status)) : std::string("Error")},
         {"error", r.error},
         {"iterations", r.report.iterations},
         {"penalty_updates", r.report.penalty_updates},
         {"final_objective", num(r.report.final_objective)},
         {"final_merit", num(r.report.final_merit)},
         {"max_violation", num(r.metrics.violation)},
         {"max_complementarity_product", num(r.max_product)},
         {"tracking_error", num(r.metrics.tracking_error)},
         {"translation_error", opt(r.metrics.translation_error)},
         {"velocity_error", opt(r.metrics.velocity_error)},
         {"angle_error", opt(r.metrics.angle_error)},
         {"angular_rate_error", opt(r.metrics.angular_rate_error)},
         {"success", r.error.empty() && r.metrics.success}};
  if (r.report.certificate) {
    j["certificate"] = Json{{"n_directions", r.report.certificate->n_directions},
                            {"min_directional_derivative", num(r.report.certificate->min_directional_derivative)},
                            {"fd_step", r.report.certificate->fd_step}};
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::string& path, const Trajectory& t) {
  auto out = open_out(path);
  out << "time";
  for (const auto& n : t.names) out << ',' << n;
  out << '\n';
  for (int k = 0; k < t.steps(); ++k) {
    out << format_double(t.times[k]);
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) out << ',' << format_double(t.values(k, j));
    out << '\n';
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  Trajectory t;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "time") throw std::runtime_error(path + ": first column must be 'time'");
    while (std::getline(ss, cell, ',')) t.names.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.names.size() + 1) throw std::runtime_error(path + ": ragged row");
    rows.push_back(std::move(row));
  }
  t.times.resize(static_cast<Eigen::Index>(rows.size()));
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    t.times[k] = rows[k][0];
    for (std::size_t j = 0; j < t.names.size(); ++j) t.values(k, j) = rows[k][j + 1];
  }
  return t;
}

void write_trace_jsonl(const std::string& path, const SolveReport& report) {
  auto out = open_out(path);
  for (const auto& r : report.trace) out << record_json(r).dump() << '\n';
}

void write_summary_json(const std::string& path, const RunResult& result) {
  auto out = open_out(path);
  out << result_json(result).dump(2) << '\n';
}

void write_runs_jsonl(const std::string& path, const std::vector<RunResult>& results) {
  auto out = open_out(path);
  for (const auto& r : results) out << result_json(r).dump() << '\n';
}

void write_timing(const std::string& path, const std::vector<RunResult>& results) {
  auto out = open_out(path);
  out << "label,problem,iterations,wall_time_s\n";
  for (const auto& r : results)
    out << r.spec.label << ',' << r.spec.problem << ',' << r.report.iterations << ','
        << format_double(r.report.wall_time) << '\n';
}

void write_suite_csv(const std::string& path, const std::vector<SuiteRow>& rows) {
  auto out = open_out(path);
  out << "problem,runs,successes,success_rate_pct,median_tracking_error,median_violation,mean_iterations\n";
  for (const auto& r : rows)
    out << r.problem << ',' << r.runs << ',' << r.successes << ',' << format_double(r.success_rate) << ','
        << format_double(r.median_tracking_error) << ',' << format_double(r.median_violation) << ','
        << format_double(r.mean_iterations) << '\n';
}

std::string format_suite_table(const std::vector<SuiteRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %5s %9s %12s %12s %10s %10s\n", "problem", "runs", "success%",
                "track_err", "violation", "iters", "time[s]");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %5d %9.1f %12.3e %12.3e %10.1f %10.3f\n", r.problem.c_str(),
                  r.runs, r.success_rate, r.median_tracking_error, r.median_violation, r.mean_iterations,
                  r.mean_wall_time);
    out += buf;
  }
  return out;
}

}  // namespace crisp
