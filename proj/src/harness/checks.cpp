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

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "crisp/harness.hpp"

namespace crisp {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("option '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("option '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("option '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

void set_solver_option(SolverConfig& c, const std::string& key, const std::string& value) {
  using Setter = std::function<void(SolverConfig&, const std::string&)>;
  auto real = [&key](double SolverConfig::*field) -> Setter {
    return [&key, field](SolverConfig& c, const std::string& v) { c.*field = parse_double(key, v); };
  };
  auto flag = [&key](bool SolverConfig::*field) -> Setter {
    return [&key, field](SolverConfig& c, const std::string& v) { c.*field = parse_bool(key, v); };
  };
  const std::map<std::string, Setter> setters{
      {"k_max", [&key](SolverConfig& c, const std::string& v) { c.k_max = static_cast<int>(parse_int(key, v)); }},
      {"delta0", real(&SolverConfig::delta0)},
      {"delta_max", real(&SolverConfig::delta_max)},
      {"mu0", real(&SolverConfig::mu0)},
      {"mu_max", real(&SolverConfig::mu_max)},
      {"eta_low", real(&SolverConfig::eta_low)},
      {"eta_high", real(&SolverConfig::eta_high)},
      {"gamma_shrink", real(&SolverConfig::gamma_shrink)},
      {"gamma_expand", real(&SolverConfig::gamma_expand)},
      {"eps_c", real(&SolverConfig::eps_c)},
      {"eps_p", real(&SolverConfig::eps_p)},
      {"eps_r", real(&SolverConfig::eps_r)},
      {"qp_tol", real(&SolverConfig::qp_tol)},
      {"boundary_tol", real(&SolverConfig::boundary_tol)},
      {"certificate_fd_step", real(&SolverConfig::certificate_fd_step)},
      {"qp_backend", [](SolverConfig& c, const std::string& v) { c.qp_backend = v; }},
      {"complementarity_mode",
       [&key](SolverConfig& c, const std::string& v) {
         if (v == "equality") c.complementarity_mode = ProductMode::Equality;
         else if (v == "inequality") c.complementarity_mode = ProductMode::Inequality;
         else throw std::invalid_argument("option '" + key + "' expects equality|inequality");
       }},
      {"exec",
       [&key](SolverConfig& c, const std::string& v) {
         if (v == "serial") c.exec = Exec::Serial;
         else if (v == "parallel") c.exec = Exec::Parallel;
         else throw std::invalid_argument("option '" + key + "' expects serial|parallel");
       }},
      {"trust_reset_on_penalty_bump", flag(&SolverConfig::trust_reset_on_penalty_bump)},
      {"second_order_correction", flag(&SolverConfig::second_order_correction)},
      {"warm_start", flag(&SolverConfig::warm_start)},
      {"certify", flag(&SolverConfig::certify)},
      {"certificate_directions",
       [&key](SolverConfig& c, const std::string& v) {
         c.certificate_directions = static_cast<int>(parse_int(key, v));
       }},
      {"certificate_seed",
       [&key](SolverConfig& c, const std::string& v) {
         c.certificate_seed = static_cast<std::uint64_t>(parse_int(key, v));
       }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw std::invalid_argument("unknown solver option '" + key + "'");
  it->second(c, value);
  c.validate();
}

ProblemCheck check_problem(const TrajectoryProblem& problem, int points, std::uint64_t seed, double threshold) {
  const NlpProblem& nlp = *problem.nlp;
  ProblemCheck out;

  for (int i = 0; i < points; ++i) {
    GuessOptions g;
    g.mode = GuessMode::NoisyRollout;
    g.seed = seed + static_cast<std::uint64_t>(i);
    g.sigma = 0.3;
    const Vector x = initial_guess(problem, g);
    DerivReport rep = check_derivatives(nlp, x, 1e-6, threshold);
    out.worst_derivative_error = std::max(out.worst_derivative_error, rep.max_error());
    out.derivatives_pass = out.derivatives_pass && rep.pass();
    out.derivatives.push_back(std::move(rep));
  }

  const Vector x0 = initial_guess(problem, {});
  out.min_hessian_pivot = min_hessian_pivot(nlp.objective(), x0);
  out.hessian_pass = out.min_hessian_pivot >= -1e-10;

  const Vector roll = initial_guess(problem, {GuessMode::PassiveRollout, 0, 0.0});
  const ConstraintValues c = nlp.constraints(roll, Exec::Serial);
  for (int i = 0; i < nlp.n_eq(); ++i) {
    const auto cat = nlp.eq_label(i).category;
    if (cat != RowCategory::Dynamics && cat != RowCategory::InitialCondition) continue;
    if (std::abs(c.eq[i]) > out.rollout_residual) {
      out.rollout_residual = std::abs(c.eq[i]);
      out.worst_rollout_row = nlp.eq_label(i).str();
    }
  }
  out.rollout_pass = out.rollout_residual <= 1e-10;
  return out;
}

}  // namespace crisp
