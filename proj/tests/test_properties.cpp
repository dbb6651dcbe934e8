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

// Randomized property suites. Each suite draws at least kCases instances.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crisp/harness.hpp"
#include "support.hpp"

using namespace crisp;
using namespace crisp::testing;

namespace {

constexpr int kCases = 100;

struct Instance {
  NlpProblem problem;
  Vector x;
  PenaltyVector mu;
  double delta;
};

Instance draw(Rng& rng) {
  const int n = uniform_int(rng, 2, 6);
  NlpProblem p = random_nlp(rng, n, uniform_int(rng, 0, 2), uniform_int(rng, 0, 3), uniform_int(rng, 0, 1));
  PenaltyVector mu = PenaltyVector::uniform(p.n_eq(), p.n_ineq(), 1.0, 1e6);
  for (Eigen::Index i = 0; i < mu.eq.size(); ++i) mu.eq[i] = std::pow(10.0, uniform(rng, 0.0, 4.0));
  for (Eigen::Index i = 0; i < mu.ineq.size(); ++i) mu.ineq[i] = std::pow(10.0, uniform(rng, 0.0, 4.0));
  const Vector x = random_vector(rng, n, 2.0);
  return {std::move(p), x, mu, uniform(rng, 0.05, 3.0)};
}

}  // namespace

TEST_CASE("canonical point is feasible for every subproblem") {
  Rng rng(101);
  for (int c = 0; c < kCases; ++c) {
    const Instance in = draw(rng);
    const QpData qp = build_subproblem(in.problem, in.x, in.mu, in.delta);
    QpSolution s;
    s.z = canonical_point(qp);
    s.y_eq = Vector::Zero(qp.m_eq());
    s.y_ineq = Vector::Zero(qp.m_ineq());
    s.y_bounds = Vector::Zero(qp.n());
    CHECK(independent_kkt(qp, s).primal_res <= 1e-12);
    CHECK(extract_step(qp, s.z).isZero());
  }
}

TEST_CASE("model at zero equals the merit") {
  Rng rng(102);
  for (int c = 0; c < kCases; ++c) {
    const Instance in = draw(rng);
    const QpData qp = build_subproblem(in.problem, in.x, in.mu, in.delta);
    const double merit = eval_merit(in.problem, in.x, in.mu);
    const double model = model_value(qp, Vector::Zero(in.x.size()));
    CHECK(std::abs(model - merit) <= 1e-10 * std::max(1.0, std::abs(merit)));
  }
}

TEST_CASE("predicted reduction at the QP optimum is nonnegative") {
  Rng rng(103);
  for (int c = 0; c < kCases; ++c) {
    const Instance in = draw(rng);
    const QpData qp = build_subproblem(in.problem, in.x, in.mu, in.delta);
    const QpSolution s = solve_qp(qp);
    REQUIRE(s.status == QpStatus::Optimal);
    CHECK(predicted_reduction(qp, extract_step(qp, s.z)) >= -1e-8);
  }
}

TEST_CASE("second-order correction is exact on quadratic rows") {
  Rng rng(104);
  for (int c = 0; c < kCases; ++c) {
    const Instance in = draw(rng);
    const QpData qp = build_subproblem(in.problem, in.x, in.mu, in.delta);
    const Vector p = random_vector(rng, static_cast<int>(in.x.size()), in.delta);
    const QpData soc = apply_second_order_correction(qp, in.problem, in.x, p);
    const ConstraintValues at = in.problem.constraints(Vector(in.x + p));
    const Linearization lin = in.problem.linearize(in.x);
    const Vector want_eq = at.eq - lin.jac_eq * p;
    const Vector want_ineq = at.ineq - lin.jac_ineq * p;
    for (int i = 0; i < qp.m_eq(); ++i)
      CHECK(std::abs(soc.model.c_eq[i] - want_eq[i]) <= 1e-12 * std::max(1.0, std::abs(want_eq[i])));
    for (Eigen::Index i = 0; i < want_ineq.size(); ++i)
      CHECK(std::abs(soc.model.c_ineq[i] - want_ineq[i]) <= 1e-12 * std::max(1.0, std::abs(want_ineq[i])));
    // With the corrected constants the linear model reproduces c(x + p) at p.
    if (at.eq.size() > 0)
      CHECK((soc.model.c_eq + lin.jac_eq * p - at.eq).cwiseAbs().maxCoeff() <=
            1e-11 * (1.0 + at.eq.cwiseAbs().maxCoeff()));
    CHECK(soc.lb == qp.lb);
    CHECK(soc.q == qp.q);
  }
}

TEST_CASE("solver trace invariants") {
  Rng rng(105);
  SolverConfig cfg;
  cfg.k_max = 200;
  cfg.certify = false;
  int bumps_seen = 0;
  for (int c = 0; c < kCases; ++c) {
    CAPTURE(c);
    const Instance in = draw(rng);
    const SolveReport r = solve(in.problem, in.x, cfg);
    REQUIRE_FALSE(r.trace.empty());
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      const IterationRecord& it = r.trace[k];
      // Trust-region bounds.
      CHECK(it.delta > 0.0);
      CHECK(it.delta <= cfg.delta_max);
      CHECK(it.step_norm_inf <= it.delta * (1.0 + 1e-9));
      if (k + 1 == r.trace.size()) break;
      const IterationRecord& next = r.trace[k + 1];
      // Penalties only grow.
      CHECK(next.mu_max_entry >= it.mu_max_entry);
      // Merit never increases between penalty updates.
      if (!it.penalty_bumped) {
        CHECK(next.merit <= it.merit + 1e-10 * std::max(1.0, std::abs(it.merit)));
      } else {
        ++bumps_seen;
      }
      if (!it.accepted && !it.converged_sentinel && !it.penalty_bumped) CHECK(next.delta < it.delta);
    }
    CHECK((r.final_mu.eq.array() >= cfg.mu0).all());
    CHECK((r.final_mu.ineq.array() >= cfg.mu0).all());
    CHECK(r.final_mu.max_entry() <= cfg.mu_max);
  }
  CHECK(bumps_seen > 0);
}

TEST_CASE("derivatives agree with finite differences on random problems") {
  Rng rng(106);
  for (int c = 0; c < kCases; ++c) {
    const Instance in = draw(rng);
    const DerivReport rep = check_derivatives(in.problem, in.x);
    CHECK(rep.pass());
    CHECK(rep.max_error() < 1e-4);
  }
}

TEST_CASE("derivatives agree with finite differences on every shipped problem") {
  Rng rng(107);
  int cases = 0;
  for (const ProblemEntry& e : problem_registry()) {
    CAPTURE(e.name);
    ParamMap params;
    if (e.defaults().count("horizon")) params["horizon"] = {6.0};
    const TrajectoryProblem tp = e.build(params, ProductMode::Equality);
    const Vector base = tp.rollout();
    for (int k = 0; k < 15; ++k) {
      const Vector x = base + random_vector(rng, static_cast<int>(base.size()), 0.3);
      const DerivReport rep = check_derivatives(*tp.nlp, x);
      CHECK(rep.pass());
      CHECK(rep.max_error() < 1e-4);
      ++cases;
    }
  }
  CHECK(cases >= kCases);
}

TEST_CASE("encode and decode round-trip") {
  Rng rng(108);
  const auto& reg = problem_registry();
  for (int c = 0; c < kCases; ++c) {
    const ProblemEntry& e = reg[static_cast<std::size_t>(c) % reg.size()];
    ParamMap params;
    if (e.defaults().count("horizon")) params["horizon"] = {static_cast<double>(uniform_int(rng, 2, 12))};
    const TrajectoryProblem tp = e.build(params, ProductMode::Equality);
    const Vector x = random_vector(rng, tp.nlp->n_vars(), 10.0);
    const Trajectory t = decode_trajectory(*tp.nlp, x);
    CHECK((encode_trajectory(*tp.nlp, t).array() == x.array()).all());
  }
}
