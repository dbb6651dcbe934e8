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

#include "crisp/problems.hpp"
#include "support.hpp"

using namespace crisp;
using namespace crisp::testing;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// min 0.5 p^2 s.t. p >= 1.
QpData one_sided() {
  QpData qp;
  qp.P = Matrix::Identity(1, 1).sparseView();
  qp.q = Vector::Zero(1);
  qp.A_eq.resize(0, 1);
  qp.b_eq.resize(0);
  qp.A_ineq = Matrix::Ones(1, 1).sparseView();
  qp.b_ineq = Vector::Ones(1);
  qp.lb = Vector::Constant(1, -kInf);
  qp.ub = Vector::Constant(1, kInf);
  qp.slices.p = {0, 1};
  return qp;
}

// Scalar re-implementation of the nonsmooth model for the toy problem.
double toy_model(const Vector& xk, double mu, const Vector& p) {
  const double j = xk.squaredNorm() + 2.0 * xk.dot(p) + p.squaredNorm();
  const double eq = xk[0] * xk[1] + xk[1] * p[0] + xk[0] * p[1];
  const double g1 = xk[0] + p[0], g2 = xk[1] + p[1];
  return j + mu * (std::abs(eq) + std::max(0.0, -g1) + std::max(0.0, -g2));
}

}  // namespace

TEST_CASE("toy subproblem encodes the hand linearization") {
  const TrajectoryProblem toy = toy_mpcc();
  const Vector xk = vec({1.0, 1.0});
  const PenaltyVector mu = PenaltyVector::uniform(1, 2, 10.0, 1e6);
  const QpData qp = build_subproblem(*toy.nlp, xk, mu, 1.0);
  const Matrix Ae = dense(qp.A_eq);
  REQUIRE(qp.n() == 2 + 2 + 2);
  REQUIRE(qp.m_eq() == 1);
  const auto& s = qp.slices;
  CHECK(Ae(0, 0) == 1.0);
  CHECK(Ae(0, 1) == 1.0);
  CHECK(Ae(0, s.v.begin) == -1.0);
  CHECK(Ae(0, s.w.begin) == 1.0);
  CHECK(qp.b_eq[0] == -1.0);
  CHECK(qp.lb.head(2) == Vector::Constant(2, -1.0));
  CHECK(qp.ub.head(2) == Vector::Constant(2, 1.0));
  CHECK(qp.q[s.v.begin] == 10.0);
  CHECK(qp.q[s.t.begin] == 10.0);
  const Matrix P = dense(qp.P);
  CHECK(P.topLeftCorner(2, 2).isApprox(2.0 * Matrix::Identity(2, 2)));
  CHECK(P.bottomRightCorner(4, 4).isZero());
}

TEST_CASE("cubic inequalities linearize as expected") {
  const TrajectoryProblem cq = cq_fail_toy();
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector xk = random_vector(rng, 2, 1.5);
    const QpData qp = build_subproblem(*cq.nlp, xk, PenaltyVector::uniform(0, 2, 10.0, 1e6), 0.5);
    const Matrix Ai = dense(qp.A_ineq);
    const double x1 = xk[0], x2 = xk[1];
    // 3 x1^2 p1 - p2 + (x1^3 - x2) >= -t1 and 3 x1^2 p1 + p2 + (x1^3 + x2) >= -t2.
    CHECK(Ai(0, 0) == doctest::Approx(3.0 * x1 * x1));
    CHECK(Ai(0, 1) == -1.0);
    CHECK(Ai(1, 1) == 1.0);
    CHECK(Ai(0, qp.slices.t.begin) == 1.0);
    CHECK(qp.b_ineq[0] == doctest::Approx(-(x1 * x1 * x1 - x2)));
    CHECK(qp.b_ineq[1] == doctest::Approx(-(x1 * x1 * x1 + x2)));
  }
}

TEST_CASE("model value agrees with an independent scalar evaluation") {
  const TrajectoryProblem toy = toy_mpcc();
  const Vector xk = vec({1.0, 1.0});
  const PenaltyVector mu = PenaltyVector::uniform(1, 2, 10.0, 1e6);
  const QpData qp = build_subproblem(*toy.nlp, xk, mu, 1.0);
  CHECK(model_value(qp, vec({-1.0, -1.0})) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(model_value(qp, *toy.nlp, xk, mu, vec({-1.0, -1.0})) == doctest::Approx(10.0));
  CHECK(model_value(qp, Vector::Zero(2)) == eval_merit(*toy.nlp, xk, mu));
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector p = random_vector(rng, 2, 1.0);
    CHECK(model_value(qp, p) == doctest::Approx(toy_model(xk, 10.0, p)).epsilon(1e-13));
    CHECK(predicted_reduction(qp, p) ==
          doctest::Approx(toy_model(xk, 10.0, Vector::Zero(2)) - toy_model(xk, 10.0, p)).epsilon(1e-12));
  }
}

TEST_CASE("model on a linear problem is the merit of the linearized problem") {
  VariableLayout l;
  l.horizon = 1;
  l.add("a", VarKind::State);
  l.add("b", VarKind::State);
  ProblemBuilder b(l);
  b.set_objective(std::make_shared<QuadraticObjective>(SparseMatrix(2, 2), vec({1.0, -2.0})));
  b.add_equality(ScalarFunction::affine({{0, 1.0}, {1, 1.0}}, -1.0), {RowCategory::Other, "sum", 0});
  b.add_inequality(ScalarFunction::affine({{0, 2.0}, {1, -1.0}}, 0.5), {RowCategory::Other, "lin", 0});
  const NlpProblem p = b.build();
  const PenaltyVector mu = PenaltyVector::uniform(1, 1, 7.0, 1e6);
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector xk = random_vector(rng, 2, 3.0);
    const Vector step = random_vector(rng, 2, 1.0);
    const QpData qp = build_subproblem(p, xk, mu, 2.0);
    CHECK(model_value(qp, step) == doctest::Approx(eval_merit(p, Vector(xk + step), mu)).epsilon(1e-12));
  }
}

TEST_CASE("second-order correction examples") {
  SUBCASE("toy product row picks up p1 p2") {
    const TrajectoryProblem toy = toy_mpcc();
    const Vector xk = vec({1.0, 1.0});
    const QpData qp = build_subproblem(*toy.nlp, xk, PenaltyVector::uniform(1, 2, 10.0, 1e6), 1.0);
    const QpData soc = apply_second_order_correction(qp, *toy.nlp, xk, vec({-1.0, -1.0}));
    CHECK(soc.b_eq[0] == doctest::Approx(qp.b_eq[0] - 1.0));
    CHECK(soc.b_ineq == qp.b_ineq);
    CHECK(soc.lb == qp.lb);
    CHECK(soc.ub == qp.ub);
    CHECK(soc.q == qp.q);
  }
  SUBCASE("square row picks up p^2") {
    VariableLayout l;
    l.horizon = 1;
    l.add("x", VarKind::State);
    ProblemBuilder b(l);
    QuadraticCostBuilder c(1);
    c.add_tracking(0, 1.0);
    b.set_objective(c.build());
    b.add_equality(ScalarFunction::square(ScalarFunction::variable(0)), {RowCategory::Other, "sq", 0});
    b.add_inequality(ScalarFunction::affine({{0, 3.0}}, 1.0), {RowCategory::Other, "lin", 0});
    const NlpProblem p = b.build();
    const Vector xk = vec({1.0});
    const QpData qp = build_subproblem(p, xk, PenaltyVector::uniform(1, 1, 10.0, 1e6), 1.0);
    const QpData soc = apply_second_order_correction(qp, p, xk, vec({0.5}));
    CHECK(soc.model.c_eq[0] - qp.model.c_eq[0] == doctest::Approx(0.25));
    CHECK(soc.b_ineq[0] == qp.b_ineq[0]);
  }
}

TEST_CASE("hand-built KKT pair has zero residuals; a perturbation shows up as primal_res") {
  const QpData qp = one_sided();
  QpSolution s;
  s.z = Vector::Ones(1);
  s.y_eq.resize(0);
  s.y_ineq = Vector::Ones(1);
  s.y_bounds = Vector::Zero(1);
  const KktResiduals r = kkt_residuals(qp, s);
  CHECK(r.max() <= 1e-12);
  s.z[0] -= 1e-3;
  CHECK(kkt_residuals(qp, s).primal_res == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("reference backend solves the small hand examples") {
  const QpSolution a = solve_qp(one_sided());
  REQUIRE(a.status == QpStatus::Optimal);
  CHECK(a.z[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(a.y_ineq[0] == doctest::Approx(1.0).epsilon(1e-6));

  QpData b;
  b.P = Matrix::Identity(2, 2).sparseView();
  b.q = Vector::Zero(2);
  b.A_eq = Matrix::Ones(1, 2).sparseView();
  b.b_eq = vec({2.0});
  b.A_ineq.resize(0, 2);
  b.b_ineq.resize(0);
  b.lb = Vector::Constant(2, -10.0);
  b.ub = Vector::Constant(2, 10.0);
  b.slices.p = {0, 2};
  const QpSolution sb = solve_qp(b);
  REQUIRE(sb.status == QpStatus::Optimal);
  CHECK((sb.z - Vector::Ones(2)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("library oracle, test oracle and reference backend agree on random QPs") {
  Rng rng(20240601);
  int unique_checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int rank = trial % 5 == 0 ? 4 : 6;
    const QpData qp = random_qp(rng, 6, trial % 2, 3, rank);
    const OracleResult mine = enumerate_active_sets(qp);
    REQUIRE(mine.found);
    const QpSolution lib = solve_qp_oracle(qp);
    const QpSolution ref = solve_qp(qp);
    REQUIRE(lib.status == QpStatus::Optimal);
    REQUIRE(ref.status == QpStatus::Optimal);
    CHECK(qp.objective(lib.z) == doctest::Approx(mine.objective).epsilon(1e-9));
    CHECK(std::abs(qp.objective(ref.z) - mine.objective) <= 1e-6);
    CHECK(independent_kkt(qp, lib).max() <= 1e-8);
    CHECK(independent_kkt(qp, ref).max() <= 1e-8 * kkt_scale(qp));
    if (rank == 6) {
      ++unique_checked;
      CHECK((ref.z - mine.z).lpNorm<Eigen::Infinity>() <= 1e-5);
    }
  }
  CHECK(unique_checked == 40);
}

TEST_CASE("subproblems solve to the oracle optimum and predict nonnegative reduction") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const NlpProblem p = random_nlp(rng, 3, 1, 1);
    const Vector xk = random_vector(rng, 3);
    const PenaltyVector mu = PenaltyVector::uniform(p.n_eq(), p.n_ineq(), uniform(rng, 1.0, 20.0), 1e6);
    const QpData qp = build_subproblem(p, xk, mu, uniform(rng, 0.1, 2.0));
    const QpSolution ref = solve_qp(qp);
    REQUIRE(ref.status == QpStatus::Optimal);
    const OracleResult mine = enumerate_active_sets(qp);
    REQUIRE(mine.found);
    CHECK(std::abs(qp.objective(ref.z) - mine.objective) <= 1e-6 * std::max(1.0, std::abs(mine.objective)));
    CHECK(predicted_reduction(qp, extract_step(qp, ref.z)) >= -1e-8);
    // At the optimum the slacks are tight, so the QP objective is the model.
    CHECK(qp.objective(ref.z) == doctest::Approx(model_value(qp, extract_step(qp, ref.z))).epsilon(1e-6));
  }
}

TEST_CASE("oracle refuses large problems and unknown backends are rejected") {
  Rng rng(4);
  const QpData big = random_qp(rng, 20, 0, 10);
  CHECK_THROWS_AS(solve_qp_oracle(big), ProblemTooLarge);
  CHECK_THROWS_AS(make_qp_backend("nope"), std::invalid_argument);
  CHECK(make_qp_backend("oracle")->name() == "oracle");
  CHECK(make_qp_backend("reference")->name() == "reference");
}

TEST_CASE("solves are deterministic and warm starts keep Optimal") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const QpData qp = random_qp(rng, 8, 2, 4);
    const QpSolution a = solve_qp(qp);
    const QpSolution b = solve_qp(qp);
    REQUIRE(a.status == QpStatus::Optimal);
    CHECK(a.iterations == b.iterations);
    CHECK((a.z.array() == b.z.array()).all());
    const QpSolution w = solve_qp(qp, 1e-8, a);
    CHECK(w.status == QpStatus::Optimal);
  }
}

TEST_CASE("solutions respect bounds exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const QpData qp = random_qp(rng, 6, 1, 3);
    const QpSolution s = solve_qp(qp);
    CHECK((s.z.array() >= qp.lb.array()).all());
    CHECK((s.z.array() <= qp.ub.array()).all());
  }
}
