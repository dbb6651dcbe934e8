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

VariableLayout two_vars() {
  VariableLayout l;
  l.add("x1", VarKind::State);
  l.add("x2", VarKind::State);
  return l;
}

std::shared_ptr<const QuadraticObjective> sum_of_squares(int n) {
  QuadraticCostBuilder c(n);
  for (int i = 0; i < n; ++i) c.add_tracking(i, 2.0);
  return c.build();
}

}  // namespace

TEST_CASE("scalar function helpers match finite differences") {
  Rng rng(3);
  const ScalarFunction a = ScalarFunction::affine({{0, 2.0}, {2, -1.5}}, 0.25);
  const ScalarFunction b = ScalarFunction::variable(1, 3.0);
  const ScalarFunction fs[] = {a, b, ScalarFunction::product(a, b, 0.5), ScalarFunction::square(a, 2.0),
                               ScalarFunction::scaled(b, -4.0)};
  for (const auto& f : fs) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = random_vector(rng, 3, 2.0);
      std::vector<double> g(f.nnz());
      f(x.data(), g.data());
      const Vector fd = fd_gradient([&](const Vector& y) { return f.value(y); }, x);
      for (int k = 0; k < f.nnz(); ++k) CHECK(g[k] == doctest::Approx(fd[f.deps()[k]]).epsilon(1e-7));
    }
  }
}

TEST_CASE("scalar function rejects malformed dependency lists") {
  auto eval = [](const double*, double*) { return 0.0; };
  CHECK_THROWS_AS(ScalarFunction({0, 0}, eval), std::invalid_argument);
  CHECK_THROWS_AS(ScalarFunction({-1}, eval), std::invalid_argument);
  CHECK_THROWS_AS(ScalarFunction({0}, ScalarFunction::Eval{}), std::invalid_argument);
}

TEST_CASE("toy complementarity expands into three rows") {
  ProblemBuilder b(two_vars());
  b.set_objective(sum_of_squares(2));
  const ExprId a = b.add_expression(ScalarFunction::variable(0));
  const ExprId c = b.add_expression(ScalarFunction::variable(1));
  b.add_complementarity({a, c, ProductMode::Equality}, {RowCategory::Complementarity, "x1_x2", 0});
  CHECK_THROWS_AS(b.add_complementarity({a, c, ProductMode::Equality}, {RowCategory::Complementarity, "dup", 0}),
                  DuplicateConstraint);
  const NlpProblem p = b.build();
  REQUIRE(p.n_eq() == 1);
  REQUIRE(p.n_ineq() == 2);
  REQUIRE(p.complementarity().size() == 1);

  Vector x(2);
  x << 0.3, 0.7;
  const ConstraintValues cv = p.constraints(x, Exec::Serial);
  CHECK(cv.ineq[0] == doctest::Approx(0.3));
  CHECK(cv.ineq[1] == doctest::Approx(0.7));
  CHECK(cv.eq[0] == doctest::Approx(0.21));
}

TEST_CASE("inequality product mode stores -a*b >= 0") {
  ProblemBuilder b(two_vars());
  b.set_objective(sum_of_squares(2));
  const ExprId a = b.add_expression(ScalarFunction::variable(0));
  const ExprId c = b.add_expression(ScalarFunction::variable(1));
  b.add_complementarity({a, c, ProductMode::Inequality}, {RowCategory::Complementarity, "pair", 0});
  const NlpProblem p = b.build();
  CHECK(p.n_eq() == 0);
  REQUIRE(p.n_ineq() == 3);
  Vector x(2);
  x << 2.0, 0.5;
  const ConstraintValues cv = p.constraints(x, Exec::Serial);
  CHECK(cv.ineq[p.complementarity()[0].product_row] == doctest::Approx(-1.0));
  CHECK_FALSE(p.complementarity()[0].product_is_equality);
}

TEST_CASE("zero operand makes the product row identically satisfied") {
  ProblemBuilder b(two_vars());
  b.set_objective(sum_of_squares(2));
  const ExprId zero = b.add_expression(ScalarFunction::constant(0.0));
  const ExprId any = b.add_expression(ScalarFunction::product(ScalarFunction::variable(0), ScalarFunction::variable(1)));
  b.add_complementarity({zero, any, ProductMode::Equality}, {RowCategory::Complementarity, "zero", 0});
  const NlpProblem p = b.build();
  Rng rng(9);
  for (int i = 0; i < 20; ++i) CHECK(p.constraints(random_vector(rng, 2, 5.0)).eq[0] == 0.0);
}

TEST_CASE("merit equals the objective on the feasible set and is homogeneous in mu") {
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const NlpProblem p = random_nlp(rng, 4, 1, 2);
    const Vector x = random_vector(rng, 4);
    PenaltyVector mu = PenaltyVector::uniform(p.n_eq(), p.n_ineq(), uniform(rng, 1.0, 50.0), 1e6);
    const double j = p.objective().value(x);
    const ConstraintValues cv = p.constraints(x);
    double expected = j;
    for (int i = 0; i < p.n_eq(); ++i) expected += mu.eq[i] * std::abs(cv.eq[i]);
    for (int i = 0; i < p.n_ineq(); ++i) expected += mu.ineq[i] * std::max(0.0, -cv.ineq[i]);
    const double m1 = eval_merit(p, x, mu);
    CHECK(m1 == doctest::Approx(expected).epsilon(1e-12));
    PenaltyVector mu2 = mu;
    mu2.eq *= 2.0;
    mu2.ineq *= 2.0;
    CHECK(eval_merit(p, x, mu2) - j == doctest::Approx(2.0 * (m1 - j)).epsilon(1e-12));
  }
  // Feasible point of the toy problem.
  const TrajectoryProblem toy = toy_mpcc();
  Vector x(2);
  x << 0.0, 0.4;
  const PenaltyVector mu = PenaltyVector::uniform(1, 2, 10.0, 1e6);
  CHECK(eval_merit(*toy.nlp, x, mu) == toy.nlp->objective().value(x));
}

TEST_CASE("violation report splits equality and inequality parts") {
  const TrajectoryProblem toy = toy_mpcc();
  Vector x(2);
  x << -0.5, 2.0;
  const ViolationReport v = constraint_violation(*toy.nlp, x);
  CHECK(v.max_eq == doctest::Approx(1.0));
  CHECK(v.max_ineq == doctest::Approx(0.5));
  CHECK(v.max() == doctest::Approx(1.0));
  CHECK(v.per_row.size() == 3);
}

TEST_CASE("derivative check passes on the toy and flags a wrong sign") {
  const TrajectoryProblem toy = toy_mpcc();
  Vector x(2);
  x << 0.3, 0.7;
  const DerivReport good = check_derivatives(*toy.nlp, x);
  CHECK(good.pass());
  CHECK(good.max_error() < 1e-6);

  ProblemBuilder b(two_vars());
  b.set_objective(sum_of_squares(2));
  b.add_equality(ScalarFunction({0, 1},
                                [](const double* v, double* g) {
                                  if (g) {
                                    g[0] = -v[1];  // should be +v[1]
                                    g[1] = v[0];
                                  }
                                  return v[0] * v[1];
                                }),
                 {RowCategory::Other, "bad_product", 0});
  const NlpProblem bad = b.build();
  const DerivReport rep = check_derivatives(bad, x);
  CHECK_FALSE(rep.pass());
  CHECK_FALSE(rep.jac_eq.pass);
  REQUIRE(rep.jac_eq.offending_rows.size() == 1);
  CHECK(rep.jac_eq.offending_labels.front() == "other:bad_product@0");
}

TEST_CASE("non-PSD objective is rejected at build time") {
  ProblemBuilder b(two_vars());
  SparseMatrix h(2, 2);
  h.insert(0, 0) = 1.0;
  h.insert(1, 1) = -1.0;
  b.set_objective(std::make_shared<QuadraticObjective>(h, Vector::Zero(2)));
  CHECK_THROWS_AS(b.build(), std::invalid_argument);
  CHECK(min_hessian_pivot(QuadraticObjective(h, Vector::Zero(2)), Vector::Zero(2)) < -1e-10);
}

TEST_CASE("serial and parallel row kernels are bit-identical") {
  const TrajectoryProblem cp = cartpole_softwalls(CartpoleSpec{});
  const NlpProblem& p = *cp.nlp;
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = random_vector(rng, p.n_vars());
    const Linearization a = p.linearize(x, Exec::Serial);
    const Linearization b = p.linearize(x, Exec::Parallel);
    CHECK((a.c.eq.array() == b.c.eq.array()).all());
    CHECK((a.c.ineq.array() == b.c.ineq.array()).all());
    CHECK(Matrix(a.jac_eq).cwiseEqual(Matrix(b.jac_eq)).all());
    CHECK(Matrix(a.jac_ineq).cwiseEqual(Matrix(b.jac_ineq)).all());
  }
}

TEST_CASE("non-finite rows are reported by label") {
  ProblemBuilder b(two_vars());
  b.set_objective(sum_of_squares(2));
  b.add_inequality(ScalarFunction({0}, [](const double* v, double* g) {
                     if (g) g[0] = -0.5 / std::sqrt(v[0]);
                     return -std::sqrt(v[0]);
                   }),
                   {RowCategory::Bound, "root", 3});
  const NlpProblem p = b.build();
  Vector x(2);
  x << -1.0, 0.0;
  try {
    p.constraints(x);
    FAIL("expected NonFiniteEvaluation");
  } catch (const NonFiniteEvaluation& e) {
    CHECK(e.label() == "bound:root@3");
  }
}

TEST_CASE("layout lookups") {
  VariableLayout l = two_vars();
  l.horizon = 3;
  CHECK(l.n_vars() == 6);
  CHECK(l.index(2, "x2") == 5);
  CHECK_THROWS_AS(l.local("nope"), std::out_of_range);
}
