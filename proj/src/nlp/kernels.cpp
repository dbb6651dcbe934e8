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

// Row evaluation kernels. Each row writes to disjoint output slots, so the
// OpenMP loops are race-free and produce the same bits as the serial loops.

#include <cmath>
#include <stdexcept>

#include "crisp/nlp.hpp"

namespace crisp {

void RowSet::push_back(ScalarFunction f, RowLabel label) {
  if (!f.valid()) throw std::invalid_argument("RowSet: invalid function for " + label.str());
  offsets.push_back(offsets.back() + f.nnz());
  functions.push_back(std::move(f));
  labels.push_back(std::move(label));
}

namespace {

void scan_values(const RowSet& rows, const Vector& values) {
  for (int i = 0; i < rows.size(); ++i)
    if (!std::isfinite(values[i])) throw NonFiniteEvaluation(rows.labels[i].str(), "value");
}

void scan_jacobian(const RowSet& rows, std::span<const double> jac) {
  for (int i = 0; i < rows.size(); ++i)
    for (int k = rows.offsets[i]; k < rows.offsets[i + 1]; ++k)
      if (!std::isfinite(jac[k])) throw NonFiniteEvaluation(rows.labels[i].str(), "jacobian");
}

}  // namespace

void evaluate_rows(const RowSet& rows, const Vector& x, Vector& values, Exec exec) {
  const int m = rows.size();
  values.resize(m);
  const double* xp = x.data();
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) values[i] = rows.functions[i](xp, nullptr);
  } else {
    for (int i = 0; i < m; ++i) values[i] = rows.functions[i](xp, nullptr);
  }
  scan_values(rows, values);
}

void evaluate_rows_with_gradients(const RowSet& rows, const Vector& x, Vector& values,
                                  std::span<double> jac_values, Exec exec) {
  const int m = rows.size();
  if (static_cast<int>(jac_values.size()) != rows.nnz())
    throw std::invalid_argument("evaluate_rows_with_gradients: jacobian buffer size mismatch");
  values.resize(m);
  const double* xp = x.data();
  double* jp = jac_values.data();
  const int* off = rows.offsets.data();
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) values[i] = rows.functions[i](xp, jp + off[i]);
  } else {
    for (int i = 0; i < m; ++i) values[i] = rows.functions[i](xp, jp + off[i]);
  }
  scan_values(rows, values);
  scan_jacobian(rows, jac_values);
}

}  // namespace crisp
