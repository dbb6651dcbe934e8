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

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

#include "crisp/nlp.hpp"

namespace crisp {

ScalarFunction::ScalarFunction(std::vector<int> deps, Eval eval) : eval_(std::move(eval)) {
  if (!eval_) throw std::invalid_argument("ScalarFunction: empty evaluator");
  if (static_cast<int>(deps.size()) > kMaxDeps)
    throw std::invalid_argument("ScalarFunction: too many dependencies");
  for (int d : deps)
    if (d < 0) throw std::invalid_argument("ScalarFunction: negative variable index");

  if (std::is_sorted(deps.begin(), deps.end()) &&
      std::adjacent_find(deps.begin(), deps.end()) == deps.end()) {
    deps_ = std::move(deps);
    return;
  }

  // Unsorted input: sort and permute the gradient on the way out.
  std::vector<int> order(deps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return deps[a] < deps[b]; });
  std::vector<int> sorted(deps.size());
  for (size_t k = 0; k < order.size(); ++k) sorted[k] = deps[order[k]];
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("ScalarFunction: duplicate dependency");
  // slot[k] = position in sorted order of original dependency k
  std::vector<int> slot(deps.size());
  for (size_t k = 0; k < order.size(); ++k) slot[order[k]] = static_cast<int>(k);

  deps_ = std::move(sorted);
  eval_ = [inner = std::move(eval_), slot = std::move(slot)](const double* x, double* g) {
    if (!g) return inner(x, nullptr);
    std::array<double, kMaxDeps> buf{};
    const double v = inner(x, buf.data());
    for (size_t k = 0; k < slot.size(); ++k) g[slot[k]] = buf[k];
    return v;
  };
}

ScalarFunction ScalarFunction::constant(double c) {
  return ScalarFunction({}, [c](const double*, double*) { return c; });
}

ScalarFunction ScalarFunction::variable(int index, double scale) {
  return ScalarFunction({index}, [index, scale](const double* x, double* g) {
    if (g) g[0] = scale;
    return scale * x[index];
  });
}

ScalarFunction ScalarFunction::affine(std::vector<std::pair<int, double>> terms, double offset) {
  std::sort(terms.begin(), terms.end());
  // merge repeated indices
  std::vector<std::pair<int, double>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  std::vector<int> deps;
  std::vector<double> coeffs;
  for (const auto& [i, a] : merged) {
    deps.push_back(i);
    coeffs.push_back(a);
  }
  return ScalarFunction(deps, [deps, coeffs, offset](const double* x, double* g) {
    double v = offset;
    for (size_t k = 0; k < deps.size(); ++k) {
      v += coeffs[k] * x[deps[k]];
      if (g) g[k] = coeffs[k];
    }
    return v;
  });
}

namespace {

struct Merge {
  std::vector<int> deps;
  std::vector<int> a_slot;  // position in merged deps of each a-dependency
  std::vector<int> b_slot;
};

Merge merge_deps(const std::vector<int>& a, const std::vector<int>& b) {
  Merge m;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m.deps));
  if (static_cast<int>(m.deps.size()) > ScalarFunction::kMaxDeps)
    throw std::invalid_argument("ScalarFunction: product has too many dependencies");
  auto slot_of = [&](int idx) {
    return static_cast<int>(std::lower_bound(m.deps.begin(), m.deps.end(), idx) - m.deps.begin());
  };
  for (int d : a) m.a_slot.push_back(slot_of(d));
  for (int d : b) m.b_slot.push_back(slot_of(d));
  return m;
}

}  // namespace

ScalarFunction ScalarFunction::product(const ScalarFunction& a, const ScalarFunction& b,
                                       double scale) {
  Merge m = merge_deps(a.deps(), b.deps());
  auto deps = m.deps;
  return ScalarFunction(std::move(deps), [a, b, scale, m = std::move(m)](const double* x, double* g) {
    if (!g) return scale * a(x) * b(x);
    std::array<double, kMaxDeps> ga{};
    std::array<double, kMaxDeps> gb{};
    const double va = a(x, ga.data());
    const double vb = b(x, gb.data());
    std::fill(g, g + m.deps.size(), 0.0);
    for (size_t k = 0; k < m.a_slot.size(); ++k) g[m.a_slot[k]] += scale * vb * ga[k];
    for (size_t k = 0; k < m.b_slot.size(); ++k) g[m.b_slot[k]] += scale * va * gb[k];
    return scale * va * vb;
  });
}

ScalarFunction ScalarFunction::square(const ScalarFunction& a, double scale) {
  return ScalarFunction(a.deps(), [a, scale](const double* x, double* g) {
    const double v = a(x, g);
    if (g)
      for (int k = 0; k < a.nnz(); ++k) g[k] *= 2.0 * scale * v;
    return scale * v * v;
  });
}

ScalarFunction ScalarFunction::scaled(const ScalarFunction& a, double scale) {
  return ScalarFunction(a.deps(), [a, scale](const double* x, double* g) {
    const double v = a(x, g);
    if (g)
      for (int k = 0; k < a.nnz(); ++k) g[k] *= scale;
    return scale * v;
  });
}

std::string_view to_string(RowCategory c) {
  switch (c) {
    case RowCategory::Dynamics: return "dynamics";
    case RowCategory::Complementarity: return "complementarity";
    case RowCategory::Bound: return "bound";
    case RowCategory::InitialCondition: return "initial-condition";
    case RowCategory::Other: return "other";
  }
  return "other";
}

std::string RowLabel::str() const {
  std::string s(to_string(category));
  s += ':';
  s += name;
  if (step >= 0) s += '@' + std::to_string(step);
  return s;
}

int VariableLayout::local(std::string_view name) const {
  for (size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<int>(j);
  throw std::out_of_range("VariableLayout: unknown variable '" + std::string(name) + "'");
}

std::vector<std::string> VariableLayout::names_of(VarKind kind) const {
  std::vector<std::string> out;
  for (size_t j = 0; j < names.size(); ++j)
    if (kinds[j] == kind) out.push_back(names[j]);
  return out;
}

}  // namespace crisp
