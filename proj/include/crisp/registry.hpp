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

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crisp/problems.hpp"

namespace crisp {

/// Flattened parameter file: dotted key -> one or more numbers.
using ParamMap = std::map<std::string, std::vector<double>>;

/// Reads a nested YAML mapping of numbers and number lists. Throws SpecError
/// on unreadable files, malformed YAML or non-numeric leaves.
ParamMap load_param_file(const std::string& path);
ParamMap parse_params(const std::string& yaml_text);
/// Serializes as nested YAML, grouping dotted keys into mappings.
std::string dump_params(const ParamMap& params);
/// `value` is a number or a bracketed list "[1, 2, 3]". Throws SpecError.
void set_param(ParamMap& params, const std::string& key, const std::string& value);

namespace detail {

struct ParamReader {
  const ParamMap& params;
  std::set<std::string>& used;

  const std::vector<double>* find(const char* key) const {
    auto it = params.find(key);
    if (it == params.end()) return nullptr;
    used.insert(key);
    return &it->second;
  }
  void operator()(const char* key, double& v) const {
    if (const auto* p = find(key)) {
      if (p->size() != 1) throw SpecError(std::string("parameter '") + key + "' must be a scalar");
      v = p->front();
    }
  }
  void operator()(const char* key, int& v) const {
    if (const auto* p = find(key)) {
      if (p->size() != 1 || std::floor(p->front()) != p->front())
        throw SpecError(std::string("parameter '") + key + "' must be an integer");
      v = static_cast<int>(p->front());
    }
  }
  void operator()(const char* key, std::vector<double>& v) const {
    if (const auto* p = find(key)) v = *p;
  }
};

struct ParamWriter {
  ParamMap& params;
  void operator()(const char* key, double v) const { params[key] = {v}; }
  void operator()(const char* key, int v) const { params[key] = {static_cast<double>(v)}; }
  void operator()(const char* key, const std::vector<double>& v) const { params[key] = v; }
};

}  // namespace detail

/// Defaults overridden by `params`; unknown keys and invalid values throw
/// SpecError.
template <class Spec>
Spec spec_from_params(const ParamMap& params) {
  Spec spec;
  std::set<std::string> used;
  spec.visit(detail::ParamReader{params, used});
  for (const auto& [key, value] : params)
    if (!used.count(key)) throw SpecError("unknown parameter '" + key + "'");
  spec.validate();
  return spec;
}

template <class Spec>
ParamMap params_from_spec(Spec spec) {
  ParamMap out;
  spec.visit(detail::ParamWriter{out});
  return out;
}

struct ProblemEntry {
  std::string name;
  std::string description;
  std::function<TrajectoryProblem(const ParamMap&, ProductMode)> build;
  std::function<ParamMap()> defaults;
};

const std::vector<ProblemEntry>& problem_registry();
/// Throws std::invalid_argument listing the known names.
const ProblemEntry& find_problem(std::string_view name);

/// Shipped parameter file for a problem (config/problems/<name>.yaml).
std::string default_param_path(std::string_view name);

}  // namespace crisp
