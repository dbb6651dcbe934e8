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

#include "crisp/registry.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace crisp {

namespace {

void flatten(const YAML::Node& node, const std::string& prefix, ParamMap& out) {
  auto as_number = [&](const YAML::Node& leaf, const std::string& key) {
    try {
      return leaf.as<double>();
    } catch (const YAML::Exception&) {
      throw SpecError("parameter '" + key + "' is not a number");
    }
  };
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.IsSequence()) {
    std::vector<double> values;
    for (const auto& item : node) {
      if (!item.IsScalar()) throw SpecError("parameter '" + prefix + "' must be a flat list");
      values.push_back(as_number(item, prefix));
    }
    out[prefix] = std::move(values);
  } else if (node.IsScalar()) {
    out[prefix] = {as_number(node, prefix)};
  } else if (!node.IsNull() || !prefix.empty()) {
    throw SpecError("parameter '" + prefix + "' has no value");
  }
}

/// Shortest text that reads back to the same double.
std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class Spec, class Build>
ProblemEntry entry(std::string name, std::string description, Build build) {
  return {std::move(name), std::move(description),
          [build](const ParamMap& params, ProductMode mode) {
            return build(spec_from_params<Spec>(params), mode);
          },
          [] { return params_from_spec(Spec{}); }};
}

}  // namespace

ParamMap parse_params(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw SpecError(std::string("malformed parameter file: ") + e.what());
  }
  if (!root.IsNull() && !root.IsMap()) throw SpecError("parameter file must be a mapping");
  ParamMap out;
  flatten(root, "", out);
  return out;
}

ParamMap load_param_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw SpecError("cannot open parameter file '" + path + "'");
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
  std::fclose(f);
  try {
    return parse_params(text);
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string dump_params(const ParamMap& params) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  std::vector<std::string> open;  // currently open nested groups
  for (const auto& [key, values] : params) {
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    const std::vector<std::string> groups(parts.begin(), parts.end() - 1);
    std::size_t common = 0;
    while (common < open.size() && common < groups.size() && open[common] == groups[common]) ++common;
    while (open.size() > common) {
      out << YAML::EndMap;
      open.pop_back();
    }
    for (std::size_t i = common; i < groups.size(); ++i) {
      out << YAML::Key << groups[i] << YAML::Value << YAML::BeginMap;
      open.push_back(groups[i]);
    }
    out << YAML::Key << parts.back() << YAML::Value;
    if (values.size() == 1) {
      out << format_number(values.front());
    } else {
      out << YAML::Flow << YAML::BeginSeq;
      for (double v : values) out << format_number(v);
      out << YAML::EndSeq;
    }
  }
  while (!open.empty()) {
    out << YAML::EndMap;
    open.pop_back();
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void set_param(ParamMap& params, const std::string& key, const std::string& value) {
  if (key.empty()) throw SpecError("empty parameter key");
  const ParamMap parsed = parse_params("v: " + value);
  params[key] = parsed.at("v");
}

const std::vector<ProblemEntry>& problem_registry() {
  static const std::vector<ProblemEntry> registry{
      entry<ToySpec>("toy_mpcc", "two-variable MPCC with its optimum at the origin",
                     [](const ToySpec& s, ProductMode m) { return toy_mpcc(s, m); }),
      {"cq_fail", "two cubic inequalities whose gradients are parallel at the optimum",
       [](const ParamMap& params, ProductMode) {
         ToySpec defaults{{1.0, 0.5}};
         std::set<std::string> used;
         defaults.visit(detail::ParamReader{params, used});
         for (const auto& [key, value] : params)
           if (!used.count(key)) throw SpecError("unknown parameter '" + key + "'");
         return cq_fail_toy(defaults);
       },
       [] { return params_from_spec(ToySpec{{1.0, 0.5}}); }},
      entry<CartpoleSpec>("cartpole", "cartpole balanced between two soft walls",
                          [](const CartpoleSpec& s, ProductMode m) { return cartpole_softwalls(s, m); }),
      entry<PushBoxSpec>("push_box", "quasi-static planar pushing of a rectangular box",
                         [](const PushBoxSpec& s, ProductMode m) { return push_box(s, m); }),
      entry<TransportSpec>("transport", "payload carried on a cart through friction",
                           [](const TransportSpec& s, ProductMode m) { return transport(s, m); }),
      entry<PushTSpec>("push_t", "quasi-static planar pushing of a T-shaped block",
                       [](const PushTSpec& s, ProductMode m) { return push_t(s, m); }),
      entry<HopperSpec>("hopper", "planar point-mass hopper with a compressible leg",
                        [](const HopperSpec& s, ProductMode m) { return hopper(s, m); }),
      entry<WaiterSpec>("waiter", "plate pulled off a table by a frictional pusher",
                        [](const WaiterSpec& s, ProductMode m) { return waiter(s, m); }),
  };
  return registry;
}

const ProblemEntry& find_problem(std::string_view name) {
  std::string known;
  for (const auto& e : problem_registry()) {
    if (e.name == name) return e;
    known += (known.empty() ? "" : ", ") + e.name;
  }
  throw std::invalid_argument("unknown problem '" + std::string(name) + "' (known: " + known + ")");
}

std::string default_param_path(std::string_view name) {
  return std::string(CRISP_CONFIG_DIR) + "/problems/" + std::string(name) + ".yaml";
}

}  // namespace crisp
