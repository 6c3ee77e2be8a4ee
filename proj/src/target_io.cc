// Copyright 2026 The patfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "patfuzz/target_io.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace patfuzz {
namespace {

using Json = nlohmann::json;

std::optional<NodeKind> ParseNodeKind(std::string_view s) {
  for (NodeKind k : {NodeKind::kExit, NodeKind::kThreshold, NodeKind::kEquals,
                     NodeKind::kSwitch, NodeKind::kLoop,
                     NodeKind::kCorruption}) {
    if (NodeKindName(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<TriggerKind> ParseTriggerKind(std::string_view s) {
  for (TriggerKind k :
       {TriggerKind::kEdgeSubset, TriggerKind::kEdgeAbsent,
        TriggerKind::kCountThreshold, TriggerKind::kOrderSensitive}) {
    if (TriggerKindName(k) == s) return k;
  }
  return std::nullopt;
}

Json ToJson(const SyntheticTarget &t) {
  Json j;
  j["format"] = kTargetFormatName;
  j["version"] = kTargetFormatVersion;
  j["name"] = t.name;
  j["generator"] = t.generator;
  j["map_size"] = t.map_size;
  j["step_cap"] = t.step_cap;
  j["input_size"] = t.input_size;
  j["cost"] = {{"base", t.cost.base}, {"per_edge", t.cost.per_edge}};
  Json slow = Json::object();
  for (BugClass c : kAllBugClasses) {
    slow[std::string(BugClassName(c))] = t.slowdowns.percent(c);
  }
  j["slowdown_percent"] = slow;
  Json nodes = Json::array();
  for (const Node &n : t.nodes) {
    Json jn = {{"kind", NodeKindName(n.kind)}, {"out", n.out}};
    switch (n.kind) {
      case NodeKind::kThreshold:
      case NodeKind::kEquals:
        jn["operand"] = n.operand;
        [[fallthrough]];
      case NodeKind::kSwitch:
        jn["offset"] = n.input_offset;
        break;
      case NodeKind::kLoop:
        jn["offset"] = n.input_offset;
        jn["max_iterations"] = n.max_iterations;
        jn["body"] = n.body;
        if (n.body.size() > 1) jn["selector_offset"] = n.selector_offset;
        break;
      case NodeKind::kCorruption:
        jn["body"] = n.body;
        break;
      case NodeKind::kExit:
        break;
    }
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const Edge &e : t.edges) edges.push_back({e.src, e.dst, e.map_index});
  j["edges"] = std::move(edges);
  j["corruption_node"] =
      t.corruption_node ? Json(*t.corruption_node) : Json(nullptr);
  Json bugs = Json::array();
  for (const BugSpec &b : t.bugs) {
    Json tr = {{"kind", TriggerKindName(b.trigger.kind)},
               {"edges", b.trigger.edges}};
    switch (b.trigger.kind) {
      case TriggerKind::kEdgeSubset:
        break;
      case TriggerKind::kEdgeAbsent:
        tr["absent"] = b.trigger.absent;
        break;
      case TriggerKind::kCountThreshold:
        tr["edge"] = b.trigger.edge;
        tr["min_count"] = b.trigger.min_count;
        break;
      case TriggerKind::kOrderSensitive:
        tr["edge"] = b.trigger.edge;
        tr["second"] = b.trigger.second;
        break;
    }
    bugs.push_back({{"id", b.id},
                    {"detectability",
                     b.native ? std::string("native") : "sanitizer"},
                    {"class", BugClassName(b.sanitizer_class)},
                    {"diverts", b.diverts},
                    {"trigger", std::move(tr)}});
  }
  j["bugs"] = std::move(bugs);
  Json witnesses = Json::array();
  for (const Witness &w : t.witnesses) {
    witnesses.push_back({{"bug", w.bug}, {"input_hex", HexEncode(w.input)}});
  }
  j["witnesses"] = std::move(witnesses);
  return j;
}

template <typename T>
T Get(const Json &j, const char *key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

absl::StatusOr<SyntheticTarget> FromJson(const Json &j) {
  if (Get<std::string>(j, "format", "") != kTargetFormatName) {
    return absl::InvalidArgumentError("not a patfuzz target file");
  }
  const int version = Get<int>(j, "version", 0);
  if (version != kTargetFormatVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported target format version ", version));
  }
  SyntheticTarget t;
  t.name = Get<std::string>(j, "name", "");
  t.generator = Get<std::string>(j, "generator", "");
  t.map_size = j.at("map_size").get<size_t>();
  t.step_cap = Get<uint32_t>(j, "step_cap", kDefaultStepCap);
  t.input_size = Get<uint32_t>(j, "input_size", 0);
  if (j.contains("cost")) {
    t.cost.base = j["cost"].at("base").get<uint32_t>();
    t.cost.per_edge = j["cost"].at("per_edge").get<uint32_t>();
  }
  if (j.contains("slowdown_percent")) {
    for (const auto &[name, value] : j["slowdown_percent"].items()) {
      const auto cls = ParseBugClass(name);
      if (!cls) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown bug class '", name, "'"));
      }
      if (auto s = t.slowdowns.Set(*cls, value.get<uint32_t>()); !s.ok()) {
        return s;
      }
    }
  }
  for (const Json &jn : j.at("nodes")) {
    Node n;
    const std::string kind = jn.at("kind").get<std::string>();
    const auto k = ParseNodeKind(kind);
    if (!k) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown node kind '", kind, "'"));
    }
    n.kind = *k;
    n.input_offset = Get<uint32_t>(jn, "offset", 0);
    n.operand = Get<uint8_t>(jn, "operand", 0);
    n.out = Get<std::vector<EdgeId>>(jn, "out", {});
    n.body = Get<std::vector<EdgeId>>(jn, "body", {});
    n.max_iterations = Get<uint8_t>(jn, "max_iterations", 0);
    n.selector_offset = Get<uint32_t>(jn, "selector_offset", 0);
    t.nodes.push_back(std::move(n));
  }
  for (const Json &je : j.at("edges")) {
    if (!je.is_array() || je.size() != 3) {
      return absl::InvalidArgumentError("edge must be [src, dst, map_index]");
    }
    t.edges.push_back(Edge{je[0].get<NodeId>(), je[1].get<NodeId>(),
                           je[2].get<uint32_t>()});
  }
  if (j.contains("corruption_node") && !j["corruption_node"].is_null()) {
    t.corruption_node = j["corruption_node"].get<NodeId>();
  }
  for (const Json &jb : j.at("bugs")) {
    BugSpec b;
    b.id = jb.at("id").get<BugId>();
    const std::string det = jb.at("detectability").get<std::string>();
    if (det != "native" && det != "sanitizer") {
      return absl::InvalidArgumentError(
          absl::StrCat("bug ", b.id, ": bad detectability '", det, "'"));
    }
    b.native = det == "native";
    const std::string cls = jb.at("class").get<std::string>();
    const auto c = ParseBugClass(cls);
    if (!c) {
      return absl::InvalidArgumentError(
          absl::StrCat("bug ", b.id, ": unknown class '", cls, "'"));
    }
    b.sanitizer_class = *c;
    b.diverts = Get<bool>(jb, "diverts", false);
    const Json &jt = jb.at("trigger");
    const std::string tk = jt.at("kind").get<std::string>();
    const auto kind = ParseTriggerKind(tk);
    if (!kind) {
      return absl::InvalidArgumentError(
          absl::StrCat("bug ", b.id, ": unknown trigger kind '", tk, "'"));
    }
    b.trigger.kind = *kind;
    b.trigger.edges = Get<std::vector<EdgeId>>(jt, "edges", {});
    b.trigger.absent = Get<std::vector<EdgeId>>(jt, "absent", {});
    b.trigger.edge = Get<EdgeId>(jt, "edge", 0);
    b.trigger.second = Get<EdgeId>(jt, "second", 0);
    b.trigger.min_count = Get<uint32_t>(jt, "min_count", 0);
    t.bugs.push_back(std::move(b));
  }
  if (j.contains("witnesses")) {
    for (const Json &jw : j["witnesses"]) {
      Witness w;
      w.bug = jw.at("bug").get<BugId>();
      if (!HexDecode(jw.at("input_hex").get<std::string>(), w.input)) {
        return absl::InvalidArgumentError(
            absl::StrCat("witness for bug ", w.bug, ": bad hex"));
      }
      t.witnesses.push_back(std::move(w));
    }
  }
  if (auto s = ValidateTarget(t); !s.ok()) return s;
  return t;
}

}  // namespace

std::string SerializeTarget(const SyntheticTarget &target) {
  return ToJson(target).dump(1) + "\n";
}

absl::StatusOr<SyntheticTarget> ParseTarget(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
    return FromJson(j);
  } catch (const Json::exception &e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed target: ", e.what()));
  }
}

absl::Status SaveTarget(const SyntheticTarget &target,
                        const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << SerializeTarget(target);
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<SyntheticTarget> LoadTarget(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  auto t = ParseTarget(ss.str());
  if (!t.ok()) {
    return absl::Status(t.status().code(),
                        absl::StrCat(path, ": ", t.status().message()));
  }
  return t;
}

}  // namespace patfuzz
