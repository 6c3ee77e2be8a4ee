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

#include "patfuzz/synthetic_target.h"

#include <algorithm>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"

#define XXH_INLINE_ALL
#include "xxhash.h"

namespace patfuzz {

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kExit:
      return "exit";
    case NodeKind::kThreshold:
      return "threshold";
    case NodeKind::kEquals:
      return "equals";
    case NodeKind::kSwitch:
      return "switch";
    case NodeKind::kLoop:
      return "loop";
    case NodeKind::kCorruption:
      return "corruption";
  }
  return "unknown";
}

std::string_view TriggerKindName(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::kEdgeSubset:
      return "edge_subset";
    case TriggerKind::kEdgeAbsent:
      return "edge_absent";
    case TriggerKind::kCountThreshold:
      return "count_threshold";
    case TriggerKind::kOrderSensitive:
      return "order_sensitive";
  }
  return "unknown";
}

const BugSpec *SyntheticTarget::FindBug(BugId id) const {
  for (const BugSpec &bug : bugs) {
    if (bug.id == id) return &bug;
  }
  return nullptr;
}

namespace {

absl::Status NodeError(NodeId id, std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("node ", id, ": ", std::string(what)));
}

absl::Status CheckArity(const Node &node, NodeId id) {
  const size_t out = node.out.size();
  const size_t body = node.body.size();
  switch (node.kind) {
    case NodeKind::kExit:
      if (out != 0 || body != 0) return NodeError(id, "exit has edges");
      break;
    case NodeKind::kThreshold:
    case NodeKind::kEquals:
      if (out != 2 || body != 0) return NodeError(id, "needs 2 out edges");
      break;
    case NodeKind::kSwitch:
      if (out < 2 || body != 0) return NodeError(id, "needs >= 2 out edges");
      break;
    case NodeKind::kLoop:
      if (out != 1 || body < 1) {
        return NodeError(id, "loop needs 1 exit edge and >= 1 body edge");
      }
      break;
    case NodeKind::kCorruption:
      if (out != 1 || body > 64) {
        return NodeError(id,
                         "corruption needs 1 fallthrough and <= 64 detours");
      }
      break;
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateTarget(const SyntheticTarget &t) {
  if (auto s = ValidateMapSize(t.map_size); !s.ok()) return s;
  if (t.step_cap == 0) return absl::InvalidArgumentError("step_cap is 0");
  if (t.nodes.empty()) return absl::InvalidArgumentError("no nodes");
  if (t.nodes[0].kind == NodeKind::kCorruption) {
    return absl::InvalidArgumentError("entry node cannot be corruption");
  }
  const size_t num_nodes = t.nodes.size();
  const size_t num_edges = t.edges.size();
  for (size_t e = 0; e < num_edges; ++e) {
    const Edge &edge = t.edges[e];
    if (edge.src >= num_nodes || edge.dst >= num_nodes) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge ", e, " references a missing node"));
    }
    if (edge.map_index >= t.map_size) {
      return absl::InvalidArgumentError(absl::StrCat(
          "edge ", e, " map index ", edge.map_index, " >= map_size"));
    }
  }
  std::vector<int> owners(num_edges, 0);
  for (NodeId id = 0; id < num_nodes; ++id) {
    const Node &node = t.nodes[id];
    if (auto s = CheckArity(node, id); !s.ok()) return s;
    const bool corruption = node.kind == NodeKind::kCorruption;
    if (corruption && (!t.corruption_node || *t.corruption_node != id)) {
      return NodeError(id, "corruption node is not registered");
    }
    for (EdgeId e : node.out) {
      if (e >= num_edges) return NodeError(id, "out edge out of range");
      const Edge &edge = t.edges[e];
      if (edge.src != id) return NodeError(id, "out edge has wrong source");
      if (corruption ? edge.dst != id : edge.dst <= id) {
        return NodeError(id, "out edge must point forward");
      }
      if (t.nodes[edge.dst].kind == NodeKind::kCorruption && !corruption) {
        return NodeError(id, "edge into the corruption node");
      }
      ++owners[e];
    }
    for (EdgeId e : node.body) {
      if (e >= num_edges) return NodeError(id, "body edge out of range");
      const Edge &edge = t.edges[e];
      if (edge.src != id || edge.dst != id) {
        return NodeError(id, "body edges must be self edges");
      }
      ++owners[e];
    }
  }
  for (size_t e = 0; e < num_edges; ++e) {
    if (owners[e] != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge ", e, " is owned by ", owners[e], " nodes"));
    }
  }
  if (t.corruption_node &&
      (*t.corruption_node >= num_nodes ||
       t.nodes[*t.corruption_node].kind != NodeKind::kCorruption)) {
    return absl::InvalidArgumentError("corruption_node is not a corruption");
  }
  absl::flat_hash_set<BugId> ids;
  for (const BugSpec &bug : t.bugs) {
    if (!ids.insert(bug.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate bug id ", bug.id));
    }
    const Trigger &tr = bug.trigger;
    auto bad = [&](EdgeId e) { return e >= num_edges; };
    if (std::any_of(tr.edges.begin(), tr.edges.end(), bad) ||
        std::any_of(tr.absent.begin(), tr.absent.end(), bad)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bug ", bug.id, " references a nonexistent edge"));
    }
    switch (tr.kind) {
      case TriggerKind::kEdgeSubset:
        if (tr.edges.empty()) {
          return absl::InvalidArgumentError(
              absl::StrCat("bug ", bug.id, " has an empty edge set"));
        }
        break;
      case TriggerKind::kEdgeAbsent:
        if (tr.edges.empty() || tr.absent.empty()) {
          return absl::InvalidArgumentError(absl::StrCat(
              "bug ", bug.id, " needs present and absent edge sets"));
        }
        break;
      case TriggerKind::kCountThreshold:
        if (bad(tr.edge) || tr.min_count == 0) {
          return absl::InvalidArgumentError(absl::StrCat(
              "bug ", bug.id, " needs an existing edge and min_count >= 1"));
        }
        break;
      case TriggerKind::kOrderSensitive:
        if (bad(tr.edge) || bad(tr.second) || tr.edge == tr.second) {
          return absl::InvalidArgumentError(absl::StrCat(
              "bug ", bug.id, " needs two distinct existing edges"));
        }
        break;
    }
  }
  if (!std::is_sorted(t.bugs.begin(), t.bugs.end(),
                      [](const BugSpec &a, const BugSpec &b) {
                        return a.id < b.id;
                      })) {
    return absl::InvalidArgumentError("bugs must be sorted by id");
  }
  for (const Witness &w : t.witnesses) {
    if (!ids.contains(w.bug)) {
      return absl::InvalidArgumentError(
          absl::StrCat("witness for unknown bug ", w.bug));
    }
  }
  return absl::OkStatus();
}

namespace {

// Per-thread edge bookkeeping. Only touched entries are reset between runs.
struct RunScratch {
  std::vector<uint32_t> count;
  std::vector<uint32_t> first;  // 1-based step of first visit; 0 = never.
  std::vector<EdgeId> touched;

  void Reset(size_t num_edges) {
    if (count.size() < num_edges) {
      count.assign(num_edges, 0);
      first.assign(num_edges, 0);
      touched.clear();
      return;
    }
    for (EdgeId e : touched) {
      count[e] = 0;
      first[e] = 0;
    }
    touched.clear();
  }
};

RunScratch &Scratch() {
  thread_local RunScratch scratch;
  return scratch;
}

bool AllVisited(const std::vector<EdgeId> &edges, const RunScratch &s) {
  for (EdgeId e : edges) {
    if (s.count[e] == 0) return false;
  }
  return true;
}

bool Fires(const Trigger &tr, const RunScratch &s) {
  if (!AllVisited(tr.edges, s)) return false;
  switch (tr.kind) {
    case TriggerKind::kEdgeSubset:
      return true;
    case TriggerKind::kEdgeAbsent:
      for (EdgeId e : tr.absent) {
        if (s.count[e] != 0) return false;
      }
      return true;
    case TriggerKind::kCountThreshold:
      return s.count[tr.edge] >= tr.min_count;
    case TriggerKind::kOrderSensitive:
      return s.first[tr.edge] != 0 && s.first[tr.second] != 0 &&
             s.first[tr.edge] < s.first[tr.second];
  }
  return false;
}

inline uint8_t ByteAt(ByteSpan input, size_t offset) {
  return offset < input.size() ? input[offset] : 0;
}

constexpr uint64_t kCorruptionSeed = 0x5eedc0a5u;

}  // namespace

TargetRun RunTarget(const SyntheticTarget &target, ByteSpan input,
                    Bitmap *bitmap, std::vector<EdgeId> *trace) {
  RunScratch &s = Scratch();
  s.Reset(target.edges.size());
  if (bitmap != nullptr) bitmap->Clear();

  TargetRun run;
  auto take = [&](EdgeId e) {
    ++run.steps;
    if (s.count[e]++ == 0) {
      s.first[e] = run.steps;
      s.touched.push_back(e);
    }
    if (bitmap != nullptr) bitmap->Hit(target.edges[e].map_index);
    if (trace != nullptr) trace->push_back(e);
  };

  NodeId id = 0;
  while (true) {
    const Node &node = target.nodes[id];
    if (node.kind == NodeKind::kExit) break;
    const uint8_t b = ByteAt(input, node.input_offset);
    EdgeId next = 0;
    switch (node.kind) {
      case NodeKind::kThreshold:
        next = b < node.operand ? node.out[0] : node.out[1];
        break;
      case NodeKind::kEquals:
        next = b == node.operand ? node.out[1] : node.out[0];
        break;
      case NodeKind::kSwitch:
        next = node.out[b % node.out.size()];
        break;
      case NodeKind::kLoop: {
        const uint32_t iterations = b % (uint32_t{node.max_iterations} + 1);
        for (uint32_t j = 0; j < iterations; ++j) {
          if (run.steps >= target.step_cap) {
            run.timed_out = true;
            return run;
          }
          const size_t pick =
              node.body.size() == 1
                  ? 0
                  : ByteAt(input, node.selector_offset + j) % node.body.size();
          take(node.body[pick]);
        }
        next = node.out[0];
        break;
      }
      case NodeKind::kExit:
      case NodeKind::kCorruption:
        // Unreachable through forward edges; validated.
        return run;
    }
    if (run.steps >= target.step_cap) {
      run.timed_out = true;
      return run;
    }
    take(next);
    id = target.edges[next].dst;
  }

  BugId first_diverting = 0;
  bool diverts = false;
  for (const BugSpec &bug : target.bugs) {
    if (!Fires(bug.trigger, s)) continue;
    run.fired.push_back(bug.id);
    if (bug.diverts && !diverts) {
      diverts = true;
      first_diverting = bug.id;
    }
  }

  if (diverts && target.corruption_node) {
    const Node &node = target.nodes[*target.corruption_node];
    const uint64_t state = XXH64(input.data(), input.size(),
                                 kCorruptionSeed + first_diverting);
    for (size_t i = 0; i < node.body.size(); ++i) {
      take((state >> i) & 1 ? node.body[i] : node.out[0]);
    }
  }
  return run;
}

bool TriggerFires(const Trigger &trigger, std::span<const EdgeId> trace) {
  auto visited = [&](EdgeId e) {
    return std::find(trace.begin(), trace.end(), e) != trace.end();
  };
  for (EdgeId e : trigger.edges) {
    if (!visited(e)) return false;
  }
  switch (trigger.kind) {
    case TriggerKind::kEdgeSubset:
      return true;
    case TriggerKind::kEdgeAbsent:
      return std::none_of(trigger.absent.begin(), trigger.absent.end(),
                          visited);
    case TriggerKind::kCountThreshold:
      return static_cast<uint32_t>(
                 std::count(trace.begin(), trace.end(), trigger.edge)) >=
             trigger.min_count;
    case TriggerKind::kOrderSensitive: {
      const auto a = std::find(trace.begin(), trace.end(), trigger.edge);
      const auto b = std::find(trace.begin(), trace.end(), trigger.second);
      return a != trace.end() && b != trace.end() && a < b;
    }
  }
  return false;
}

CentiTicks NativeCost(const CostModel &cost, uint32_t steps) {
  return (CentiTicks{cost.base} + CentiTicks{cost.per_edge} * steps) *
         kCentiTicksPerTick;
}

ExecutionResult ExecuteNative(const SyntheticTarget &target, ByteSpan input,
                              Bitmap &bitmap, bool want_trace) {
  ExecutionResult result;
  const TargetRun run = RunTarget(target, input, &bitmap,
                                  want_trace ? &result.trace : nullptr);
  result.steps = run.steps;
  result.cost = NativeCost(target.cost, run.steps);
  if (run.timed_out) {
    result.status = ExecStatus::kTimeout;
    return result;
  }
  for (BugId id : run.fired) {
    const BugSpec *bug = target.FindBug(id);
    if (bug != nullptr && bug->native) {
      result.status = ExecStatus::kCrash;
      result.crash_id = id;
      break;
    }
  }
  return result;
}

SanitizerVerdict ExecuteSanitized(const SyntheticTarget &target,
                                  ByteSpan input, BugClassSet classes) {
  SanitizerVerdict verdict;
  const TargetRun run = RunTarget(target, input, nullptr, nullptr);
  verdict.cost =
      (CentiTicks{target.cost.base} + CentiTicks{target.cost.per_edge} *
                                          run.steps) *
      target.slowdowns.Combined(classes);
  if (run.timed_out) {
    verdict.outcome = VerdictOutcome::kTimeout;
    return verdict;
  }
  for (BugId id : run.fired) {
    const BugSpec *bug = target.FindBug(id);
    if (bug == nullptr) continue;
    if (bug->native || classes.Contains(bug->sanitizer_class)) {
      verdict.crash_ids.push_back(id);
    }
  }
  verdict.outcome = verdict.crash_ids.empty() ? VerdictOutcome::kClean
                                              : VerdictOutcome::kCrash;
  return verdict;
}

}  // namespace patfuzz
