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

#include "patfuzz/target_generator.h"

#include <algorithm>
#include <cstring>
#include <optional>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace patfuzz {

std::string GeneratorParams::ToString() const {
  std::vector<std::string> kinds;
  for (TriggerKind k : trigger_kinds) kinds.emplace_back(TriggerKindName(k));
  return absl::StrCat(
      "seed=", seed, " max_edges=", max_edges, " bugs=", min_bugs, "-",
      max_bugs, " kinds=", absl::StrJoin(kinds, ","),
      " native_percent=", native_percent,
      " corruption_detours=", corruption_detours, " map_size=", map_size,
      " step_cap=", step_cap, " cost=", cost.base, "+", cost.per_edge,
      "/edge alias=", alias_map_indices ? 1 : 0,
      " max_loop_iterations=", max_loop_iterations,
      " max_dispatch_iterations=", max_dispatch_iterations,
      " min_input_size=", min_input_size,
      " early_exit_percent=", early_exit_percent,
      " max_random_fire_ppm=", max_random_fire_ppm);
}

namespace {

uint32_t ComputeInputSize(const SyntheticTarget &t) {
  uint32_t size = 0;
  for (const Node &n : t.nodes) {
    if (n.kind == NodeKind::kExit || n.kind == NodeKind::kCorruption) continue;
    size = std::max(size, n.input_offset + 1);
    if (n.kind == NodeKind::kLoop && n.body.size() > 1) {
      size = std::max(size, n.selector_offset + n.max_iterations);
    }
  }
  return size;
}

uint8_t RandomByteExcept(Rng &rng, uint8_t avoid) {
  return static_cast<uint8_t>(avoid + 1 + rng.Below(255));
}

// Byte that makes a branch node take its out edge at position `pos`.
std::optional<uint8_t> ByteForOutcome(const Node &node, size_t pos, Rng &rng) {
  switch (node.kind) {
    case NodeKind::kThreshold:
      if (pos == 0) {
        if (node.operand == 0) return std::nullopt;
        return static_cast<uint8_t>(rng.Below(node.operand));
      }
      return static_cast<uint8_t>(rng.Between(node.operand, 255));
    case NodeKind::kEquals:
      return pos == 1 ? node.operand : RandomByteExcept(rng, node.operand);
    case NodeKind::kSwitch: {
      const size_t k = node.out.size();
      const uint64_t reps = (256 - pos + k - 1) / k;  // values v = pos + j*k
      return static_cast<uint8_t>(pos + k * rng.Below(reps));
    }
    default:
      return std::nullopt;
  }
}

size_t IndexOf(const std::vector<EdgeId> &v, EdgeId e) {
  return static_cast<size_t>(std::find(v.begin(), v.end(), e) - v.begin());
}

void Put(ByteArray &in, size_t offset, uint8_t value) {
  if (in.size() <= offset) in.resize(offset + 1, 0);
  in[offset] = value;
}

// Forces `node` to take body edge `e` at least `min_count` times (simple
// loop) or at least once (multi-body loop).
void ForceBody(const Node &node, EdgeId e, uint32_t min_count, ByteArray &in,
               Rng &rng) {
  const uint32_t max = node.max_iterations;
  if (node.body.size() == 1) {
    const uint32_t lo = std::max<uint32_t>(1, min_count);
    if (lo > max) return;
    Put(in, node.input_offset, static_cast<uint8_t>(rng.Between(lo, max)));
    return;
  }
  if (max == 0) return;
  const uint32_t count = in.size() > node.input_offset
                             ? in[node.input_offset] % (max + 1)
                             : 0;
  uint32_t iterations = count;
  if (iterations == 0) {
    iterations = static_cast<uint32_t>(rng.Between(1, max));
    Put(in, node.input_offset, static_cast<uint8_t>(iterations));
  }
  const size_t j = rng.Below(iterations);
  const size_t k = node.body.size();
  Put(in, node.selector_offset + j,
      static_cast<uint8_t>(IndexOf(node.body, e) + k * rng.Below(256 / k)));
}

void AvoidEdge(const SyntheticTarget &t, EdgeId e, ByteArray &in, Rng &rng) {
  const Node &node = t.nodes[t.edges[e].src];
  if (node.kind == NodeKind::kLoop) {
    if (node.body.size() == 1 || IndexOf(node.body, e) == node.body.size()) {
      Put(in, node.input_offset, 0);
      return;
    }
    const size_t k = node.body.size();
    const size_t bad = IndexOf(node.body, e);
    for (uint32_t j = 0; j < node.max_iterations; ++j) {
      const size_t pick = (bad + 1 + rng.Below(k - 1)) % k;
      Put(in, node.selector_offset + j, static_cast<uint8_t>(pick));
    }
    return;
  }
  const size_t pos = IndexOf(node.out, e);
  if (pos == node.out.size() || node.out.size() < 2) return;
  const size_t other = (pos + 1 + rng.Below(node.out.size() - 1)) %
                       node.out.size();
  if (auto b = ByteForOutcome(node, other, rng)) {
    Put(in, node.input_offset, *b);
  }
}

void ForceEdge(const SyntheticTarget &t, EdgeId e, uint32_t min_count,
               ByteArray &in, Rng &rng) {
  const Node &node = t.nodes[t.edges[e].src];
  if (node.kind == NodeKind::kLoop) {
    if (IndexOf(node.body, e) < node.body.size()) {
      ForceBody(node, e, min_count, in, rng);
    }
    return;
  }
  const size_t pos = IndexOf(node.out, e);
  if (pos == node.out.size()) return;
  if (auto b = ByteForOutcome(node, pos, rng)) {
    Put(in, node.input_offset, *b);
  }
}

void ApplyConstraints(const SyntheticTarget &t, const BugSpec &bug,
                      ByteArray &in, Rng &rng) {
  const Trigger &tr = bug.trigger;
  for (EdgeId e : tr.edges) ForceEdge(t, e, 1, in, rng);
  switch (tr.kind) {
    case TriggerKind::kEdgeSubset:
      break;
    case TriggerKind::kEdgeAbsent:
      for (EdgeId e : tr.absent) AvoidEdge(t, e, in, rng);
      break;
    case TriggerKind::kCountThreshold:
      ForceEdge(t, tr.edge, tr.min_count, in, rng);
      break;
    case TriggerKind::kOrderSensitive: {
      const Node &a = t.nodes[t.edges[tr.edge].src];
      const Node &b = t.nodes[t.edges[tr.second].src];
      if (&a == &b && a.kind == NodeKind::kLoop && a.body.size() > 1 &&
          a.max_iterations >= 2) {
        const size_t k = a.body.size();
        Put(in, a.input_offset,
            static_cast<uint8_t>(rng.Between(2, a.max_iterations)));
        Put(in, a.selector_offset, static_cast<uint8_t>(IndexOf(a.body, tr.edge)));
        Put(in, a.selector_offset + 1,
            static_cast<uint8_t>(IndexOf(a.body, tr.second) % k));
      } else {
        ForceEdge(t, tr.edge, 1, in, rng);
        ForceEdge(t, tr.second, 1, in, rng);
      }
      break;
    }
  }
}

bool FiresOn(const SyntheticTarget &single_bug_target, ByteSpan input) {
  const TargetRun run = RunTarget(single_bug_target, input, nullptr, nullptr);
  return !run.timed_out && !run.fired.empty();
}

SyntheticTarget WithOnlyBug(const SyntheticTarget &t, const BugSpec &bug) {
  SyntheticTarget copy;
  copy.nodes = t.nodes;
  copy.edges = t.edges;
  copy.map_size = t.map_size;
  copy.step_cap = t.step_cap;
  copy.input_size = t.input_size;
  copy.bugs = {bug};
  copy.bugs[0].diverts = false;
  return copy;
}

}  // namespace

ByteArray RandomWalkInput(const SyntheticTarget &t, Rng &rng) {
  ByteArray in(t.input_size, 0);
  for (const Node &node : t.nodes) {
    switch (node.kind) {
      case NodeKind::kExit:
      case NodeKind::kCorruption:
        break;
      case NodeKind::kThreshold:
      case NodeKind::kEquals:
      case NodeKind::kSwitch: {
        const size_t pos = rng.Below(node.out.size());
        const auto b = ByteForOutcome(node, pos, rng);
        Put(in, node.input_offset, b ? *b : rng.Byte());
        break;
      }
      case NodeKind::kLoop:
        Put(in, node.input_offset,
            static_cast<uint8_t>(rng.Between(0, node.max_iterations)));
        if (node.body.size() > 1) {
          for (uint32_t j = 0; j < node.max_iterations; ++j) {
            Put(in, node.selector_offset + j, rng.Byte());
          }
        }
        break;
    }
  }
  return in;
}

absl::StatusOr<ByteArray> SearchWitness(const SyntheticTarget &target,
                                        const BugSpec &bug, Rng &rng,
                                        uint32_t attempts) {
  const SyntheticTarget single = WithOnlyBug(target, bug);
  for (uint32_t i = 0; i < attempts; ++i) {
    ByteArray in = RandomWalkInput(single, rng);
    if (i % 2 == 0) ApplyConstraints(single, bug, in, rng);
    if (FiresOn(single, in)) return in;
  }
  return absl::NotFoundError(absl::StrCat("bug ", bug.id,
                                          " not reachable within ", attempts,
                                          " witness attempts"));
}

namespace {

struct NodePlan {
  NodeKind kind;
  uint32_t fanout;  // Out edges (branch) or body edges (loop).
};

// Rough probability that a uniformly random byte at the owning node takes
// `e`, given the node is reached.
double EdgeProbability(const SyntheticTarget &t, EdgeId e) {
  const Node &node = t.nodes[t.edges[e].src];
  switch (node.kind) {
    case NodeKind::kThreshold:
      return e == node.out[0] ? node.operand / 256.0
                              : (256 - node.operand) / 256.0;
    case NodeKind::kEquals:
      return e == node.out[1] ? 1 / 256.0 : 255 / 256.0;
    case NodeKind::kSwitch:
      return 1.0 / node.out.size();
    case NodeKind::kLoop:
      return e == node.out[0] ? 1.0 : 0.5;
    default:
      return 1.0;
  }
}

bool IsDecisionEdge(const SyntheticTarget &t, EdgeId e) {
  const Node &node = t.nodes[t.edges[e].src];
  if (node.kind == NodeKind::kCorruption || node.kind == NodeKind::kExit) {
    return false;
  }
  if (node.kind == NodeKind::kLoop) return e != node.out[0];
  return true;
}

struct Candidate {
  Trigger trigger;
  ByteArray witness;
};

// Picks `n` distinct-source edges from `pool`, the first among the rarest.
std::vector<EdgeId> PickEdges(const SyntheticTarget &t,
                              std::vector<EdgeId> pool, size_t n, Rng &rng) {
  std::vector<EdgeId> out;
  if (pool.empty()) return out;
  std::stable_sort(pool.begin(), pool.end(), [&](EdgeId a, EdgeId b) {
    return EdgeProbability(t, a) < EdgeProbability(t, b);
  });
  const size_t rare = std::max<size_t>(1, pool.size() / 3);
  out.push_back(pool[rng.Below(rare)]);
  absl::flat_hash_set<NodeId> srcs = {t.edges[out[0]].src};
  for (size_t tries = 0; out.size() < n && tries < 4 * pool.size(); ++tries) {
    const EdgeId e = pool[rng.Below(pool.size())];
    if (srcs.insert(t.edges[e].src).second) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Candidate> PickTrigger(const SyntheticTarget &t,
                                     TriggerKind kind,
                                     const std::vector<EdgeId> &trace,
                                     ByteArray witness, Rng &rng) {
  std::vector<EdgeId> visited;
  absl::flat_hash_set<EdgeId> seen;
  absl::flat_hash_set<NodeId> visited_nodes;
  for (EdgeId e : trace) {
    visited_nodes.insert(t.edges[e].src);
    if (seen.insert(e).second && IsDecisionEdge(t, e)) visited.push_back(e);
  }
  if (visited.empty()) return std::nullopt;

  Candidate c;
  c.trigger.kind = kind;
  switch (kind) {
    case TriggerKind::kEdgeSubset:
      c.trigger.edges = PickEdges(t, visited, rng.Between(2, 3), rng);
      break;
    case TriggerKind::kEdgeAbsent: {
      std::vector<EdgeId> siblings;
      for (NodeId n : visited_nodes) {
        const Node &node = t.nodes[n];
        if (node.kind == NodeKind::kLoop) continue;
        for (EdgeId e : node.out) {
          if (!seen.contains(e)) siblings.push_back(e);
        }
      }
      if (siblings.empty()) return std::nullopt;
      std::sort(siblings.begin(), siblings.end());
      c.trigger.edges = PickEdges(t, visited, rng.Between(1, 2), rng);
      c.trigger.absent = {siblings[rng.Below(siblings.size())]};
      break;
    }
    case TriggerKind::kCountThreshold: {
      std::vector<EdgeId> bodies;
      for (EdgeId e : visited) {
        const Node &node = t.nodes[t.edges[e].src];
        if (node.kind == NodeKind::kLoop && node.body.size() == 1 &&
            node.max_iterations >= 8) {
          bodies.push_back(e);
        }
      }
      if (bodies.empty()) return std::nullopt;
      const EdgeId body = bodies[rng.Below(bodies.size())];
      const Node &loop = t.nodes[t.edges[body].src];
      const uint32_t max = loop.max_iterations;
      const uint32_t k =
          static_cast<uint32_t>(rng.Between(std::max<uint32_t>(8, max * 3 / 4),
                                            max));
      c.trigger.edge = body;
      c.trigger.min_count = k;
      std::vector<EdgeId> context;
      for (EdgeId e : visited) {
        if (t.edges[e].src != t.edges[body].src) context.push_back(e);
      }
      c.trigger.edges = PickEdges(t, context, 1, rng);
      Put(witness, loop.input_offset, static_cast<uint8_t>(rng.Between(k, max)));
      break;
    }
    case TriggerKind::kOrderSensitive: {
      for (NodeId n : visited_nodes) {
        const Node &node = t.nodes[n];
        if (node.kind != NodeKind::kLoop || node.body.size() < 2) continue;
        std::vector<EdgeId> order;  // Body edges by first visit.
        for (EdgeId e : trace) {
          if (t.edges[e].src == n && e != node.out[0] &&
              std::find(order.begin(), order.end(), e) == order.end()) {
            order.push_back(e);
          }
        }
        if (order.size() < 2) continue;
        c.trigger.edge = order[0];
        c.trigger.second = order[1];
        std::vector<EdgeId> context;
        for (EdgeId e : visited) {
          if (t.edges[e].src != n) context.push_back(e);
        }
        c.trigger.edges = PickEdges(t, context, 1, rng);
        break;
      }
      if (c.trigger.edge == c.trigger.second) return std::nullopt;
      break;
    }
  }
  if (c.trigger.edges.empty() && kind != TriggerKind::kOrderSensitive &&
      kind != TriggerKind::kCountThreshold) {
    return std::nullopt;
  }
  c.witness = std::move(witness);
  return c;
}

// Firing rate per million over two input families: uniform bytes, and the
// all-zero input with a few bytes replaced, which is where a campaign
// seeded with zeros spends its time. Reports the worse of the two.
uint32_t RandomFirePpm(const SyntheticTarget &single, uint32_t samples,
                       Rng &rng) {
  if (samples == 0) return 0;
  ByteArray in(single.input_size, 0);
  if (FiresOn(single, in)) return 1000000;
  uint32_t uniform = 0;
  uint32_t sparse = 0;
  for (uint32_t i = 0; i < samples; ++i) {
    for (size_t k = 0; k < in.size(); k += 8) {
      const uint64_t word = rng.Next();
      std::memcpy(in.data() + k, &word, std::min<size_t>(8, in.size() - k));
    }
    uniform += FiresOn(single, in);
    std::fill(in.begin(), in.end(), 0);
    for (uint64_t k = rng.Between(1, 4); k > 0; --k) {
      in[rng.Below(in.size())] = rng.Byte();
    }
    sparse += FiresOn(single, in);
  }
  return static_cast<uint32_t>(uint64_t{std::max(uniform, sparse)} *
                               1000000 / samples);
}

absl::Status ValidateParams(const GeneratorParams &p) {
  if (auto s = ValidateMapSize(p.map_size); !s.ok()) return s;
  const uint32_t reserved = p.corruption_detours ? p.corruption_detours + 1 : 0;
  if (p.corruption_detours > 64) {
    return absl::InvalidArgumentError("corruption_detours must be <= 64");
  }
  if (p.max_edges < reserved + 8) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max_edges ", p.max_edges, " leaves fewer than 8 program edges"));
  }
  if (!p.alias_map_indices && p.map_size < p.max_edges) {
    return absl::InvalidArgumentError(
        "map_size is smaller than the edge count; enable aliasing");
  }
  if (p.min_bugs > p.max_bugs) {
    return absl::InvalidArgumentError("min_bugs > max_bugs");
  }
  if (p.max_bugs > 0 && p.trigger_kinds.empty()) {
    return absl::InvalidArgumentError("no trigger kinds allowed");
  }
  if (p.max_loop_iterations < 8 || p.max_loop_iterations > 255 ||
      p.max_dispatch_iterations < 2 || p.max_dispatch_iterations > 255) {
    return absl::InvalidArgumentError("loop iteration bounds out of range");
  }
  if (p.step_cap == 0) return absl::InvalidArgumentError("step_cap is 0");
  if (p.early_exit_percent > 100) {
    return absl::InvalidArgumentError("early_exit_percent must be <= 100");
  }
  if (p.min_input_size == 0 || p.min_input_size > 65536) {
    return absl::InvalidArgumentError("min_input_size must be in [1, 65536]");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<SyntheticTarget> GenerateTarget(const GeneratorParams &p) {
  if (auto s = ValidateParams(p); !s.ok()) return s;
  Rng rng(p.seed);
  SyntheticTarget t;
  t.name = absl::StrCat("gen-", p.seed);
  t.map_size = p.map_size;
  t.step_cap = p.step_cap;
  t.cost = p.cost;
  t.generator = p.ToString();

  // Plan node kinds within the edge budget.
  const uint32_t reserved = p.corruption_detours ? p.corruption_detours + 1 : 0;
  const uint32_t budget = p.max_edges - reserved;
  const bool need_dispatch =
      std::find(p.trigger_kinds.begin(), p.trigger_kinds.end(),
                TriggerKind::kOrderSensitive) != p.trigger_kinds.end();
  std::vector<NodePlan> plan;
  uint32_t used = 0;
  while (true) {
    NodePlan node;
    const uint64_t roll = rng.Below(100);
    if (plan.empty() && need_dispatch) {
      node = {NodeKind::kLoop, 2};
    } else if (roll < 45) {
      node = {NodeKind::kThreshold, 2};
    } else if (roll < 75) {
      node = {NodeKind::kEquals, 2};
    } else if (roll < 80) {
      node = {NodeKind::kSwitch, static_cast<uint32_t>(rng.Between(3, 4))};
    } else {
      node = {NodeKind::kLoop, 1};
    }
    const uint32_t cost =
        node.kind == NodeKind::kLoop ? node.fanout + 1 : node.fanout;
    if (used + cost > budget) break;
    used += cost;
    plan.push_back(node);
  }
  const NodeId exit = static_cast<NodeId>(plan.size());

  auto add_edge = [&](NodeId src, NodeId dst) {
    const EdgeId id = static_cast<EdgeId>(t.edges.size());
    const uint32_t index = p.alias_map_indices
                               ? static_cast<uint32_t>(rng.Below(p.map_size))
                               : id;
    t.edges.push_back(Edge{src, dst, index});
    return id;
  };

  // Decision bytes sit at scattered offsets of a larger input, so most
  // mutations touch bytes the program never reads.
  uint32_t selector_bytes = 0;
  for (const NodePlan &n : plan) {
    if (n.kind == NodeKind::kLoop && n.fanout > 1) {
      selector_bytes += p.max_dispatch_iterations;
    }
  }
  const uint32_t span = std::max<uint32_t>(
      p.min_input_size, 2 * static_cast<uint32_t>(plan.size()) + selector_bytes);
  std::vector<uint32_t> slots(span - selector_bytes);
  for (uint32_t k = 0; k < slots.size(); ++k) slots[k] = k;
  for (size_t k = 0; k < plan.size(); ++k) {
    std::swap(slots[k], slots[k + rng.Below(slots.size() - k)]);
  }
  uint32_t selector_next = span - selector_bytes;

  t.nodes.resize(plan.size() + 1);
  for (NodeId i = 0; i < plan.size(); ++i) {
    Node &node = t.nodes[i];
    node.kind = plan[i].kind;
    node.input_offset = slots[i];
    const NodeId far = std::min<NodeId>(i + 3, exit);
    switch (node.kind) {
      case NodeKind::kThreshold:
        // Skewed: one side is taken by few byte values.
        node.operand = static_cast<uint8_t>(
            rng.Between(192, 255));
        [[fallthrough]];
      case NodeKind::kEquals:
      case NodeKind::kSwitch:
        if (node.kind == NodeKind::kEquals) node.operand = rng.Byte();
        for (uint32_t k = 0; k < plan[i].fanout; ++k) {
          NodeId dst = i + 1;
          if (k > 0) {
            dst = rng.Below(100) < p.early_exit_percent
                      ? exit
                      : static_cast<NodeId>(rng.Between(i + 1, far));
          }
          node.out.push_back(add_edge(i, dst));
        }
        break;
      case NodeKind::kLoop:
        if (plan[i].fanout == 1) {
          node.max_iterations = static_cast<uint8_t>(
              rng.Between(16, p.max_loop_iterations));
        } else {
          node.max_iterations = static_cast<uint8_t>(
              rng.Between(2, p.max_dispatch_iterations));
          node.selector_offset = selector_next;
          selector_next += p.max_dispatch_iterations;
        }
        for (uint32_t k = 0; k < plan[i].fanout; ++k) {
          node.body.push_back(add_edge(i, i));
        }
        node.out.push_back(add_edge(i, i + 1));
        break;
      default:
        break;
    }
  }
  t.nodes[exit].kind = NodeKind::kExit;

  if (p.corruption_detours > 0) {
    const NodeId c = static_cast<NodeId>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes[c].kind = NodeKind::kCorruption;
    for (uint32_t k = 0; k < p.corruption_detours; ++k) {
      t.nodes[c].body.push_back(add_edge(c, c));
    }
    t.nodes[c].out.push_back(add_edge(c, c));
    t.corruption_node = c;
  }
  t.input_size = std::max(span, ComputeInputSize(t));

  const uint32_t num_bugs =
      static_cast<uint32_t>(rng.Between(p.min_bugs, p.max_bugs));
  for (BugId id = 1; id <= num_bugs; ++id) {
    BugSpec bug;
    bug.id = id;
    bug.native = rng.Below(100) < p.native_percent;
    bug.sanitizer_class = kAllBugClasses[rng.Below(kAllBugClasses.size())];
    TriggerKind kind = p.trigger_kinds[rng.Below(p.trigger_kinds.size())];
    bug.diverts =
        p.corruption_detours > 0 && kind != TriggerKind::kOrderSensitive;

    std::optional<Candidate> accepted;
    std::optional<Candidate> fallback;
    for (int attempt = 0; attempt < 64 && !accepted; ++attempt) {
      // Count and order triggers need particular loops; fall back to a
      // subset trigger when the program offers none.
      if (attempt == 48 && !fallback) {
        kind = TriggerKind::kEdgeSubset;
        bug.diverts = p.corruption_detours > 0;
      }
      ByteArray walk = RandomWalkInput(t, rng);
      std::vector<EdgeId> trace;
      if (RunTarget(t, walk, nullptr, &trace).timed_out) continue;
      auto cand = PickTrigger(t, kind, trace, std::move(walk), rng);
      if (!cand) continue;
      bug.trigger = cand->trigger;
      const SyntheticTarget single = WithOnlyBug(t, bug);
      if (!FiresOn(single, cand->witness)) continue;
      if (!fallback) fallback = cand;
      if (RandomFirePpm(single, p.rarity_samples, rng) <=
          p.max_random_fire_ppm) {
        accepted = std::move(cand);
      }
    }
    if (!accepted) accepted = std::move(fallback);
    if (!accepted) {
      return absl::InternalError(absl::StrCat(
          "could not place bug ", id, " in generated target ", t.name));
    }
    bug.trigger = accepted->trigger;
    t.bugs.push_back(bug);
    t.witnesses.push_back(Witness{id, std::move(accepted->witness)});
  }
  if (auto s = ValidateTarget(t); !s.ok()) {
    return absl::InternalError(
        absl::StrCat("generator produced an invalid target: ", s.message()));
  }
  return t;
}

TargetBuilder::TargetBuilder(std::string name, size_t map_size) {
  target_.name = std::move(name);
  target_.map_size = map_size;
}

NodeId TargetBuilder::AddNode(Node node) {
  target_.nodes.push_back(std::move(node));
  return static_cast<NodeId>(target_.nodes.size() - 1);
}

NodeId TargetBuilder::AddExit() { return AddNode(Node{}); }

NodeId TargetBuilder::AddThreshold(uint32_t offset, uint8_t operand) {
  Node n;
  n.kind = NodeKind::kThreshold;
  n.input_offset = offset;
  n.operand = operand;
  return AddNode(std::move(n));
}

NodeId TargetBuilder::AddEquals(uint32_t offset, uint8_t value) {
  Node n;
  n.kind = NodeKind::kEquals;
  n.input_offset = offset;
  n.operand = value;
  return AddNode(std::move(n));
}

NodeId TargetBuilder::AddSwitch(uint32_t offset) {
  Node n;
  n.kind = NodeKind::kSwitch;
  n.input_offset = offset;
  return AddNode(std::move(n));
}

NodeId TargetBuilder::AddLoop(uint32_t offset, uint8_t max_iterations,
                              uint32_t selector_offset) {
  Node n;
  n.kind = NodeKind::kLoop;
  n.input_offset = offset;
  n.max_iterations = max_iterations;
  n.selector_offset = selector_offset;
  return AddNode(std::move(n));
}

NodeId TargetBuilder::AddCorruption() {
  Node n;
  n.kind = NodeKind::kCorruption;
  const NodeId id = AddNode(std::move(n));
  target_.corruption_node = id;
  return id;
}

EdgeId TargetBuilder::Connect(NodeId src, NodeId dst) {
  const EdgeId id = static_cast<EdgeId>(target_.edges.size());
  target_.edges.push_back(Edge{src, dst, id});
  target_.nodes[src].out.push_back(id);
  return id;
}

EdgeId TargetBuilder::AddBody(NodeId node) {
  const EdgeId id = static_cast<EdgeId>(target_.edges.size());
  target_.edges.push_back(Edge{node, node, id});
  target_.nodes[node].body.push_back(id);
  return id;
}

void TargetBuilder::AddBug(BugSpec bug) {
  target_.bugs.push_back(std::move(bug));
  std::sort(target_.bugs.begin(), target_.bugs.end(),
            [](const BugSpec &a, const BugSpec &b) { return a.id < b.id; });
}

absl::StatusOr<SyntheticTarget> TargetBuilder::Build(uint64_t seed,
                                                     uint32_t attempts) {
  SyntheticTarget t = target_;
  t.input_size = ComputeInputSize(t);
  if (auto s = ValidateTarget(t); !s.ok()) return s;
  Rng rng(seed);
  t.witnesses.clear();
  for (const BugSpec &bug : t.bugs) {
    auto witness = SearchWitness(t, bug, rng, attempts);
    if (!witness.ok()) return witness.status();
    t.witnesses.push_back(Witness{bug.id, *std::move(witness)});
  }
  return t;
}

}  // namespace patfuzz
