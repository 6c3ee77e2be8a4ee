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

// Deterministic synthetic programs: a control-flow graph whose branches read
// input bytes at fixed offsets, with injected bugs and a virtual-clock cost
// model. These stand in for real instrumented binaries and give every
// campaign exact ground truth.

#ifndef PATFUZZ_SYNTHETIC_TARGET_H_
#define PATFUZZ_SYNTHETIC_TARGET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "patfuzz/bitmap.h"
#include "patfuzz/bug_class.h"
#include "patfuzz/defs.h"
#include "patfuzz/execution_result.h"

namespace patfuzz {

enum class NodeKind {
  kExit,
  // byte < operand ? out[0] : out[1]
  kThreshold,
  // byte == operand ? out[1] : out[0]
  kEquals,
  // out[byte % out.size()]
  kSwitch,
  // Iterates (byte % (max_iterations + 1)) times over the body, then takes
  // out[0]. With one body edge every iteration takes it; with several, the
  // j-th iteration takes body[input[selector_offset + j] % body.size()].
  kLoop,
  // Entered only after a diverting bug fires. For each body edge i, takes
  // body[i] if bit i of a digest of the whole input is set, else out[0].
  kCorruption,
};

std::string_view NodeKindName(NodeKind kind);

struct Node {
  NodeKind kind = NodeKind::kExit;
  uint32_t input_offset = 0;
  uint8_t operand = 0;
  std::vector<EdgeId> out;
  std::vector<EdgeId> body;
  uint8_t max_iterations = 0;
  uint32_t selector_offset = 0;

  bool operator==(const Node &) const = default;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  uint32_t map_index = 0;

  bool operator==(const Edge &) const = default;
};

enum class TriggerKind {
  // Every edge in `edges` visited.
  kEdgeSubset,
  // Every edge in `edges` visited and no edge in `absent` visited.
  kEdgeAbsent,
  // `edge` visited at least `min_count` times (and `edges` all visited).
  kCountThreshold,
  // `edge` first visited before `second` is first visited, both visited
  // (and `edges` all visited).
  kOrderSensitive,
};

std::string_view TriggerKindName(TriggerKind kind);

struct Trigger {
  TriggerKind kind = TriggerKind::kEdgeSubset;
  std::vector<EdgeId> edges;   // Required-visited set (context for the
                               // count and order kinds).
  std::vector<EdgeId> absent;  // kEdgeAbsent only.
  EdgeId edge = 0;             // kCountThreshold, kOrderSensitive.
  EdgeId second = 0;           // kOrderSensitive.
  uint32_t min_count = 0;      // kCountThreshold.

  bool operator==(const Trigger &) const = default;
};

struct BugSpec {
  BugId id = 0;
  // Native bugs crash the plain run; the others are visible only to an
  // executor instrumented for `sanitizer_class`.
  bool native = false;
  BugClass sanitizer_class = BugClass::kAddressLike;
  Trigger trigger;
  // When set, a firing bug sends execution through the corruption node
  // before the run ends.
  bool diverts = false;

  bool operator==(const BugSpec &) const = default;
};

struct CostModel {
  uint32_t base = 100;      // Ticks per execution.
  uint32_t per_edge = 1;    // Ticks per edge traversal.

  bool operator==(const CostModel &) const = default;
};

struct Witness {
  BugId bug = 0;
  ByteArray input;

  bool operator==(const Witness &) const = default;
};

struct SyntheticTarget {
  std::string name;
  size_t map_size = kDefaultMapSize;
  uint32_t step_cap = kDefaultStepCap;
  uint32_t input_size = 0;  // Bytes addressed by node offsets.
  std::vector<Node> nodes;  // nodes[0] is the entry.
  std::vector<Edge> edges;
  std::optional<NodeId> corruption_node;
  std::vector<BugSpec> bugs;  // Sorted by id.
  CostModel cost;
  SlowdownTable slowdowns;
  std::vector<Witness> witnesses;
  // Free-form provenance (generator seed and parameters).
  std::string generator;

  bool operator==(const SyntheticTarget &) const = default;

  const BugSpec *FindBug(BugId id) const;
};

// Structural checks: edge/node references in range, map indices below
// map_size, node kinds have the right arity, the main graph is acyclic apart
// from loop bodies, bug edges exist, bug ids unique.
absl::Status ValidateTarget(const SyntheticTarget &target);

// Outcome of running the program, before detectability is applied.
struct TargetRun {
  bool timed_out = false;
  uint32_t steps = 0;
  std::vector<BugId> fired;  // Ascending.
};

// Runs `input` through `target`. Hits go into `bitmap` (cleared first) when
// given; the full edge sequence is appended to `trace` when given.
TargetRun RunTarget(const SyntheticTarget &target, ByteSpan input,
                    Bitmap *bitmap, std::vector<EdgeId> *trace);

// Reference predicate evaluation over a complete edge sequence.
bool TriggerFires(const Trigger &trigger, std::span<const EdgeId> trace);

// Native cost of a run that traversed `steps` edges.
CentiTicks NativeCost(const CostModel &cost, uint32_t steps);

// Plain run: Crash(lowest firing native bug id) if any native bug fires.
ExecutionResult ExecuteNative(const SyntheticTarget &target, ByteSpan input,
                              Bitmap &bitmap, bool want_trace = false);

// Run under an executor instrumented for `classes`. Reports every firing bug
// that is native or whose class is in `classes`. Cost is the native cost
// scaled by the combined slowdown of `classes`.
SanitizerVerdict ExecuteSanitized(const SyntheticTarget &target,
                                  ByteSpan input, BugClassSet classes);

}  // namespace patfuzz

#endif  // PATFUZZ_SYNTHETIC_TARGET_H_
