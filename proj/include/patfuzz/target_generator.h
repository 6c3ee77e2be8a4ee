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

// Random and hand-written synthetic targets, with witness search.

#ifndef PATFUZZ_TARGET_GENERATOR_H_
#define PATFUZZ_TARGET_GENERATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "patfuzz/defs.h"
#include "patfuzz/synthetic_target.h"

namespace patfuzz {

struct GeneratorParams {
  uint64_t seed = 0;
  // Total edge budget, corruption detours included.
  uint32_t max_edges = 64;
  uint32_t min_bugs = 1;
  uint32_t max_bugs = 5;
  std::vector<TriggerKind> trigger_kinds = {TriggerKind::kEdgeSubset,
                                            TriggerKind::kEdgeAbsent,
                                            TriggerKind::kCountThreshold};
  uint32_t native_percent = 30;
  // Detour edges of the corruption node; 0 disables corruption entirely.
  uint32_t corruption_detours = 16;
  size_t map_size = kDefaultMapSize;
  uint32_t step_cap = kDefaultStepCap;
  CostModel cost;
  // Hash edges into the map instead of numbering them sequentially.
  bool alias_map_indices = false;
  uint32_t max_loop_iterations = 255;
  uint32_t max_dispatch_iterations = 8;
  // Lower bound on the input length; decision bytes are scattered over it.
  uint32_t min_input_size = 512;
  // Chance (percent) that a branch's alternative edge leaves for the exit.
  uint32_t early_exit_percent = 75;
  // Reject a candidate trigger that fires on more than this many per million
  // uniformly random inputs.
  uint32_t max_random_fire_ppm = 2000;
  uint32_t rarity_samples = 4096;
  uint32_t witness_attempts = 100000;

  // One-line rendering recorded in generated targets.
  std::string ToString() const;
};

// Builds a target deterministically from `params`. Every bug comes with a
// witness input that fires it.
absl::StatusOr<SyntheticTarget> GenerateTarget(const GeneratorParams &params);

// An input that picks a uniformly random outcome at every node.
ByteArray RandomWalkInput(const SyntheticTarget &target, Rng &rng);

// Bounded search for an input firing `bug`: random walks with the bug's own
// edge constraints forced where the owning node allows it.
absl::StatusOr<ByteArray> SearchWitness(const SyntheticTarget &target,
                                        const BugSpec &bug, Rng &rng,
                                        uint32_t attempts);

// Assembles hand-written targets. Node 0 is the entry; edges must point to a
// later node.
class TargetBuilder {
 public:
  explicit TargetBuilder(std::string name, size_t map_size = kDefaultMapSize);

  NodeId AddExit();
  NodeId AddThreshold(uint32_t offset, uint8_t operand);
  NodeId AddEquals(uint32_t offset, uint8_t value);
  NodeId AddSwitch(uint32_t offset);
  NodeId AddLoop(uint32_t offset, uint8_t max_iterations,
                 uint32_t selector_offset = 0);
  NodeId AddCorruption();

  // Appends an out edge (successor or fallthrough) to `src`.
  EdgeId Connect(NodeId src, NodeId dst);
  // Appends a loop-body (or corruption detour) self edge to `node`.
  EdgeId AddBody(NodeId node);

  void AddBug(BugSpec bug);
  void set_step_cap(uint32_t cap) { target_.step_cap = cap; }
  void set_cost(CostModel cost) { target_.cost = cost; }
  SyntheticTarget &mutable_target() { return target_; }

  // Validates, then searches a witness for every bug. Fails if any bug is
  // unreachable within `attempts` tries.
  absl::StatusOr<SyntheticTarget> Build(uint64_t seed = 0,
                                        uint32_t attempts = 100000);

 private:
  NodeId AddNode(Node node);

  SyntheticTarget target_;
};

}  // namespace patfuzz

#endif  // PATFUZZ_TARGET_GENERATOR_H_
