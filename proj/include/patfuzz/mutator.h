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

// Havoc-style stacked mutations.

#ifndef PATFUZZ_MUTATOR_H_
#define PATFUZZ_MUTATOR_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "absl/status/status.h"
#include "patfuzz/defs.h"

namespace patfuzz {

enum class MutationOp : uint8_t {
  kBitFlip,
  kRandomByte,
  kArith8,
  kArith16,
  kArith32,
  kDeleteBlock,
  kDuplicateBlock,
  kSplice,
};
inline constexpr size_t kNumMutationOps = 8;

std::string_view MutationOpName(MutationOp op);

struct MutatorConfig {
  size_t max_input_len = kDefaultMaxInputLen;
  // Each mutation stacks between 1 and this many operations.
  uint32_t havoc_stack = kDefaultHavocStack;
  // Relative operator weights, indexed by MutationOp.
  std::array<uint32_t, kNumMutationOps> weights = {4, 4, 2, 1, 1, 2, 2, 1};
  // Add/sub amounts are drawn from [1, arith_max].
  uint32_t arith_max = 35;
  // Largest block deleted or duplicated.
  size_t max_block = 32;
};

absl::Status ValidateMutatorConfig(const MutatorConfig &config);

class Mutator {
 public:
  explicit Mutator(MutatorConfig config);

  // Writes a mutant of `seed` to `out`, stacking 1..havoc_stack operations.
  // `splice_with` supplies the second parent of splice operations.
  void Mutate(ByteSpan seed, ByteSpan splice_with, Rng &rng, ByteArray &out);

  // As Mutate() with a fixed stack depth; 0 copies `seed` unchanged.
  void MutateStacked(ByteSpan seed, ByteSpan splice_with, uint32_t stack,
                     Rng &rng, ByteArray &out);

  // Applies exactly `op` once.
  void Apply(MutationOp op, ByteSpan splice_with, Rng &rng, ByteArray &data);

  const std::array<uint64_t, kNumMutationOps> &op_counts() const {
    return counts_;
  }
  const MutatorConfig &config() const { return config_; }

 private:
  MutationOp PickOp(Rng &rng);

  MutatorConfig config_;
  uint64_t total_weight_ = 0;
  std::array<uint64_t, kNumMutationOps> counts_{};
};

}  // namespace patfuzz

#endif  // PATFUZZ_MUTATOR_H_
