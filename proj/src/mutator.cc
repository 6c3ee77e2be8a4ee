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

#include "patfuzz/mutator.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace patfuzz {

std::string_view MutationOpName(MutationOp op) {
  switch (op) {
    case MutationOp::kBitFlip:
      return "bit_flip";
    case MutationOp::kRandomByte:
      return "random_byte";
    case MutationOp::kArith8:
      return "arith8";
    case MutationOp::kArith16:
      return "arith16";
    case MutationOp::kArith32:
      return "arith32";
    case MutationOp::kDeleteBlock:
      return "delete_block";
    case MutationOp::kDuplicateBlock:
      return "duplicate_block";
    case MutationOp::kSplice:
      return "splice";
  }
  return "?";
}

absl::Status ValidateMutatorConfig(const MutatorConfig &c) {
  if (c.max_input_len == 0) {
    return absl::InvalidArgumentError("max_input_len must be positive");
  }
  if (c.havoc_stack == 0) {
    return absl::InvalidArgumentError("havoc_stack must be positive");
  }
  uint64_t total = 0;
  for (uint32_t w : c.weights) total += w;
  if (total == 0) return absl::InvalidArgumentError("all mutation weights are 0");
  if (c.arith_max == 0 || c.arith_max > 255) {
    return absl::InvalidArgumentError("arith_max must be in [1, 255]");
  }
  if (c.max_block == 0) {
    return absl::InvalidArgumentError("max_block must be positive");
  }
  return absl::OkStatus();
}

Mutator::Mutator(MutatorConfig config) : config_(config) {
  for (uint32_t w : config_.weights) total_weight_ += w;
}

MutationOp Mutator::PickOp(Rng &rng) {
  uint64_t r = rng.Below(total_weight_);
  for (size_t i = 0; i < kNumMutationOps; ++i) {
    if (r < config_.weights[i]) return static_cast<MutationOp>(i);
    r -= config_.weights[i];
  }
  return MutationOp::kBitFlip;
}

void Mutator::Mutate(ByteSpan seed, ByteSpan splice_with, Rng &rng,
                     ByteArray &out) {
  const uint32_t stack =
      static_cast<uint32_t>(rng.Between(1, config_.havoc_stack));
  MutateStacked(seed, splice_with, stack, rng, out);
}

void Mutator::MutateStacked(ByteSpan seed, ByteSpan splice_with,
                            uint32_t stack, Rng &rng, ByteArray &out) {
  out.assign(seed.begin(), seed.end());
  if (out.empty()) out.push_back(0);
  if (out.size() > config_.max_input_len) out.resize(config_.max_input_len);
  for (uint32_t i = 0; i < stack; ++i) Apply(PickOp(rng), splice_with, rng, out);
}

void Mutator::Apply(MutationOp op, ByteSpan splice_with, Rng &rng,
                    ByteArray &d) {
  ++counts_[static_cast<size_t>(op)];
  const size_t n = d.size();
  auto delta = [&] {
    return static_cast<uint32_t>(rng.Between(1, config_.arith_max));
  };
  switch (op) {
    case MutationOp::kBitFlip:
      d[rng.Below(n)] ^= static_cast<uint8_t>(1u << rng.Below(8));
      break;
    case MutationOp::kRandomByte:
      d[rng.Below(n)] ^= static_cast<uint8_t>(rng.Between(1, 255));
      break;
    case MutationOp::kArith8: {
      uint8_t &b = d[rng.Below(n)];
      const uint32_t v = delta();
      b = static_cast<uint8_t>(rng.Below(2) ? b + v : b - v);
      break;
    }
    case MutationOp::kArith16:
    case MutationOp::kArith32: {
      const size_t width = op == MutationOp::kArith16 ? 2 : 4;
      if (n < width) break;
      const size_t pos = rng.Below(n / width) * width;
      uint32_t word = 0;
      for (size_t k = 0; k < width; ++k) word |= uint32_t{d[pos + k]} << (8 * k);
      const uint32_t v = delta();
      word = rng.Below(2) ? word + v : word - v;
      for (size_t k = 0; k < width; ++k) {
        d[pos + k] = static_cast<uint8_t>(word >> (8 * k));
      }
      break;
    }
    case MutationOp::kDeleteBlock: {
      if (n < 2) break;
      const size_t len = rng.Between(1, std::min(n - 1, config_.max_block));
      const size_t pos = rng.Below(n - len + 1);
      d.erase(d.begin() + pos, d.begin() + pos + len);
      break;
    }
    case MutationOp::kDuplicateBlock: {
      if (n >= config_.max_input_len) break;
      const size_t len = rng.Between(
          1, std::min({n, config_.max_block, config_.max_input_len - n}));
      const size_t from = rng.Below(n - len + 1);
      const size_t to = rng.Below(n + 1);
      const ByteArray block(d.begin() + from, d.begin() + from + len);
      d.insert(d.begin() + to, block.begin(), block.end());
      break;
    }
    case MutationOp::kSplice: {
      if (splice_with.empty()) break;
      // Keep a prefix of the current data, then continue with the other
      // parent from the same offset.
      const size_t cut = rng.Between(1, n);
      d.resize(cut);
      if (cut < splice_with.size()) {
        const size_t take =
            std::min(splice_with.size() - cut, config_.max_input_len - cut);
        d.insert(d.end(), splice_with.begin() + cut,
                 splice_with.begin() + cut + take);
      }
      break;
    }
  }
}

}  // namespace patfuzz
