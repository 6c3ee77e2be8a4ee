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

// Execution patterns: order-insensitive abstractions of one execution derived
// from its bitmap, their canonical byte encoding, and their digests.
//
// Canonical encoding (normative): for each element in ascending edge-index
// order, the index as a 32-bit little-endian integer, followed for the
// hit-count policy by the 8-bit bucket bit. A coverage-increase pattern
// encodes as the single byte 0 or 1. The digest is XXH64 (seed 0) of that
// byte string.

#ifndef PATFUZZ_PATTERN_H_
#define PATFUZZ_PATTERN_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "patfuzz/bitmap.h"
#include "patfuzz/defs.h"

namespace patfuzz {

enum class PatternPolicy {
  kSet,               // Sorted indices of nonzero counters.
  kHitCountBucketed,  // Sorted (index, bucket) pairs.
  kCoverageIncrease,  // Single flag: would the bitmap add coverage.
};

std::string_view PolicyName(PatternPolicy policy);

inline constexpr std::string_view kDigestAlgorithm = "xxh64";
inline constexpr uint64_t kDigestSeed = 0;
inline constexpr std::string_view kPatternEncoding =
    "u32le-index-ascending[+u8-bucket]";

struct ExecutionPattern {
  PatternPolicy policy = PatternPolicy::kSet;
  std::vector<uint32_t> indices;
  // Parallel to `indices`; populated only for kHitCountBucketed.
  std::vector<uint8_t> buckets;
  // Populated only for kCoverageIncrease.
  bool coverage_increased = false;

  bool operator==(const ExecutionPattern &) const = default;
};

struct PatternDigest {
  uint64_t value = 0;

  auto operator<=>(const PatternDigest &) const = default;

  template <typename H>
  friend H AbslHashValue(H h, const PatternDigest &d) {
    return H::combine(std::move(h), d.value);
  }
};

// Fills `out` from `bitmap` under `policy`, reusing its storage. `virgin` is
// required for kCoverageIncrease and ignored otherwise.
absl::Status ExtractPatternInto(const Bitmap &bitmap, PatternPolicy policy,
                                const CoverageMap *virgin,
                                ExecutionPattern &out);

absl::StatusOr<ExecutionPattern> ExtractPattern(const Bitmap &bitmap,
                                                PatternPolicy policy,
                                                const CoverageMap *virgin);

// Appends the canonical encoding of `pattern` to `out` (after clearing it).
void EncodePattern(const ExecutionPattern &pattern, ByteArray &out);

PatternDigest DigestBytes(ByteSpan bytes);
PatternDigest DigestPattern(const ExecutionPattern &pattern);

// Extract-encode-digest pipeline with reusable scratch buffers, for the
// per-execution hot path.
class PatternDigester {
 public:
  explicit PatternDigester(PatternPolicy policy) : policy_(policy) {}

  PatternPolicy policy() const { return policy_; }

  absl::StatusOr<PatternDigest> Digest(const Bitmap &bitmap,
                                       const CoverageMap *virgin);

  // The two halves of Digest(), split so callers can time them separately.
  absl::Status Extract(const Bitmap &bitmap, const CoverageMap *virgin);
  PatternDigest DigestExtracted();

  // Valid after a successful Digest() call.
  const ExecutionPattern &last_pattern() const { return pattern_; }
  ByteSpan last_encoding() const { return encoding_; }

 private:
  PatternPolicy policy_;
  ExecutionPattern pattern_;
  ByteArray encoding_;
};

// Shadow map digest -> canonical encoding. Counts digests that were produced
// by two distinct encodings.
class CollisionAudit {
 public:
  void Record(PatternDigest digest, ByteSpan encoding);

  size_t collisions() const { return collisions_; }
  size_t distinct_patterns() const { return shadow_.size(); }

 private:
  absl::flat_hash_map<PatternDigest, ByteArray> shadow_;
  size_t collisions_ = 0;
};

}  // namespace patfuzz

#endif  // PATFUZZ_PATTERN_H_
