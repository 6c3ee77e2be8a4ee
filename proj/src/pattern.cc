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

#include "patfuzz/pattern.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

#define XXH_INLINE_ALL
#include "xxhash.h"

namespace patfuzz {

std::string_view PolicyName(PatternPolicy policy) {
  switch (policy) {
    case PatternPolicy::kSet:
      return "set";
    case PatternPolicy::kHitCountBucketed:
      return "hit_count";
    case PatternPolicy::kCoverageIncrease:
      return "coverage";
  }
  return "unknown";
}

absl::Status ExtractPatternInto(const Bitmap &bitmap, PatternPolicy policy,
                                const CoverageMap *virgin,
                                ExecutionPattern &out) {
  out.policy = policy;
  out.indices.clear();
  out.buckets.clear();
  out.coverage_increased = false;
  switch (policy) {
    case PatternPolicy::kSet:
      ForEachNonzeroCounter(bitmap.counters(), [&](size_t i, uint8_t) {
        out.indices.push_back(static_cast<uint32_t>(i));
      });
      return absl::OkStatus();
    case PatternPolicy::kHitCountBucketed:
      ForEachNonzeroCounter(bitmap.counters(), [&](size_t i, uint8_t count) {
        out.indices.push_back(static_cast<uint32_t>(i));
        out.buckets.push_back(BucketOf(count));
      });
      return absl::OkStatus();
    case PatternPolicy::kCoverageIncrease:
      if (virgin == nullptr) {
        return absl::InvalidArgumentError(
            "coverage-increase pattern requires a coverage map");
      }
      return virgin->WouldIncrease(bitmap, out.coverage_increased);
  }
  return absl::InvalidArgumentError("unknown pattern policy");
}

absl::StatusOr<ExecutionPattern> ExtractPattern(const Bitmap &bitmap,
                                                PatternPolicy policy,
                                                const CoverageMap *virgin) {
  ExecutionPattern pattern;
  if (auto s = ExtractPatternInto(bitmap, policy, virgin, pattern); !s.ok()) {
    return s;
  }
  return pattern;
}

void EncodePattern(const ExecutionPattern &pattern, ByteArray &out) {
  out.clear();
  if (pattern.policy == PatternPolicy::kCoverageIncrease) {
    out.push_back(pattern.coverage_increased ? 1 : 0);
    return;
  }
  const bool with_buckets =
      pattern.policy == PatternPolicy::kHitCountBucketed;
  out.reserve(pattern.indices.size() * (with_buckets ? 5 : 4));
  for (size_t k = 0; k < pattern.indices.size(); ++k) {
    const uint32_t i = pattern.indices[k];
    out.push_back(static_cast<uint8_t>(i));
    out.push_back(static_cast<uint8_t>(i >> 8));
    out.push_back(static_cast<uint8_t>(i >> 16));
    out.push_back(static_cast<uint8_t>(i >> 24));
    if (with_buckets) out.push_back(pattern.buckets[k]);
  }
}

PatternDigest DigestBytes(ByteSpan bytes) {
  return PatternDigest{XXH64(bytes.data(), bytes.size(), kDigestSeed)};
}

PatternDigest DigestPattern(const ExecutionPattern &pattern) {
  ByteArray encoding;
  EncodePattern(pattern, encoding);
  return DigestBytes(encoding);
}

absl::Status PatternDigester::Extract(const Bitmap &bitmap,
                                      const CoverageMap *virgin) {
  return ExtractPatternInto(bitmap, policy_, virgin, pattern_);
}

PatternDigest PatternDigester::DigestExtracted() {
  EncodePattern(pattern_, encoding_);
  return DigestBytes(encoding_);
}

absl::StatusOr<PatternDigest> PatternDigester::Digest(
    const Bitmap &bitmap, const CoverageMap *virgin) {
  if (auto s = Extract(bitmap, virgin); !s.ok()) return s;
  return DigestExtracted();
}

void CollisionAudit::Record(PatternDigest digest, ByteSpan encoding) {
  auto [it, inserted] =
      shadow_.try_emplace(digest, encoding.begin(), encoding.end());
  if (!inserted && !std::equal(it->second.begin(), it->second.end(),
                               encoding.begin(), encoding.end())) {
    ++collisions_;
  }
}

}  // namespace patfuzz
