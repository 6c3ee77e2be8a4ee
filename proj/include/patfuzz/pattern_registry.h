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

#ifndef PATFUZZ_PATTERN_REGISTRY_H_
#define PATFUZZ_PATTERN_REGISTRY_H_

#include <cstddef>

#include "absl/container/flat_hash_set.h"
#include "patfuzz/pattern.h"

namespace patfuzz {

// Exact set of pattern digests seen during one campaign. Digests are never
// evicted.
class PatternRegistry {
 public:
  // Test-and-set: returns true iff `digest` was absent, inserting it.
  bool IsUnique(PatternDigest digest) {
    ++queried_count_;
    const bool inserted = seen_.insert(digest).second;
    inserted_count_ += inserted;
    return inserted;
  }

  bool Contains(PatternDigest digest) const { return seen_.contains(digest); }

  size_t inserted_count() const { return inserted_count_; }
  size_t queried_count() const { return queried_count_; }

  // inserted / queried, or 0 before the first query.
  double UniqueRatio() const {
    return queried_count_ == 0
               ? 0.0
               : static_cast<double>(inserted_count_) / queried_count_;
  }

 private:
  absl::flat_hash_set<PatternDigest> seen_;
  size_t inserted_count_ = 0;
  size_t queried_count_ = 0;
};

}  // namespace patfuzz

#endif  // PATFUZZ_PATTERN_REGISTRY_H_
