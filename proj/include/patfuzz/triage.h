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

// Crash deduplication into bug reports.

#ifndef PATFUZZ_TRIAGE_H_
#define PATFUZZ_TRIAGE_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "patfuzz/pattern.h"

namespace patfuzz {

// Synthetic executors report ground-truth bug ids. External ones only give a
// signal or exit code, so the key adds the Set-pattern digest of the
// crashing run.
struct BugKey {
  bool ground_truth = true;
  uint64_t id = 0;
  uint64_t pattern = 0;  // Zero for ground-truth keys.

  auto operator<=>(const BugKey &) const = default;

  template <typename H>
  friend H AbslHashValue(H h, const BugKey &k) {
    return H::combine(std::move(h), k.ground_truth, k.id, k.pattern);
  }

  // "bug:3" or "crash:11@<16 hex digits>".
  std::string ToString() const;
  static std::optional<BugKey> Parse(std::string_view text);
};

BugKey GroundTruthKey(uint64_t bug_id);
BugKey ExternalKey(uint64_t crash_id, PatternDigest set_pattern);

struct CrashEvent {
  uint64_t exec_index = 0;
  CentiTicks tick = 0;
  PatternDigest input_digest;
  std::string detector;
  std::vector<BugKey> keys;
};

struct BugReport {
  BugKey key;
  uint64_t first_exec_index = 0;
  CentiTicks first_tick = 0;
  PatternDigest input_digest;  // Of the earliest trigger.
  std::string detector;        // That found the earliest trigger.

  bool operator==(const BugReport &) const = default;
};

class Triage {
 public:
  void Ingest(const CrashEvent &event);
  bool Contains(const BugKey &key) const { return reports_.contains(key); }
  size_t size() const { return reports_.size(); }
  // Sorted by key.
  std::vector<BugReport> Reports() const;

 private:
  absl::flat_hash_map<BugKey, BugReport> reports_;
};

std::vector<BugReport> Dedupe(const std::vector<CrashEvent> &events);

}  // namespace patfuzz

#endif  // PATFUZZ_TRIAGE_H_
