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

// Saved crashing inputs: one file per distinct input, named by its digest,
// with a JSON sidecar describing the execution.

#ifndef PATFUZZ_CRASH_STORE_H_
#define PATFUZZ_CRASH_STORE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "patfuzz/execution_result.h"
#include "patfuzz/pattern.h"
#include "patfuzz/triage.h"

namespace patfuzz {

struct CrashSidecar {
  uint64_t exec_index = 0;
  CentiTicks tick = 0;
  std::string strategy;
  ExecStatus native_status = ExecStatus::kOk;
  uint64_t native_crash_id = 0;
  std::vector<SanitizerVerdict> verdicts;
  std::vector<BugKey> keys;
};

std::string SidecarJson(const CrashSidecar &sidecar);

class CrashStore {
 public:
  // An empty `dir` keeps only the in-memory index.
  explicit CrashStore(std::string dir) : dir_(std::move(dir)) {}

  absl::Status Init();

  // Saves `input` unless an identical input is already stored. Returns true
  // when it was new.
  absl::StatusOr<bool> Save(ByteSpan input, const CrashSidecar &sidecar);

  size_t size() const { return saved_.size(); }
  const std::string &dir() const { return dir_; }

 private:
  std::string dir_;
  absl::flat_hash_set<PatternDigest> saved_;
};

}  // namespace patfuzz

#endif  // PATFUZZ_CRASH_STORE_H_
