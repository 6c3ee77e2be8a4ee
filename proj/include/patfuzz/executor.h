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

// Uniform execution over in-process synthetic targets and external
// commands, for the fuzz target and for sanitizer executors.

#ifndef PATFUZZ_EXECUTOR_H_
#define PATFUZZ_EXECUTOR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "patfuzz/bitmap.h"
#include "patfuzz/bug_class.h"
#include "patfuzz/execution_result.h"
#include "patfuzz/subprocess.h"
#include "patfuzz/synthetic_target.h"

namespace patfuzz {

enum class ExecutorKind { kInProcessSynthetic, kExternalCommand };
enum class ExecutorRole { kFuzzTarget, kSanitizerTarget };

struct ExecutorSpec {
  std::string id;
  ExecutorKind kind = ExecutorKind::kInProcessSynthetic;
  ExecutorRole role = ExecutorRole::kFuzzTarget;

  // kInProcessSynthetic: a target file, or an already loaded target (which
  // wins when both are set).
  std::string target_path;
  std::shared_ptr<const SyntheticTarget> target;
  // Replaces the target's own slowdown table.
  std::optional<SlowdownTable> slowdowns;

  // kExternalCommand.
  CommandSpec command;
  uint32_t timeout_ms = 1000;
  // Multiply an external sanitizer's deadline by its combined slowdown.
  bool scale_timeout = true;

  // kSanitizerTarget only.
  BugClassSet classes;
};

// Checks one spec in isolation.
absl::Status ValidateExecutorSpec(const ExecutorSpec &spec);
// Role and id checks across one campaign's executors.
absl::Status ValidateExecutors(const ExecutorSpec &fuzz,
                               const std::vector<ExecutorSpec> &pool);

// Loads `spec.target` from `spec.target_path` if not already present and
// applies the slowdown override.
absl::Status ResolveSyntheticTarget(ExecutorSpec &spec);

// Deadline for an external sanitizer executor, in milliseconds.
uint32_t SanitizerTimeoutMs(const ExecutorSpec &spec);

class FuzzExecutor {
 public:
  virtual ~FuzzExecutor() = default;

  // Runs `input`, leaving its coverage in `bitmap`. Errors are environment
  // faults, not findings.
  virtual absl::StatusOr<ExecutionResult> Run(ByteSpan input,
                                              Bitmap &bitmap) = 0;

  // The synthetic program behind this executor, if any.
  virtual const SyntheticTarget *synthetic() const { return nullptr; }

  uint64_t executions() const { return next_index_; }

 protected:
  uint64_t next_index_ = 0;
};

absl::StatusOr<std::unique_ptr<FuzzExecutor>> MakeFuzzExecutor(
    ExecutorSpec spec, size_t map_size);

// Runs inputs on every sanitizer executor of a pool. External members share
// one persistent launcher; in parallel mode each gets its own and members
// run on separate threads.
class SanitizerDispatcher {
 public:
  static absl::StatusOr<std::unique_ptr<SanitizerDispatcher>> Create(
      std::vector<ExecutorSpec> pool, bool parallel = false);

  // One verdict per member, in pool order.
  std::vector<SanitizerVerdict> Dispatch(ByteSpan input);

  size_t size() const { return members_.size(); }
  const std::vector<ExecutorSpec> &members() const { return members_; }

 private:
  SanitizerDispatcher() = default;
  SanitizerVerdict RunMember(size_t i, ByteSpan input);

  std::vector<ExecutorSpec> members_;
  bool parallel_ = false;
  // Per member: which runner and which command slot in it.
  std::vector<std::pair<CommandRunner *, size_t>> slots_;
  std::vector<std::unique_ptr<CommandRunner>> runners_;
};

}  // namespace patfuzz

#endif  // PATFUZZ_EXECUTOR_H_
