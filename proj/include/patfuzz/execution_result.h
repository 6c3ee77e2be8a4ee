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

// Outcomes of fuzz-target runs and sanitizer-executor runs.

#ifndef PATFUZZ_EXECUTION_RESULT_H_
#define PATFUZZ_EXECUTION_RESULT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "patfuzz/defs.h"

namespace patfuzz {

enum class ExecStatus { kOk, kCrash, kTimeout };

std::string_view ExecStatusName(ExecStatus status);

// Crash ids: for synthetic targets, the ground-truth bug id. For external
// commands, the terminating signal number, or kExitCodeCrashBase + code for
// a nonzero exit.
inline constexpr uint64_t kExitCodeCrashBase = 256;

// Result of one fuzz-target execution. The bitmap is written into a
// caller-owned buffer by the executor rather than carried here, so the hot
// loop never copies it.
struct ExecutionResult {
  ExecStatus status = ExecStatus::kOk;
  uint64_t crash_id = 0;  // Meaningful iff status == kCrash.
  // Centiticks in virtual-clock mode, wall microseconds * 100 otherwise.
  CentiTicks cost = 0;
  uint64_t exec_index = 0;
  uint32_t steps = 0;
  // Full edge sequence, filled only when tracing was requested.
  std::vector<EdgeId> trace;
};

enum class VerdictOutcome { kClean, kCrash, kTimeout, kExecutorError };

std::string_view VerdictOutcomeName(VerdictOutcome outcome);

struct SanitizerVerdict {
  std::string executor_id;
  VerdictOutcome outcome = VerdictOutcome::kClean;
  // All bug / crash ids this executor reported, ascending. Non-empty iff
  // outcome == kCrash.
  std::vector<uint64_t> crash_ids;
  CentiTicks cost = 0;
  std::string error;  // Set iff outcome == kExecutorError.
};

}  // namespace patfuzz

#endif  // PATFUZZ_EXECUTION_RESULT_H_
