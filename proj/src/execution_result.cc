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

#include "patfuzz/execution_result.h"

namespace patfuzz {

std::string_view ExecStatusName(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk:
      return "ok";
    case ExecStatus::kCrash:
      return "crash";
    case ExecStatus::kTimeout:
      return "timeout";
  }
  return "unknown";
}

std::string_view VerdictOutcomeName(VerdictOutcome outcome) {
  switch (outcome) {
    case VerdictOutcome::kClean:
      return "clean";
    case VerdictOutcome::kCrash:
      return "crash";
    case VerdictOutcome::kTimeout:
      return "timeout";
    case VerdictOutcome::kExecutorError:
      return "executor_error";
  }
  return "unknown";
}

}  // namespace patfuzz
