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

// Reading and writing synthetic targets. The on-disk format is versioned
// JSON; see docs/target_format.md.

#ifndef PATFUZZ_TARGET_IO_H_
#define PATFUZZ_TARGET_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "patfuzz/synthetic_target.h"

namespace patfuzz {

inline constexpr std::string_view kTargetFormatName = "patfuzz-target";
inline constexpr int kTargetFormatVersion = 1;

std::string SerializeTarget(const SyntheticTarget &target);

// Parses and validates. Unknown versions are rejected.
absl::StatusOr<SyntheticTarget> ParseTarget(std::string_view text);

absl::Status SaveTarget(const SyntheticTarget &target, const std::string &path);
absl::StatusOr<SyntheticTarget> LoadTarget(const std::string &path);

}  // namespace patfuzz

#endif  // PATFUZZ_TARGET_IO_H_
