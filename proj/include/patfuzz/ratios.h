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

// Unique-pattern ratios over a campaign's execution log.

#ifndef PATFUZZ_RATIOS_H_
#define PATFUZZ_RATIOS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "patfuzz/campaign.h"
#include "patfuzz/executor.h"

namespace patfuzz {

// Decides whether an input triggers a bug. The reference oracle runs it on
// every pool member.
using BugOracle = std::function<absl::StatusOr<bool>(ByteSpan input)>;
BugOracle PoolOracle(SanitizerDispatcher &pool);

struct RatioCounts {
  uint64_t executions = 0;
  uint64_t set_unique = 0;
  uint64_t hit_unique = 0;
  uint64_t cov_increase = 0;
  uint64_t bug_triggering = 0;
  // Bug-triggering executions that were first-seen under each abstraction.
  uint64_t bug_set_unique = 0;
  uint64_t bug_hit_unique = 0;
  uint64_t bug_cov_increase = 0;

  bool operator==(const RatioCounts &) const = default;
};

struct Ratios {
  double all_set = 0;
  double all_hit = 0;
  double all_cov = 0;
  // Unset when no execution triggered a bug.
  std::optional<double> bug_set;
  std::optional<double> bug_hit;
  std::optional<double> bug_cov;
};

// Fails with Unavailable when the campaign ran without an execution log.
absl::StatusOr<RatioCounts> ComputeRatioCounts(const CampaignOutput &out,
                                               const BugOracle &oracle);
Ratios RatiosOf(const RatioCounts &c);

// Over several campaigns: the mean of per-campaign ratios (bug ratios over
// campaigns that had bug-triggering executions) and the ratios of the
// summed counts.
struct RatioSummary {
  Ratios mean;
  Ratios pooled;
  RatioCounts total;
};
RatioSummary SummarizeRatios(const std::vector<RatioCounts> &counts);

}  // namespace patfuzz

#endif  // PATFUZZ_RATIOS_H_
