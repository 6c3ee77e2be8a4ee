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

// The fuzzing loop, parameterized by sanitization strategy.

#ifndef PATFUZZ_CAMPAIGN_H_
#define PATFUZZ_CAMPAIGN_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "patfuzz/executor.h"
#include "patfuzz/mutator.h"
#include "patfuzz/triage.h"

namespace patfuzz {

enum class Strategy {
  kNativeOnly,
  kSanitizeAll,
  kPostProcessCoverage,
  kPatternHitCount,
  kPatternSet,
};
inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::kNativeOnly, Strategy::kSanitizeAll,
    Strategy::kPostProcessCoverage, Strategy::kPatternHitCount,
    Strategy::kPatternSet};

// "native", "sanitize_all", "post_coverage", "pattern_hitcount",
// "pattern_set".
std::string_view StrategyName(Strategy s);
std::optional<Strategy> ParseStrategy(std::string_view name);
bool StrategyNeedsPool(Strategy s);

enum class ClockMode { kVirtual, kWall };

struct CampaignConfig {
  Strategy strategy = Strategy::kPatternSet;
  ExecutorSpec fuzz;
  std::vector<ExecutorSpec> pool;
  bool parallel_dispatch = false;
  // Budgets; 0 means unbounded, but one of them must be set.
  uint64_t max_execs = 100000;
  uint64_t max_ticks = 0;
  uint64_t rng_seed = 0;
  std::vector<ByteArray> initial_seeds;
  size_t map_size = kDefaultMapSize;
  MutatorConfig mutator;
  ClockMode clock = ClockMode::kVirtual;
  // Keep one ExecRecord per execution.
  bool exec_log = false;
  // Shadow map from digest to canonical encoding to detect collisions.
  bool collision_audit = false;
  // Crash store and queue go below this directory; empty writes nothing.
  std::string output_dir;
  // Checkpoint every this many executions; 0 only at the end.
  uint64_t checkpoint_every = 0;
  // Queue coverage-increasing inputs even when they crashed. Off by
  // default: crashing inputs only go to the crash store.
  bool queue_crashes = false;
};

absl::Status ValidateCampaignConfig(const CampaignConfig &cfg);

struct ExecRecord {
  uint64_t exec_index = 0;
  ByteArray input;
  ExecStatus status = ExecStatus::kOk;
  uint64_t crash_id = 0;
  CentiTicks cost = 0;
  // First-seen under each abstraction, on this transcript.
  bool set_unique = false;
  bool hit_unique = false;
  bool cov_increase = false;
  // Sent to the pool during the loop.
  bool dispatched = false;

  bool operator==(const ExecRecord &) const = default;
};

struct CampaignStats {
  Strategy strategy = Strategy::kPatternSet;
  uint64_t rng_seed = 0;
  uint64_t total_execs = 0;
  uint64_t native_crashes = 0;
  uint64_t timeouts = 0;
  // Executions sent to the pool (loop and post-processing).
  uint64_t dispatched_execs = 0;
  uint64_t post_dispatched = 0;
  // Dispatched executions that had already crashed natively.
  uint64_t native_crash_dispatches = 0;
  std::vector<std::pair<std::string, uint64_t>> dispatches;  // Per member.
  uint64_t executor_errors = 0;
  uint64_t pattern_queries = 0;
  uint64_t pattern_insertions = 0;
  uint64_t coverage_increases = 0;
  uint64_t coverage_bits = 0;
  uint64_t coverage_edges = 0;
  uint64_t seeds = 0;
  CentiTicks native_ticks = 0;
  CentiTicks sanitized_ticks = 0;
  uint64_t crashes_saved = 0;
  uint64_t audit_collisions = 0;
  uint64_t audit_distinct = 0;
  std::vector<BugReport> bugs;
  std::array<uint64_t, kNumMutationOps> mutation_counts{};
  bool aborted = false;
  std::string abort_reason;

  // Wall-clock measurements; excluded from deterministic output.
  double wall_seconds = 0;
  double digest_seconds = 0;  // Encoding, hashing and registry lookups.
  double extract_seconds = 0;

  CentiTicks total_ticks() const { return native_ticks + sanitized_ticks; }
  // Executions per virtual second.
  double VirtualThroughput() const;
  // Share of loop wall time spent in digest and registry work.
  double DigestTimeShare() const;
};

struct CampaignOutput {
  CampaignStats stats;
  std::vector<ExecRecord> log;
};

using CheckpointFn = std::function<absl::Status(const CampaignStats &)>;

// Runs one campaign. On an environment failure the partial statistics are
// left in `out` (with `aborted` set) and the error is returned.
absl::Status RunCampaign(const CampaignConfig &cfg, CampaignOutput &out,
                         const CheckpointFn &on_checkpoint = nullptr);

}  // namespace patfuzz

#endif  // PATFUZZ_CAMPAIGN_H_
