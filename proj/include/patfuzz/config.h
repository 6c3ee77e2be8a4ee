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

#ifndef PATFUZZ_CONFIG_H_
#define PATFUZZ_CONFIG_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "patfuzz/campaign.h"
#include "patfuzz/suite.h"
#include "patfuzz/target_generator.h"

namespace patfuzz {

enum class TargetSource { kFile, kGenerate, kSuite, kCommand };

struct CommandConfig {
  std::vector<std::string> argv;
  InputDelivery delivery = InputDelivery::kStdin;
  size_t bitmap_size = 0;
  uint32_t timeout_ms = 1000;
};

struct TargetConfig {
  TargetSource source = TargetSource::kGenerate;
  std::string path;          // kFile.
  GeneratorParams generate;  // kGenerate.
  SuiteOptions suite;        // kSuite.
  // Extra single-bug order-sensitive targets appended to the suite.
  std::vector<uint64_t> order_sensitive;
  CommandConfig command;     // kCommand.
};

struct PoolMemberConfig {
  std::string id;
  BugClassSet classes;
  // Absent: an in-process member over the synthetic fuzz target.
  std::optional<CommandConfig> command;
};

// One in-process member per bug class, named after it.
std::vector<PoolMemberConfig> DefaultPoolConfig();

struct BenchConfig {
  uint64_t corpus_size = 100000;
  // Empty: <output_dir>/corpus.
  std::string corpus_dir;
};

struct CompareConfig {
  std::vector<Strategy> strategies = {kAllStrategies.begin(),
                                      kAllStrategies.end()};
  uint32_t reps = 5;
  uint32_t jobs = 1;
};

struct Config {
  Strategy strategy = Strategy::kPatternSet;
  uint64_t max_execs = 100000;
  uint64_t max_ticks = 0;
  uint64_t rng_seed = 0;
  // Edge map size for command targets; synthetic targets carry their own.
  size_t map_size = kDefaultMapSize;
  ClockMode clock = ClockMode::kVirtual;
  MutatorConfig mutator;
  uint64_t checkpoint_every = 0;
  bool parallel_dispatch = false;
  bool collision_audit = false;
  bool queue_crashes = false;
  // Keep the execution log and emit unique-pattern ratios.
  bool ratios = true;

  TargetConfig target;
  // Absent from the file: one in-process member per bug class.
  std::vector<PoolMemberConfig> pool = DefaultPoolConfig();
  // Slowdown factors for in-process members; absent keeps the target's.
  std::optional<SlowdownTable> slowdowns;
  // Seed files or directories; empty starts from one zero input.
  std::vector<std::string> seeds;
  std::string output_dir = "patfuzz-out";

  BenchConfig bench;
  CompareConfig compare;
};

// `origin` names the text in diagnostics; relative paths resolve against
// `base_dir`.
absl::StatusOr<Config> ParseConfig(std::string_view text,
                                   std::string_view origin = "<config>",
                                   const std::string &base_dir = "");
absl::StatusOr<Config> LoadConfig(const std::string &path);

absl::Status ValidateConfig(const Config &cfg);

struct Overrides {
  std::optional<Strategy> strategy;
  std::optional<uint64_t> max_execs;
  std::optional<uint64_t> rng_seed;
  std::optional<std::string> output_dir;
  std::optional<uint64_t> corpus_size;
  std::optional<std::vector<Strategy>> strategies;
  std::optional<uint32_t> reps;
  std::optional<uint32_t> jobs;
};

void ApplyOverrides(Config &cfg, const Overrides &o);

// Canonical YAML of every field; parses back to an equal Config.
std::string EffectiveConfig(const Config &cfg);

// One fuzz target with its pool, ready for a campaign.
struct ResolvedTarget {
  std::string name;
  ExecutorSpec fuzz;
  std::vector<ExecutorSpec> pool;
  size_t map_size = kDefaultMapSize;
  std::vector<ByteArray> seeds;
  std::shared_ptr<const SyntheticTarget> synthetic;  // Null for commands.
};

absl::StatusOr<std::vector<ResolvedTarget>> ResolveTargets(const Config &cfg);

// A campaign over `target` with the config's knobs and `strategy`.
CampaignConfig MakeCampaign(const Config &cfg, const ResolvedTarget &target,
                            Strategy strategy, uint64_t rng_seed);

}  // namespace patfuzz

#endif  // PATFUZZ_CONFIG_H_
