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

#ifndef PATFUZZ_COMMANDS_H_
#define PATFUZZ_COMMANDS_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "patfuzz/config.h"
#include "patfuzz/report.h"

namespace patfuzz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAbort = 2;

// Environment faults abort (2); bad configs and arguments are usage errors.
int ExitCodeFor(const absl::Status &status);

struct GenTargetArgs {
  uint64_t seed = 0;
  uint32_t edges = 64;
  uint32_t bugs = 0;  // 0 keeps the generator's 1..5 range.
  std::string out;
};

int CmdGenTarget(const GenTargetArgs &args, std::ostream &out);
int CmdRun(const Config &cfg, std::ostream &out);
int CmdBench(const Config &cfg, std::ostream &out);
int CmdCompare(const Config &cfg, std::ostream &out);

ReportHeader HeaderFor(const Config &cfg);

// The pieces behind the commands, without printing.
struct CampaignRun {
  CampaignResult result;
  absl::Status status;
};

// Runs `strategy` on `target` and computes ratios when the config asks.
CampaignRun RunOne(const Config &cfg, const ResolvedTarget &target,
                   Strategy strategy, uint32_t repetition,
                   const std::string &output_dir);

// Every strategy on every target with paired seeds rng_seed + repetition.
// Results are ordered by target, repetition, then strategy whatever the
// number of jobs.
std::vector<CampaignRun> RunComparison(const Config &cfg,
                                       const std::vector<ResolvedTarget> &targets);

// Records cfg.bench.corpus_size inputs from a NativeOnly campaign into
// `corpus_dir`.
absl::Status RecordCorpus(const Config &cfg, const ResolvedTarget &target,
                          const std::string &corpus_dir);

// Replays every file of `corpus_dir` on the native target, then on each pool
// member alone.
absl::StatusOr<std::vector<BenchRow>> ReplayCorpus(
    const ResolvedTarget &target, const std::string &corpus_dir);

}  // namespace patfuzz

#endif  // PATFUZZ_COMMANDS_H_
