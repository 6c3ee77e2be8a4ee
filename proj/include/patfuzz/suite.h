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

#ifndef PATFUZZ_SUITE_H_
#define PATFUZZ_SUITE_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "absl/status/statusor.h"
#include "patfuzz/campaign.h"
#include "patfuzz/target_generator.h"

namespace patfuzz {

inline constexpr uint32_t kDefaultSuiteSize = 50;
inline constexpr size_t kSuiteMapSize = 4096;

struct SuiteOptions {
  uint32_t targets = kDefaultSuiteSize;
  uint64_t first_seed = 0;
  size_t map_size = kSuiteMapSize;
};

// Generator parameters of suite member `index`.
GeneratorParams SuiteParams(const SuiteOptions &opts, uint32_t index);

absl::StatusOr<std::vector<std::shared_ptr<const SyntheticTarget>>>
GenerateSuite(const SuiteOptions &opts);

// Parameters for a target with a single order-sensitive bug; its triggering
// runs share Set patterns with clean runs that visit the same loop bodies in
// the other order.
GeneratorParams OrderSensitiveParams(uint64_t seed, size_t map_size);

// In-process executors over `target`: the fuzz target and the default pool
// of one executor per bug class ("address", "undefined", "memory").
ExecutorSpec SyntheticFuzzSpec(std::shared_ptr<const SyntheticTarget> target);
std::vector<ExecutorSpec> DefaultPool(
    std::shared_ptr<const SyntheticTarget> target);

// A campaign over `target` seeded with one all-zero input.
CampaignConfig SyntheticCampaign(std::shared_ptr<const SyntheticTarget> target,
                                 Strategy strategy, uint64_t rng_seed,
                                 uint64_t max_execs);

}  // namespace patfuzz

#endif  // PATFUZZ_SUITE_H_
