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

#include "patfuzz/suite.h"

#include <algorithm>
#include <atomic>
#include <thread>
#include <utility>

namespace patfuzz {

GeneratorParams SuiteParams(const SuiteOptions &opts, uint32_t index) {
  GeneratorParams p;
  p.seed = opts.first_seed + index;
  p.map_size = opts.map_size;
  return p;
}

absl::StatusOr<std::vector<std::shared_ptr<const SyntheticTarget>>>
GenerateSuite(const SuiteOptions &opts) {
  // Targets are independent; generate them on all cores.
  std::vector<absl::StatusOr<SyntheticTarget>> built(
      opts.targets, absl::UnknownError("not generated"));
  std::atomic<uint32_t> next{0};
  auto worker = [&] {
    for (uint32_t i = next++; i < opts.targets; i = next++) {
      built[i] = GenerateTarget(SuiteParams(opts, i));
    }
  };
  const uint32_t jobs = std::clamp<uint32_t>(
      std::thread::hardware_concurrency(), 1, std::max(opts.targets, 1u));
  std::vector<std::thread> threads;
  for (uint32_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread &t : threads) t.join();

  std::vector<std::shared_ptr<const SyntheticTarget>> suite;
  for (auto &t : built) {
    if (!t.ok()) return t.status();
    suite.push_back(std::make_shared<const SyntheticTarget>(*std::move(t)));
  }
  return suite;
}

GeneratorParams OrderSensitiveParams(uint64_t seed, size_t map_size) {
  GeneratorParams p;
  p.seed = seed;
  p.map_size = map_size;
  p.min_bugs = 1;
  p.max_bugs = 1;
  p.trigger_kinds = {TriggerKind::kOrderSensitive};
  p.native_percent = 0;
  return p;
}

ExecutorSpec SyntheticFuzzSpec(std::shared_ptr<const SyntheticTarget> target) {
  ExecutorSpec s;
  s.id = "native";
  s.kind = ExecutorKind::kInProcessSynthetic;
  s.role = ExecutorRole::kFuzzTarget;
  s.target = std::move(target);
  return s;
}

std::vector<ExecutorSpec> DefaultPool(
    std::shared_ptr<const SyntheticTarget> target) {
  std::vector<ExecutorSpec> pool;
  for (BugClass c : kAllBugClasses) {
    ExecutorSpec s;
    s.id = std::string(BugClassName(c));
    s.kind = ExecutorKind::kInProcessSynthetic;
    s.role = ExecutorRole::kSanitizerTarget;
    s.target = target;
    s.classes = BugClassSet{c};
    pool.push_back(std::move(s));
  }
  return pool;
}

CampaignConfig SyntheticCampaign(std::shared_ptr<const SyntheticTarget> target,
                                 Strategy strategy, uint64_t rng_seed,
                                 uint64_t max_execs) {
  CampaignConfig c;
  c.strategy = strategy;
  c.rng_seed = rng_seed;
  c.max_execs = max_execs;
  c.map_size = target->map_size;
  c.initial_seeds = {ByteArray(target->input_size, 0)};
  if (StrategyNeedsPool(strategy)) c.pool = DefaultPool(target);
  c.fuzz = SyntheticFuzzSpec(std::move(target));
  return c;
}

}  // namespace patfuzz
