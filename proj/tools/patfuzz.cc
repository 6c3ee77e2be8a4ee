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

// patfuzz command-line entry point.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_split.h"
#include "patfuzz/commands.h"
#include "patfuzz/config.h"
#include "spdlog/spdlog.h"

namespace {

using namespace patfuzz;

constexpr char kOutputRootEnv[] = "PATFUZZ_OUTPUT_ROOT";
constexpr char kLogLevelEnv[] = "PATFUZZ_LOG_LEVEL";

void SetupLogging() {
  spdlog::set_pattern("patfuzz: %l: %v");
  const char *level = std::getenv(kLogLevelEnv);
  spdlog::set_level(level ? spdlog::level::from_str(level)
                          : spdlog::level::info);
}

std::optional<Config> Load(const std::string &path, const Overrides &o) {
  auto cfg = LoadConfig(path);
  if (!cfg.ok()) {
    spdlog::error("{}", std::string(cfg.status().message()));
    return std::nullopt;
  }
  ApplyOverrides(*cfg, o);
  const char *root = std::getenv(kOutputRootEnv);
  if (root != nullptr && *root != '\0' &&
      std::filesystem::path(cfg->output_dir).is_relative()) {
    cfg->output_dir = (std::filesystem::path(root) / cfg->output_dir).string();
  }
  return *cfg;
}

}  // namespace

int main(int argc, char **argv) {
  SetupLogging();
  CLI::App app{"patfuzz: coverage-guided fuzzing with pattern-gated sanitizers"};
  app.require_subcommand(1);

  GenTargetArgs gen;
  CLI::App *gen_cmd = app.add_subcommand("gen-target", "Generate a synthetic target");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--edges", gen.edges, "Edge budget")->check(CLI::Range(8u, 1u << 20));
  gen_cmd->add_option("--bugs", gen.bugs, "Exact bug count (default 1-5)");
  gen_cmd->add_option("--out", gen.out, "Target file to write")->required();

  std::string config_path;
  Overrides o;
  std::string strategy, strategies;

  CLI::App *run_cmd = app.add_subcommand("run", "Run one campaign");
  CLI::App *bench_cmd = app.add_subcommand("bench", "Replay-benchmark executor overhead");
  CLI::App *cmp_cmd = app.add_subcommand("compare", "Paired strategy comparison");
  for (CLI::App *c : {run_cmd, bench_cmd, cmp_cmd}) {
    c->add_option("--config", config_path, "YAML config file")->required();
    c->add_option("--rng-seed", o.rng_seed, "Override rng_seed");
    c->add_option("--out", o.output_dir, "Override output_dir");
  }
  run_cmd->add_option("--strategy", strategy, "Override strategy");
  run_cmd->add_option("--budget", o.max_execs, "Override the execution budget");
  bench_cmd->add_option("--corpus-size", o.corpus_size, "Inputs to record and replay");
  cmp_cmd->add_option("--strategies", strategies, "Comma-separated strategies");
  cmp_cmd->add_option("--reps", o.reps, "Repetitions per strategy");
  cmp_cmd->add_option("--jobs", o.jobs, "Campaigns run in parallel");
  cmp_cmd->add_option("--budget", o.max_execs, "Override the execution budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*gen_cmd) return CmdGenTarget(gen, std::cout);

  auto strategy_of = [](const std::string &name) -> std::optional<Strategy> {
    auto s = ParseStrategy(name);
    if (!s) spdlog::error("unknown strategy '{}'", name);
    return s;
  };
  if (!strategy.empty()) {
    o.strategy = strategy_of(strategy);
    if (!o.strategy) return kExitUsage;
  }
  if (!strategies.empty()) {
    o.strategies.emplace();
    for (absl::string_view name : absl::StrSplit(strategies, ',')) {
      auto s = strategy_of(std::string(name));
      if (!s) return kExitUsage;
      o.strategies->push_back(*s);
    }
  }
  std::optional<Config> cfg = Load(config_path, o);
  if (!cfg) return kExitUsage;
  if (*run_cmd) return CmdRun(*cfg, std::cout);
  if (*bench_cmd) return CmdBench(*cfg, std::cout);
  return CmdCompare(*cfg, std::cout);
}
