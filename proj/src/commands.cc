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

#include "patfuzz/commands.h"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "patfuzz/ratios.h"
#include "patfuzz/target_io.h"
#include "spdlog/spdlog.h"

namespace patfuzz {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr char kCorpusPrefix[] = "id-";

absl::Status WriteText(const fs::path &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

absl::Status PrepareOutput(const Config &cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", cfg.output_dir, ": ", ec.message()));
  }
  return WriteText(fs::path(cfg.output_dir) / "effective_config.yaml",
                   EffectiveConfig(cfg));
}

int Fail(const absl::Status &s) {
  spdlog::error("{}", std::string(s.message()));
  return ExitCodeFor(s);
}

void PrintCampaign(std::ostream &out, const CampaignResult &r) {
  out << absl::StrFormat(
      "%-16s %-16s rep=%u execs=%d bugs=%d dispatched=%d ticks=%.0f "
      "throughput=%.1f/s%s\n",
      r.target, std::string(StrategyName(r.strategy)), r.repetition,
      r.stats.total_execs, r.stats.bugs.size(), r.stats.dispatched_execs,
      r.stats.total_ticks() / double(kCentiTicksPerTick),
      r.stats.VirtualThroughput(),
      r.stats.aborted ? " ABORTED: " + r.stats.abort_reason : "");
}

}  // namespace

int ExitCodeFor(const absl::Status &status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kExitUsage;
    default:
      return kExitAbort;
  }
}

ReportHeader HeaderFor(const Config &cfg) {
  ReportHeader h;
  h.effective_config = EffectiveConfig(cfg);
  h.config_digest = ConfigDigest(h.effective_config);
  h.rng_seed = cfg.rng_seed;
  return h;
}

CampaignRun RunOne(const Config &cfg, const ResolvedTarget &target,
                   Strategy strategy, uint32_t repetition,
                   const std::string &output_dir) {
  CampaignConfig c = MakeCampaign(cfg, target, strategy,
                                  cfg.rng_seed + repetition);
  c.output_dir = output_dir;
  CampaignOutput out;
  CampaignRun run;
  run.status = RunCampaign(c, out, [&](const CampaignStats &st) {
    spdlog::debug("{} {} rep {}: {} execs, {} bugs", target.name,
                  std::string(StrategyName(strategy)), repetition,
                  st.total_execs, st.bugs.size());
    return absl::OkStatus();
  });
  run.result.target = target.name;
  run.result.strategy = strategy;
  run.result.repetition = repetition;
  run.result.stats = std::move(out.stats);
  run.result.stats.strategy = strategy;
  run.result.stats.rng_seed = c.rng_seed;
  if (!run.status.ok()) {
    run.result.stats.aborted = true;
    run.result.stats.abort_reason = std::string(run.status.message());
    return run;
  }
  if (cfg.ratios) {
    BugOracle oracle = [](ByteSpan) -> absl::StatusOr<bool> { return false; };
    std::unique_ptr<SanitizerDispatcher> pool;
    if (!target.pool.empty()) {
      auto d = SanitizerDispatcher::Create(target.pool);
      if (!d.ok()) {
        run.status = d.status();
        run.result.stats.aborted = true;
        run.result.stats.abort_reason = std::string(run.status.message());
        return run;
      }
      pool = *std::move(d);
      oracle = PoolOracle(*pool);
    }
    out.stats = run.result.stats;
    auto counts = ComputeRatioCounts(out, oracle);
    if (!counts.ok()) {
      run.status = counts.status();
      run.result.stats.aborted = true;
      run.result.stats.abort_reason = std::string(run.status.message());
      return run;
    }
    run.result.ratios = *counts;
  }
  return run;
}

std::vector<CampaignRun> RunComparison(
    const Config &cfg, const std::vector<ResolvedTarget> &targets) {
  struct Task {
    size_t target;
    uint32_t rep;
    Strategy strategy;
  };
  std::vector<Task> tasks;
  for (size_t t = 0; t < targets.size(); ++t) {
    for (uint32_t rep = 0; rep < cfg.compare.reps; ++rep) {
      for (Strategy s : cfg.compare.strategies) tasks.push_back({t, rep, s});
    }
  }
  std::vector<CampaignRun> runs(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      const Task &task = tasks[i];
      runs[i] = RunOne(cfg, targets[task.target], task.strategy, task.rep, "");
      if (!runs[i].status.ok()) {
        spdlog::error("{} {} rep {}: {}", targets[task.target].name,
                      std::string(StrategyName(task.strategy)), task.rep,
                      std::string(runs[i].status.message()));
      }
    }
  };
  const size_t jobs =
      std::max<size_t>(1, std::min<size_t>(cfg.compare.jobs, tasks.size()));
  std::vector<std::thread> threads;
  for (size_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread &t : threads) t.join();
  return runs;
}

absl::Status RecordCorpus(const Config &cfg, const ResolvedTarget &target,
                          const std::string &corpus_dir) {
  std::error_code ec;
  fs::create_directories(corpus_dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create corpus ", corpus_dir, ": ", ec.message()));
  }
  // Only files this command wrote may be replaced.
  std::vector<fs::path> stale;
  for (const auto &entry : fs::directory_iterator(corpus_dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (!absl::StartsWith(name, kCorpusPrefix)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "corpus directory ", corpus_dir, " holds foreign file ", name));
    }
    stale.push_back(entry.path());
  }
  for (const fs::path &p : stale) fs::remove(p, ec);

  CampaignConfig c = MakeCampaign(cfg, target, Strategy::kNativeOnly,
                                  cfg.rng_seed);
  c.max_execs = cfg.bench.corpus_size;
  c.max_ticks = 0;
  c.exec_log = true;
  CampaignOutput out;
  if (auto s = RunCampaign(c, out); !s.ok()) return s;
  for (const ExecRecord &r : out.log) {
    const fs::path p = fs::path(corpus_dir) /
                       absl::StrFormat("%s%08d", kCorpusPrefix, r.exec_index);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char *>(r.input.data()),
            static_cast<std::streamsize>(r.input.size()));
    f.close();
    if (!f) return absl::UnavailableError(absl::StrCat("cannot write ", p.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<BenchRow>> ReplayCorpus(
    const ResolvedTarget &target, const std::string &corpus_dir) {
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(corpus_dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot list corpus ", corpus_dir, ": ", ec.message()));
  }
  std::sort(files.begin(), files.end());
  std::vector<ByteArray> corpus;
  for (const fs::path &p : files) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return absl::UnavailableError(absl::StrCat("cannot read ", p.string()));
    corpus.emplace_back(std::istreambuf_iterator<char>(f),
                        std::istreambuf_iterator<char>());
  }

  std::vector<BenchRow> rows;
  auto fuzz = MakeFuzzExecutor(target.fuzz, target.map_size);
  if (!fuzz.ok()) return fuzz.status();
  Bitmap bitmap(target.map_size);
  BenchRow native{target.fuzz.id, "", corpus.size(), 0, 0};
  auto start = Clock::now();
  for (const ByteArray &in : corpus) {
    auto r = (*fuzz)->Run(in, bitmap);
    if (!r.ok()) return r.status();
    native.ticks += r->cost;
  }
  native.wall_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  rows.push_back(native);

  for (const ExecutorSpec &m : target.pool) {
    auto d = SanitizerDispatcher::Create({m});
    if (!d.ok()) return d.status();
    BenchRow row{m.id, m.classes.ToString(), corpus.size(), 0, 0};
    start = Clock::now();
    for (const ByteArray &in : corpus) {
      const std::vector<SanitizerVerdict> v = (*d)->Dispatch(in);
      if (v[0].outcome == VerdictOutcome::kExecutorError) {
        return absl::UnavailableError(
            absl::StrCat("pool member '", m.id, "': ", v[0].error));
      }
      row.ticks += v[0].cost;
    }
    row.wall_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

int CmdGenTarget(const GenTargetArgs &args, std::ostream &out) {
  if (args.out.empty()) return Fail(absl::InvalidArgumentError("--out is required"));
  GeneratorParams p;
  p.seed = args.seed;
  p.max_edges = args.edges;
  if (args.bugs != 0) p.min_bugs = p.max_bugs = args.bugs;
  auto t = GenerateTarget(p);
  if (!t.ok()) {
    return Fail(absl::InvalidArgumentError(std::string(t.status().message())));
  }
  if (auto s = SaveTarget(*t, args.out); !s.ok()) return Fail(s);
  out << absl::StrFormat("%s: %d edges, %d bugs, input size %d -> %s\n",
                         t->name, t->edges.size(), t->bugs.size(),
                         t->input_size, args.out);
  return kExitOk;
}

int CmdRun(const Config &cfg, std::ostream &out) {
  if (auto s = ValidateConfig(cfg); !s.ok()) return Fail(s);
  auto targets = ResolveTargets(cfg);
  if (!targets.ok()) return Fail(targets.status());
  if (auto s = PrepareOutput(cfg); !s.ok()) return Fail(s);
  std::vector<CampaignResult> results;
  bool aborted = false;
  for (const ResolvedTarget &t : *targets) {
    const std::string dir = targets->size() == 1
                                ? cfg.output_dir
                                : (fs::path(cfg.output_dir) / t.name).string();
    CampaignRun run = RunOne(cfg, t, cfg.strategy, 0, dir);
    if (!run.status.ok()) {
      spdlog::error("{}: {}", t.name, std::string(run.status.message()));
      // A config the campaign itself rejects is a usage error.
      if (ExitCodeFor(run.status) == kExitUsage && !run.result.stats.aborted) {
        return kExitUsage;
      }
      aborted = true;
    }
    PrintCampaign(out, run.result);
    results.push_back(std::move(run.result));
  }
  if (auto s = EmitReports(cfg.output_dir, HeaderFor(cfg), results); !s.ok()) {
    return Fail(s);
  }
  return aborted ? kExitAbort : kExitOk;
}

int CmdBench(const Config &cfg, std::ostream &out) {
  if (auto s = ValidateConfig(cfg); !s.ok()) return Fail(s);
  auto targets = ResolveTargets(cfg);
  if (!targets.ok()) return Fail(targets.status());
  if (targets->size() != 1) {
    return Fail(absl::InvalidArgumentError(
        "bench needs a config naming exactly one fuzz target"));
  }
  if (auto s = PrepareOutput(cfg); !s.ok()) return Fail(s);
  const ResolvedTarget &target = targets->front();
  const std::string corpus = cfg.bench.corpus_dir.empty()
                                 ? (fs::path(cfg.output_dir) / "corpus").string()
                                 : cfg.bench.corpus_dir;
  if (auto s = RecordCorpus(cfg, target, corpus); !s.ok()) {
    spdlog::error("{}", std::string(s.message()));
    return kExitAbort;
  }
  auto rows = ReplayCorpus(target, corpus);
  if (!rows.ok()) {
    spdlog::error("{}", std::string(rows.status().message()));
    return kExitAbort;
  }
  if (auto s = EmitBenchReport(cfg.output_dir, HeaderFor(cfg), *rows); !s.ok()) {
    return Fail(s);
  }
  out << absl::StrFormat("%-12s %-28s %8s %16s %10s %12s %10s\n", "executor",
                         "classes", "execs", "virtual_ticks", "slowdown",
                         "wall_s", "wall_slow");
  for (const BenchRow &r : *rows) {
    out << absl::StrFormat("%-12s %-28s %8d %16.2f %9.3f%% %12.6f %9.1f%%\n",
                           r.executor, r.classes.empty() ? "-" : r.classes,
                           r.execs, r.ticks / double(kCentiTicksPerTick),
                           VirtualSlowdownPercent(r, rows->front()),
                           r.wall_seconds,
                           WallSlowdownPercent(r, rows->front()));
  }
  return kExitOk;
}

int CmdCompare(const Config &cfg, std::ostream &out) {
  if (auto s = ValidateConfig(cfg); !s.ok()) return Fail(s);
  if (cfg.compare.strategies.size() < 2) {
    return Fail(absl::InvalidArgumentError("compare needs at least two strategies"));
  }
  for (Strategy s : cfg.compare.strategies) {
    if (StrategyNeedsPool(s) && cfg.pool.empty()) {
      return Fail(absl::InvalidArgumentError(
          absl::StrCat("strategy ", std::string(StrategyName(s)),
                       " needs a non-empty sanitizer pool")));
    }
  }
  auto targets = ResolveTargets(cfg);
  if (!targets.ok()) return Fail(targets.status());
  if (auto s = PrepareOutput(cfg); !s.ok()) return Fail(s);
  std::vector<CampaignRun> runs = RunComparison(cfg, *targets);
  std::vector<CampaignResult> results;
  bool aborted = false;
  for (CampaignRun &r : runs) {
    aborted = aborted || !r.status.ok();
    results.push_back(std::move(r.result));
  }
  if (auto s = EmitReports(cfg.output_dir, HeaderFor(cfg), results); !s.ok()) {
    return Fail(s);
  }
  out << absl::StrFormat("%-18s %6s %6s %6s %10s %12s %14s\n", "strategy",
                         "found", "missed", "added", "execs", "dispatches",
                         "throughput/s");
  for (const ComparisonRow &row : Compare(results)) {
    if (row.scope != kSuiteScope) continue;
    out << absl::StrFormat("%-18s %6d %6d %6d %10d %12d %14.1f\n",
                           std::string(StrategyName(row.strategy)), row.found,
                           row.missed, row.additional, row.executions,
                           row.dispatches, row.VirtualThroughput());
  }
  return aborted ? kExitAbort : kExitOk;
}

}  // namespace patfuzz
