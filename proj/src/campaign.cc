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

#include "patfuzz/campaign.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "patfuzz/bitmap.h"
#include "patfuzz/crash_store.h"
#include "patfuzz/pattern.h"
#include "patfuzz/pattern_registry.h"
#include "patfuzz/seed_pool.h"

namespace patfuzz {

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kNativeOnly:
      return "native";
    case Strategy::kSanitizeAll:
      return "sanitize_all";
    case Strategy::kPostProcessCoverage:
      return "post_coverage";
    case Strategy::kPatternHitCount:
      return "pattern_hitcount";
    case Strategy::kPatternSet:
      return "pattern_set";
  }
  return "?";
}

std::optional<Strategy> ParseStrategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  return std::nullopt;
}

bool StrategyNeedsPool(Strategy s) { return s != Strategy::kNativeOnly; }

double CampaignStats::VirtualThroughput() const {
  const CentiTicks t = total_ticks();
  if (t == 0) return 0;
  return static_cast<double>(total_execs) * 1e6 * kCentiTicksPerTick /
         static_cast<double>(t);
}

double CampaignStats::DigestTimeShare() const {
  return wall_seconds > 0 ? digest_seconds / wall_seconds : 0;
}

absl::Status ValidateCampaignConfig(const CampaignConfig &cfg) {
  if (auto s = ValidateMapSize(cfg.map_size); !s.ok()) return s;
  if (auto s = ValidateExecutors(cfg.fuzz, cfg.pool); !s.ok()) return s;
  if (StrategyNeedsPool(cfg.strategy) && cfg.pool.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("strategy ", std::string(StrategyName(cfg.strategy)),
                     " needs a non-empty sanitizer pool"));
  }
  if (!StrategyNeedsPool(cfg.strategy) && !cfg.pool.empty()) {
    return absl::InvalidArgumentError(
        "strategy native must not have a sanitizer pool");
  }
  if (cfg.max_execs == 0 && cfg.max_ticks == 0) {
    return absl::InvalidArgumentError(
        "no budget: set max_execs and/or max_ticks");
  }
  if (cfg.initial_seeds.empty()) {
    return absl::InvalidArgumentError("at least one initial seed is required");
  }
  for (const ByteArray &s : cfg.initial_seeds) {
    if (s.empty() || s.size() > cfg.mutator.max_input_len) {
      return absl::InvalidArgumentError(absl::StrCat(
          "initial seed length must be in [1, ", cfg.mutator.max_input_len,
          "]"));
    }
  }
  return ValidateMutatorConfig(cfg.mutator);
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::duration d) {
  return std::chrono::duration<double>(d).count();
}

std::optional<PatternPolicy> PolicyOf(Strategy s) {
  switch (s) {
    case Strategy::kPatternSet:
      return PatternPolicy::kSet;
    case Strategy::kPatternHitCount:
      return PatternPolicy::kHitCountBucketed;
    default:
      return std::nullopt;
  }
}

class Runner {
 public:
  Runner(const CampaignConfig &cfg, CampaignOutput &out,
         const CheckpointFn &checkpoint)
      : cfg_(cfg),
        out_(out),
        stats_(out.stats),
        checkpoint_(checkpoint),
        bitmap_(cfg.map_size),
        virgin_(cfg.map_size),
        set_digester_(PatternPolicy::kSet),
        hit_digester_(PatternPolicy::kHitCountBucketed),
        mutator_(cfg.mutator),
        rng_(cfg.rng_seed),
        crashes_(cfg.output_dir.empty() ? ""
                                        : cfg.output_dir + "/crashes") {
    policy_ = PolicyOf(cfg.strategy);
    wall_ = cfg.clock == ClockMode::kWall;
  }

  absl::Status Run();

 private:
  absl::Status Setup();
  absl::Status Execute(ByteSpan input, std::optional<size_t> parent);
  void Dispatch(ByteSpan input, std::vector<SanitizerVerdict> &verdicts);
  PatternDigest SetDigest();
  absl::Status RecordCrashes(ByteSpan input, const ExecutionResult &r,
                             const std::vector<SanitizerVerdict> &verdicts);
  absl::Status Checkpoint();
  void Finalize();
  bool BudgetLeft() const {
    return (cfg_.max_execs == 0 || stats_.total_execs < cfg_.max_execs) &&
           (cfg_.max_ticks == 0 ||
            stats_.total_ticks() < cfg_.max_ticks * kCentiTicksPerTick);
  }

  const CampaignConfig &cfg_;
  CampaignOutput &out_;
  CampaignStats &stats_;
  const CheckpointFn &checkpoint_;

  std::unique_ptr<FuzzExecutor> fuzz_;
  std::unique_ptr<SanitizerDispatcher> pool_;
  bool fuzz_synthetic_ = false;
  std::vector<bool> member_synthetic_;
  Bitmap bitmap_;
  CoverageMap virgin_;
  std::optional<PatternPolicy> policy_;
  PatternRegistry registry_;
  PatternDigester set_digester_;
  PatternDigester hit_digester_;
  PatternRegistry shadow_set_;
  PatternRegistry shadow_hit_;
  CollisionAudit audit_;
  SeedPool seeds_;
  size_t seeds_persisted_ = 0;
  Mutator mutator_;
  Rng rng_;
  Triage triage_;
  CrashStore crashes_;
  bool wall_ = false;
  // Per-execution scratch.
  std::optional<PatternDigest> set_digest_;
};

absl::Status Runner::Setup() {
  if (auto s = ValidateCampaignConfig(cfg_); !s.ok()) return s;
  auto fuzz = MakeFuzzExecutor(cfg_.fuzz, cfg_.map_size);
  if (!fuzz.ok()) return fuzz.status();
  fuzz_ = *std::move(fuzz);
  fuzz_synthetic_ = cfg_.fuzz.kind == ExecutorKind::kInProcessSynthetic;
  auto pool = SanitizerDispatcher::Create(cfg_.pool, cfg_.parallel_dispatch);
  if (!pool.ok()) return pool.status();
  pool_ = *std::move(pool);
  for (const ExecutorSpec &m : cfg_.pool) {
    member_synthetic_.push_back(m.kind == ExecutorKind::kInProcessSynthetic);
    stats_.dispatches.emplace_back(m.id, 0);
  }
  if (!cfg_.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg_.output_dir + "/queue", ec);
    if (ec) {
      return absl::UnavailableError(absl::StrCat(
          "cannot create ", cfg_.output_dir, "/queue: ", ec.message()));
    }
  }
  return crashes_.Init();
}

PatternDigest Runner::SetDigest() {
  if (!set_digest_) {
    auto d = set_digester_.Digest(bitmap_, nullptr);
    set_digest_ = d.ok() ? *d : PatternDigest{};
  }
  return *set_digest_;
}

void Runner::Dispatch(ByteSpan input, std::vector<SanitizerVerdict> &verdicts) {
  verdicts = pool_->Dispatch(input);
  ++stats_.dispatched_execs;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    ++stats_.dispatches[i].second;
    stats_.sanitized_ticks += verdicts[i].cost;
    if (verdicts[i].outcome == VerdictOutcome::kExecutorError) {
      ++stats_.executor_errors;
    }
  }
}

absl::Status Runner::RecordCrashes(
    ByteSpan input, const ExecutionResult &r,
    const std::vector<SanitizerVerdict> &verdicts) {
  CrashEvent event;
  event.exec_index = r.exec_index;
  event.tick = stats_.total_ticks();
  event.input_digest = DigestBytes(input);
  std::vector<BugKey> all;
  auto key = [&](bool synthetic, uint64_t id) {
    return synthetic ? GroundTruthKey(id) : ExternalKey(id, SetDigest());
  };
  if (r.status == ExecStatus::kCrash) {
    event.detector = cfg_.fuzz.id;
    event.keys = {key(fuzz_synthetic_, r.crash_id)};
    triage_.Ingest(event);
    all.push_back(event.keys[0]);
  }
  for (size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i].outcome != VerdictOutcome::kCrash) continue;
    event.detector = verdicts[i].executor_id;
    event.keys.clear();
    for (uint64_t id : verdicts[i].crash_ids) {
      event.keys.push_back(key(member_synthetic_[i], id));
    }
    triage_.Ingest(event);
    all.insert(all.end(), event.keys.begin(), event.keys.end());
  }
  if (all.empty()) return absl::OkStatus();
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  CrashSidecar sidecar{r.exec_index, event.tick,
                       std::string(StrategyName(cfg_.strategy)), r.status,
                       r.crash_id, verdicts, all};
  auto saved = crashes_.Save(input, sidecar);
  if (!saved.ok()) return saved.status();
  return absl::OkStatus();
}

absl::Status Runner::Execute(ByteSpan input, std::optional<size_t> parent) {
  auto result = fuzz_->Run(input, bitmap_);
  if (!result.ok()) return result.status();
  const ExecutionResult &r = *result;
  set_digest_.reset();
  ++stats_.total_execs;
  stats_.native_ticks += r.cost;

  ExecRecord rec;
  if (cfg_.exec_log) {
    rec.exec_index = r.exec_index;
    rec.input.assign(input.begin(), input.end());
    rec.status = r.status;
    rec.crash_id = r.crash_id;
    rec.cost = r.cost;
  }
  std::vector<SanitizerVerdict> verdicts;

  if (r.status == ExecStatus::kTimeout) {
    ++stats_.timeouts;
    if (!parent) {
      seeds_.Add(Seed{ByteArray(input.begin(), input.end()), r.exec_index,
                      r.cost, false});
    }
    if (cfg_.exec_log) out_.log.push_back(std::move(rec));
    return absl::OkStatus();
  }
  if (r.status == ExecStatus::kCrash) ++stats_.native_crashes;

  bool dispatch = false;
  if (policy_) {
    PatternDigester &d = *policy_ == PatternPolicy::kSet ? set_digester_
                                                         : hit_digester_;
    PatternDigest digest;
    if (wall_) {
      const auto t0 = Clock::now();
      auto s = d.Extract(bitmap_, nullptr);
      const auto t1 = Clock::now();
      digest = d.DigestExtracted();
      dispatch = registry_.IsUnique(digest);
      const auto t2 = Clock::now();
      stats_.extract_seconds += Seconds(t1 - t0);
      stats_.digest_seconds += Seconds(t2 - t1);
      if (!s.ok()) return s;
    } else {
      auto dg = d.Digest(bitmap_, nullptr);
      if (!dg.ok()) return dg.status();
      digest = *dg;
      dispatch = registry_.IsUnique(digest);
    }
    if (*policy_ == PatternPolicy::kSet) set_digest_ = digest;
    if (cfg_.collision_audit) audit_.Record(digest, d.last_encoding());
  } else if (cfg_.strategy == Strategy::kSanitizeAll) {
    dispatch = true;
  }

  if (cfg_.exec_log) {
    if (policy_ == PatternPolicy::kSet) {
      rec.set_unique = dispatch;
    } else {
      rec.set_unique = shadow_set_.IsUnique(SetDigest());
    }
    if (policy_ == PatternPolicy::kHitCountBucketed) {
      rec.hit_unique = dispatch;
    } else {
      auto hd = hit_digester_.Digest(bitmap_, nullptr);
      if (!hd.ok()) return hd.status();
      rec.hit_unique = shadow_hit_.IsUnique(*hd);
    }
  }

  if (dispatch) {
    Dispatch(input, verdicts);
    if (r.status == ExecStatus::kCrash) ++stats_.native_crash_dispatches;
  }

  // A crash, native or flagged by a dispatched sanitizer, still updates the
  // coverage map but goes to the crash store instead of the queue unless
  // configured otherwise.
  bool crashed = r.status == ExecStatus::kCrash;
  for (const SanitizerVerdict &v : verdicts) {
    crashed |= v.outcome == VerdictOutcome::kCrash;
  }
  if (cfg_.queue_crashes) crashed = false;
  bool increased = false;
  if (auto s = virgin_.Update(bitmap_, increased); !s.ok()) return s;
  if (increased) ++stats_.coverage_increases;

  if (auto s = RecordCrashes(input, r, verdicts); !s.ok()) return s;

  if (!parent || (increased && !crashed)) {
    seeds_.Add(Seed{ByteArray(input.begin(), input.end()), r.exec_index,
                    r.cost, parent.has_value()});
    if (parent) seeds_.MarkFavored(*parent);
  }
  if (cfg_.exec_log) {
    rec.cov_increase = increased;
    rec.dispatched = dispatch;
    out_.log.push_back(std::move(rec));
  }
  return absl::OkStatus();
}

absl::Status Runner::Checkpoint() {
  stats_.seeds = seeds_.size();
  stats_.coverage_bits = virgin_.CoveredBits();
  stats_.coverage_edges = virgin_.CoveredEdges();
  stats_.bugs = triage_.Reports();
  stats_.pattern_queries = registry_.queried_count();
  stats_.pattern_insertions = registry_.inserted_count();
  stats_.crashes_saved = crashes_.size();
  stats_.audit_collisions = audit_.collisions();
  stats_.audit_distinct = audit_.distinct_patterns();
  stats_.mutation_counts = mutator_.op_counts();
  if (!cfg_.output_dir.empty()) {
    for (; seeds_persisted_ < seeds_.size(); ++seeds_persisted_) {
      const Seed &s = seeds_[seeds_persisted_];
      const std::string path =
          absl::StrFormat("%s/queue/id-%06d-exec-%d", cfg_.output_dir,
                          seeds_persisted_, s.exec_index);
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      f.write(reinterpret_cast<const char *>(s.input.data()),
              static_cast<std::streamsize>(s.input.size()));
      if (!f) return absl::UnavailableError(absl::StrCat("cannot write ", path));
    }
  }
  if (checkpoint_) return checkpoint_(stats_);
  return absl::OkStatus();
}

absl::Status Runner::Run() {
  stats_ = CampaignStats();
  stats_.strategy = cfg_.strategy;
  stats_.rng_seed = cfg_.rng_seed;
  out_.log.clear();
  const auto start = Clock::now();
  auto finish = [&](absl::Status status) {
    stats_.wall_seconds = Seconds(Clock::now() - start);
    if (!status.ok()) {
      stats_.aborted = true;
      stats_.abort_reason = std::string(status.message());
    }
    absl::Status cp = Checkpoint();
    return status.ok() ? cp : status;
  };
  if (auto s = Setup(); !s.ok()) return s;
  if (cfg_.exec_log) out_.log.reserve(cfg_.max_execs);

  for (const ByteArray &seed : cfg_.initial_seeds) {
    if (!BudgetLeft()) break;
    if (auto s = Execute(seed, std::nullopt); !s.ok()) return finish(s);
  }
  ByteArray mutant;
  while (BudgetLeft()) {
    auto pick = seeds_.Select();
    if (!pick.ok()) return finish(pick.status());
    const size_t partner = rng_.Below(seeds_.size());
    mutator_.Mutate(seeds_[*pick].input, seeds_[partner].input, rng_, mutant);
    if (auto s = Execute(mutant, *pick); !s.ok()) return finish(s);
    if (cfg_.checkpoint_every != 0 &&
        stats_.total_execs % cfg_.checkpoint_every == 0) {
      if (auto s = Checkpoint(); !s.ok()) return finish(s);
    }
  }

  if (cfg_.strategy == Strategy::kPostProcessCoverage) {
    std::vector<SanitizerVerdict> verdicts;
    Bitmap scratch(cfg_.map_size);
    for (size_t i = 0; i < seeds_.size(); ++i) {
      const Seed &seed = seeds_[i];
      Dispatch(seed.input, verdicts);
      ++stats_.post_dispatched;
      ExecutionResult r;
      r.exec_index = seed.exec_index;
      // External keys need the seed's own pattern.
      if (std::find(member_synthetic_.begin(), member_synthetic_.end(),
                    false) != member_synthetic_.end()) {
        auto rerun = fuzz_->Run(seed.input, bitmap_);
        if (!rerun.ok()) return finish(rerun.status());
        set_digest_.reset();
      }
      if (auto s = RecordCrashes(seed.input, r, verdicts); !s.ok()) {
        return finish(s);
      }
    }
  }
  return finish(absl::OkStatus());
}

}  // namespace

absl::Status RunCampaign(const CampaignConfig &cfg, CampaignOutput &out,
                         const CheckpointFn &on_checkpoint) {
  Runner runner(cfg, out, on_checkpoint);
  return runner.Run();
}

}  // namespace patfuzz
