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

#include <filesystem>
#include <map>
#include <set>

#include "absl/strings/str_format.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "patfuzz/bitmap.h"
#include "patfuzz/campaign.h"
#include "patfuzz/mutator.h"
#include "patfuzz/pattern.h"
#include "patfuzz/seed_pool.h"
#include "patfuzz/suite.h"
#include "patfuzz/target_generator.h"

namespace patfuzz {
namespace {

using ::testing::ElementsAreArray;

Seed MakeSeed(uint8_t b) { return Seed{ByteArray{b}, 0, 0, false}; }

TEST(SeedPoolTest, EmptyPoolIsAnError) {
  SeedPool pool;
  EXPECT_EQ(pool.Select().status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(SeedPoolTest, SingleSeedRepeats) {
  SeedPool pool;
  pool.Add(MakeSeed(1));
  for (int i = 0; i < 5; ++i) EXPECT_EQ(*pool.Select(), 0u);
}

TEST(SeedPoolTest, RoundRobinWithoutFavored) {
  SeedPool pool;
  for (uint8_t b = 0; b < 3; ++b) pool.Add(MakeSeed(b));
  std::vector<size_t> got;
  for (int i = 0; i < 7; ++i) got.push_back(*pool.Select());
  EXPECT_THAT(got, ElementsAreArray({0, 1, 2, 0, 1, 2, 0}));
}

// Reference transcript: s1 is favored and s3 admitted during the first
// cycle; both take effect when the second cycle is built, and the favored
// flag is consumed by it.
TEST(SeedPoolTest, ReferenceTranscriptWithMidCycleChanges) {
  SeedPool pool;
  for (uint8_t b = 0; b < 3; ++b) pool.Add(MakeSeed(b));
  std::vector<size_t> got;
  got.push_back(*pool.Select());
  got.push_back(*pool.Select());
  pool.MarkFavored(1);
  pool.Add(MakeSeed(3));
  for (int i = 0; i < 9; ++i) got.push_back(*pool.Select());
  EXPECT_THAT(got, ElementsAreArray({0, 1, 2, 1, 0, 2, 3, 0, 1, 2, 3}));
  EXPECT_EQ(pool.cycles(), 3u);
}

TEST(MutatorTest, ZeroStackIsIdentity) {
  Mutator m{MutatorConfig{}};
  Rng rng(1);
  const ByteArray seed = {1, 2, 3, 4, 5};
  ByteArray out;
  m.MutateStacked(seed, seed, 0, rng, out);
  EXPECT_EQ(out, seed);
}

TEST(MutatorTest, BitFlipOnZeroByteSetsOneBit) {
  Mutator m{MutatorConfig{}};
  std::set<uint8_t> seen;
  for (uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    ByteArray data = {0};
    m.Apply(MutationOp::kBitFlip, {}, rng, data);
    ASSERT_EQ(data.size(), 1u);
    ASSERT_EQ(__builtin_popcount(data[0]), 1);
    seen.insert(data[0]);
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(MutatorTest, OutputLengthStaysInBounds) {
  MutatorConfig cfg;
  cfg.max_input_len = 64;
  Mutator m(cfg);
  Rng rng(3);
  ByteArray seed(60, 7);
  const ByteArray other(64, 9);
  ByteArray out;
  for (int i = 0; i < 20000; ++i) {
    m.Mutate(seed, other, rng, out);
    ASSERT_GE(out.size(), 1u);
    ASSERT_LE(out.size(), 64u);
    if (i % 7 == 0) seed = out;
  }
}

TEST(MutatorTest, DeterministicForEqualRngState) {
  Mutator a{MutatorConfig{}};
  Mutator b{MutatorConfig{}};
  Rng ra(42), rb(42);
  const ByteArray seed(100, 0);
  ByteArray oa, ob;
  for (int i = 0; i < 1000; ++i) {
    a.Mutate(seed, seed, ra, oa);
    b.Mutate(seed, seed, rb, ob);
    ASSERT_EQ(oa, ob);
  }
}

TEST(MutatorTest, OperatorFrequenciesFollowWeights) {
  const MutatorConfig cfg;
  Mutator m(cfg);
  Rng rng(11);
  const ByteArray seed(256, 0x41);
  const ByteArray other(256, 0x42);
  ByteArray out;
  for (int i = 0; i < 1000000; ++i) m.MutateStacked(seed, other, 1, rng, out);
  uint64_t total_weight = 0;
  for (uint32_t w : cfg.weights) total_weight += w;
  uint64_t total = 0;
  for (uint64_t c : m.op_counts()) total += c;
  ASSERT_EQ(total, 1000000u);
  for (size_t op = 0; op < kNumMutationOps; ++op) {
    const double expected =
        static_cast<double>(cfg.weights[op]) / total_weight * total;
    const double got = static_cast<double>(m.op_counts()[op]);
    EXPECT_NEAR(got, expected, 0.2 * expected)
        << MutationOpName(static_cast<MutationOp>(op));
  }
}

TEST(MutatorTest, RejectsBadConfig) {
  MutatorConfig cfg;
  cfg.havoc_stack = 0;
  EXPECT_FALSE(ValidateMutatorConfig(cfg).ok());
  cfg = MutatorConfig{};
  cfg.weights.fill(0);
  EXPECT_FALSE(ValidateMutatorConfig(cfg).ok());
}

TEST(StrategyTest, NamesRoundTrip) {
  for (Strategy s : kAllStrategies) {
    EXPECT_EQ(ParseStrategy(StrategyName(s)), s);
  }
  EXPECT_FALSE(ParseStrategy("asan").has_value());
}

std::shared_ptr<const SyntheticTarget> SuiteTarget(uint32_t index) {
  SuiteOptions o;
  auto t = GenerateTarget(SuiteParams(o, index));
  EXPECT_TRUE(t.ok()) << t.status();
  return std::make_shared<const SyntheticTarget>(*t);
}

CampaignOutput RunOk(const CampaignConfig &cfg) {
  CampaignOutput out;
  const absl::Status s = RunCampaign(cfg, out);
  EXPECT_TRUE(s.ok()) << s;
  return out;
}

TEST(CampaignConfigTest, PoolRules) {
  auto t = SuiteTarget(0);
  CampaignConfig cfg = SyntheticCampaign(t, Strategy::kPatternSet, 1, 100);
  cfg.pool.clear();
  EXPECT_EQ(ValidateCampaignConfig(cfg).code(),
            absl::StatusCode::kInvalidArgument);
  cfg = SyntheticCampaign(t, Strategy::kNativeOnly, 1, 100);
  cfg.pool = DefaultPool(t);
  EXPECT_FALSE(ValidateCampaignConfig(cfg).ok());
  cfg = SyntheticCampaign(t, Strategy::kNativeOnly, 1, 0);
  EXPECT_FALSE(ValidateCampaignConfig(cfg).ok());
  cfg = SyntheticCampaign(t, Strategy::kNativeOnly, 1, 100);
  cfg.initial_seeds.clear();
  EXPECT_FALSE(ValidateCampaignConfig(cfg).ok());
  CampaignOutput out;
  EXPECT_FALSE(RunCampaign(cfg, out).ok());
}

TEST(CampaignTest, ExecutionBudgetIsExact) {
  auto t = SuiteTarget(1);
  for (Strategy s : kAllStrategies) {
    CampaignConfig cfg = SyntheticCampaign(t, s, 5, 3001);
    cfg.exec_log = true;
    const CampaignOutput out = RunOk(cfg);
    EXPECT_EQ(out.stats.total_execs, 3001u) << StrategyName(s);
    EXPECT_EQ(out.log.size(), 3001u);
    for (size_t i = 0; i < out.log.size(); ++i) {
      ASSERT_EQ(out.log[i].exec_index, i);
    }
  }
}

TEST(CampaignTest, TickBudgetStopsAtFirstExecutionPastIt) {
  auto t = SuiteTarget(2);
  CampaignConfig cfg = SyntheticCampaign(t, Strategy::kNativeOnly, 5, 0);
  cfg.max_ticks = 500000;
  cfg.exec_log = true;
  const CampaignOutput out = RunOk(cfg);
  const CentiTicks budget = cfg.max_ticks * kCentiTicksPerTick;
  EXPECT_GE(out.stats.total_ticks(), budget);
  EXPECT_LT(out.stats.total_ticks() - out.log.back().cost, budget);
}

TEST(CampaignTest, RepeatedRunsAreIdentical) {
  auto t = SuiteTarget(3);
  for (Strategy s : kAllStrategies) {
    CampaignConfig cfg = SyntheticCampaign(t, s, 9, 20000);
    cfg.exec_log = true;
    const CampaignOutput a = RunOk(cfg);
    const CampaignOutput b = RunOk(cfg);
    EXPECT_EQ(a.log, b.log);
    EXPECT_EQ(a.stats.bugs, b.stats.bugs);
    EXPECT_EQ(a.stats.dispatches, b.stats.dispatches);
    EXPECT_EQ(a.stats.native_ticks, b.stats.native_ticks);
    EXPECT_EQ(a.stats.sanitized_ticks, b.stats.sanitized_ticks);
    EXPECT_EQ(a.stats.mutation_counts, b.stats.mutation_counts);
    EXPECT_EQ(a.stats.coverage_bits, b.stats.coverage_bits);
  }
}

// Independent uniqueness oracle: replay each logged input and remember the
// set of nonzero map slots.
TEST(CampaignTest, PatternSetDispatchesExactlyTheFirstSeenSetPatterns) {
  for (uint32_t index : {0u, 4u, 7u}) {
    auto t = SuiteTarget(index);
    CampaignConfig cfg = SyntheticCampaign(t, Strategy::kPatternSet, 3, 20000);
    cfg.exec_log = true;
    const CampaignOutput out = RunOk(cfg);
    std::set<std::vector<uint32_t>> seen;
    Bitmap bm(t->map_size);
    uint64_t dispatched = 0;
    for (const ExecRecord &r : out.log) {
      const TargetRun run = RunTarget(*t, r.input, &bm, nullptr);
      if (run.timed_out) {
        EXPECT_FALSE(r.dispatched);
        continue;
      }
      std::vector<uint32_t> slots;
      for (size_t i = 0; i < bm.counters().size(); ++i) {
        if (bm.counters()[i] != 0) slots.push_back(static_cast<uint32_t>(i));
      }
      const bool first = seen.insert(slots).second;
      ASSERT_EQ(r.dispatched, first) << "exec " << r.exec_index;
      ASSERT_EQ(r.set_unique, first);
      dispatched += first;
    }
    EXPECT_EQ(out.stats.dispatched_execs, dispatched);
    EXPECT_EQ(out.stats.pattern_insertions, dispatched);
    for (const auto &[id, n] : out.stats.dispatches) EXPECT_EQ(n, dispatched);
    EXPECT_LE(out.stats.dispatched_execs * cfg.pool.size(),
              out.stats.total_execs * cfg.pool.size());
  }
}

TEST(CampaignTest, HitCountDispatchesEqualInsertions) {
  auto t = SuiteTarget(5);
  CampaignConfig cfg =
      SyntheticCampaign(t, Strategy::kPatternHitCount, 3, 20000);
  cfg.exec_log = true;
  const CampaignOutput out = RunOk(cfg);
  EXPECT_EQ(out.stats.dispatched_execs, out.stats.pattern_insertions);
  uint64_t hit = 0;
  for (const ExecRecord &r : out.log) {
    EXPECT_EQ(r.dispatched, r.hit_unique);
    hit += r.hit_unique;
  }
  EXPECT_EQ(hit, out.stats.dispatched_execs);
}

// A coverage increase is a new (slot, bucket) pair, so the bucketed pattern
// is always first-seen. The Set pattern is first-seen when a new slot
// appears; a new bucket on known slots can leave it unchanged.
TEST(CampaignTest, CoverageIncreaseImpliesFirstSeenPatterns) {
  for (uint32_t index : {1u, 6u}) {
    auto t = SuiteTarget(index);
    CampaignConfig cfg =
        SyntheticCampaign(t, Strategy::kPatternSet, 4, 20000);
    cfg.exec_log = true;
    const CampaignOutput out = RunOk(cfg);
    std::vector<bool> slot_seen(t->map_size, false);
    Bitmap bm(t->map_size);
    uint64_t increases = 0;
    uint64_t new_slots = 0;
    for (const ExecRecord &r : out.log) {
      if (RunTarget(*t, r.input, &bm, nullptr).timed_out) continue;
      bool fresh = false;
      for (size_t i = 0; i < bm.counters().size(); ++i) {
        if (bm.counters()[i] != 0 && !slot_seen[i]) {
          slot_seen[i] = true;
          fresh = true;
        }
      }
      if (fresh) {
        ++new_slots;
        EXPECT_TRUE(r.cov_increase);
        EXPECT_TRUE(r.set_unique);
      }
      if (r.cov_increase) {
        EXPECT_TRUE(r.hit_unique);
        ++increases;
      }
    }
    EXPECT_EQ(increases, out.stats.coverage_increases);
    EXPECT_GT(new_slots, 0u);
    EXPECT_GE(increases, new_slots);
  }
}

// With crashing inputs queued, admission depends on coverage alone and both
// strategies replay one input sequence.
TEST(CampaignTest, PatternSetFindsEverythingPostProcessingFinds) {
  for (uint32_t index = 0; index < 6; ++index) {
    auto t = SuiteTarget(index);
    CampaignConfig post =
        SyntheticCampaign(t, Strategy::kPostProcessCoverage, 8, 20000);
    post.exec_log = true;
    post.queue_crashes = true;
    CampaignConfig set = post;
    set.strategy = Strategy::kPatternSet;
    const CampaignOutput a = RunOk(post);
    const CampaignOutput b = RunOk(set);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (size_t i = 0; i < a.log.size(); ++i) {
      ASSERT_EQ(a.log[i].input, b.log[i].input);
    }
    EXPECT_EQ(a.stats.post_dispatched, a.stats.seeds);
    std::set<BugKey> in_set;
    for (const BugReport &r : b.stats.bugs) in_set.insert(r.key);
    for (const BugReport &r : a.stats.bugs) {
      EXPECT_TRUE(in_set.contains(r.key)) << r.key.ToString();
    }
  }
}

TEST(CampaignTest, NativeCrashesAreSavedRegardlessOfPattern) {
  // Suite member with native bugs.
  for (uint32_t index = 0; index < 50; ++index) {
    auto t = SuiteTarget(index);
    const bool has_native = std::any_of(
        t->bugs.begin(), t->bugs.end(),
        [](const BugSpec &b) { return b.native; });
    if (!has_native) continue;
    const std::string dir = absl::StrFormat(
        "%s/native_crash_%d", ::testing::TempDir(), index);
    std::filesystem::remove_all(dir);
    CampaignConfig cfg = SyntheticCampaign(t, Strategy::kPatternSet, 2, 20000);
    cfg.exec_log = true;
    cfg.output_dir = dir;
    const CampaignOutput out = RunOk(cfg);
    uint64_t crashes = 0;
    for (const ExecRecord &r : out.log) {
      if (r.status != ExecStatus::kCrash) continue;
      ++crashes;
      const std::string name =
          absl::StrFormat("%016x", DigestBytes(r.input).value);
      EXPECT_TRUE(std::filesystem::exists(dir + "/crashes/" + name));
      EXPECT_TRUE(std::filesystem::exists(dir + "/crashes/" + name + ".json"));
    }
    if (crashes == 0) continue;
    EXPECT_EQ(crashes, out.stats.native_crashes);
    EXPECT_LE(out.stats.native_crash_dispatches, crashes);
    EXPECT_TRUE(std::filesystem::exists(dir + "/queue"));
    return;
  }
  GTEST_SKIP() << "no suite member crashed natively";
}

TEST(CampaignTest, NativeOnlyNeverReportsSanitizerOnlyBugs) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    GeneratorParams p;
    p.seed = seed;
    p.native_percent = 0;
    p.map_size = kSuiteMapSize;
    auto t = GenerateTarget(p);
    ASSERT_TRUE(t.ok());
    auto tp = std::make_shared<const SyntheticTarget>(*t);
    const CampaignOutput out =
        RunOk(SyntheticCampaign(tp, Strategy::kNativeOnly, 1, 20000));
    EXPECT_TRUE(out.stats.bugs.empty());
    EXPECT_EQ(out.stats.dispatched_execs, 0u);
    EXPECT_EQ(out.stats.sanitized_ticks, 0u);
  }
}

// Only bug: sanitizer-only, fires when byte 0 < 128 and byte 1 != 0 takes
// the path that skips the sibling edge.
TEST(CampaignTest, PatternSetFindsSanitizerOnlyEdgeAbsentBug) {
  TargetBuilder b("absent", 64);
  const NodeId n0 = b.AddThreshold(0, 128);
  const NodeId n1 = b.AddEquals(1, 0);
  const NodeId n2 = b.AddExit();
  b.Connect(n0, n1);  // e0: byte0 < 128
  b.Connect(n0, n1);  // e1
  b.Connect(n1, n2);  // e2: byte1 != 0
  b.Connect(n1, n2);  // e3: byte1 == 0
  BugSpec bug;
  bug.id = 1;
  bug.sanitizer_class = BugClass::kUndefinedLike;
  bug.trigger.kind = TriggerKind::kEdgeAbsent;
  bug.trigger.edges = {1};
  bug.trigger.absent = {3};
  b.AddBug(bug);
  auto t = b.Build();
  ASSERT_TRUE(t.ok()) << t.status();
  auto tp = std::make_shared<const SyntheticTarget>(*t);
  const CampaignOutput out =
      RunOk(SyntheticCampaign(tp, Strategy::kPatternSet, 1, 2000));
  ASSERT_EQ(out.stats.bugs.size(), 1u);
  EXPECT_EQ(out.stats.bugs[0].key, GroundTruthKey(1));
  EXPECT_EQ(out.stats.bugs[0].detector, "undefined");
  EXPECT_LE(out.stats.dispatched_execs, out.stats.pattern_insertions);
}

TEST(CampaignTest, TimeoutsAreNeverDispatchedNorAdmitted) {
  TargetBuilder b("slow", 64);
  const NodeId loop = b.AddLoop(0, 255);
  const NodeId exit = b.AddExit();
  b.AddBody(loop);
  b.Connect(loop, exit);
  b.set_step_cap(100);
  auto t = b.Build();
  ASSERT_TRUE(t.ok()) << t.status();
  auto tp = std::make_shared<const SyntheticTarget>(*t);
  CampaignConfig cfg = SyntheticCampaign(tp, Strategy::kSanitizeAll, 1, 5000);
  cfg.exec_log = true;
  const CampaignOutput out = RunOk(cfg);
  uint64_t timeouts = 0;
  for (const ExecRecord &r : out.log) {
    if (r.status != ExecStatus::kTimeout) continue;
    ++timeouts;
    EXPECT_FALSE(r.dispatched);
    EXPECT_FALSE(r.cov_increase);
  }
  EXPECT_GT(timeouts, 0u);
  EXPECT_EQ(timeouts, out.stats.timeouts);
  EXPECT_EQ(out.stats.dispatched_execs, out.stats.total_execs - timeouts);
}

TEST(CampaignTest, CheckpointsFireAndPersistTheQueue) {
  auto t = SuiteTarget(2);
  const std::string dir = ::testing::TempDir() + "/checkpoints";
  std::filesystem::remove_all(dir);
  CampaignConfig cfg = SyntheticCampaign(t, Strategy::kPatternSet, 1, 10000);
  cfg.output_dir = dir;
  cfg.checkpoint_every = 2500;
  std::vector<uint64_t> at;
  CampaignOutput out;
  ASSERT_TRUE(RunCampaign(cfg, out, [&](const CampaignStats &s) {
                at.push_back(s.total_execs);
                return absl::OkStatus();
              }).ok());
  EXPECT_THAT(at, ElementsAreArray({2500, 5000, 7500, 10000, 10000}));
  size_t files = 0;
  for (const auto &e : std::filesystem::directory_iterator(dir + "/queue")) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, out.stats.seeds);
}

TEST(CampaignTest, FailingCheckpointAbortsWithPartialStats) {
  auto t = SuiteTarget(2);
  CampaignConfig cfg = SyntheticCampaign(t, Strategy::kNativeOnly, 1, 10000);
  cfg.checkpoint_every = 1000;
  CampaignOutput out;
  const absl::Status s = RunCampaign(cfg, out, [](const CampaignStats &st) {
    return st.total_execs >= 3000 ? absl::UnavailableError("disk full")
                                  : absl::OkStatus();
  });
  EXPECT_EQ(s.code(), absl::StatusCode::kUnavailable);
  EXPECT_TRUE(out.stats.aborted);
  EXPECT_EQ(out.stats.total_execs, 3000u);
}

TEST(CampaignTest, ExternalTargetThatCannotStartAborts) {
  CampaignConfig cfg;
  cfg.strategy = Strategy::kNativeOnly;
  cfg.fuzz.id = "native";
  cfg.fuzz.kind = ExecutorKind::kExternalCommand;
  cfg.fuzz.role = ExecutorRole::kFuzzTarget;
  cfg.fuzz.command.argv = {"/nonexistent/patfuzz-target"};
  cfg.max_execs = 10;
  cfg.initial_seeds = {ByteArray{1}};
  CampaignOutput out;
  const absl::Status s = RunCampaign(cfg, out);
  EXPECT_FALSE(s.ok());
  EXPECT_TRUE(out.stats.aborted);
  EXPECT_EQ(out.stats.total_execs, 0u);
}

}  // namespace
}  // namespace patfuzz
