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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "absl/strings/str_format.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "patfuzz/bitmap.h"
#include "patfuzz/pattern.h"
#include "patfuzz/ratios.h"
#include "patfuzz/report.h"
#include "patfuzz/suite.h"
#include "patfuzz/triage.h"

namespace patfuzz {
namespace {

CrashEvent Event(uint64_t exec, std::vector<BugKey> keys,
                 uint64_t input = 0) {
  CrashEvent e;
  e.exec_index = exec;
  e.tick = exec * 1000;
  e.input_digest = PatternDigest{input == 0 ? exec : input};
  e.detector = "address";
  e.keys = std::move(keys);
  return e;
}

TEST(DedupeTest, HundredTriggersOneReport) {
  std::vector<CrashEvent> events;
  for (uint64_t i = 0; i < 100; ++i) {
    events.push_back(Event(500 - i, {GroundTruthKey(4)}));
  }
  const std::vector<BugReport> r = Dedupe(events);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].key, GroundTruthKey(4));
  EXPECT_EQ(r[0].first_exec_index, 401u);
  EXPECT_EQ(r[0].first_tick, 401000u);
}

TEST(DedupeTest, OneInputTwoBugsTwoReports) {
  const std::vector<BugReport> r =
      Dedupe({Event(9, {GroundTruthKey(1), GroundTruthKey(2)}, 77)});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].input_digest, r[1].input_digest);
  EXPECT_EQ(r[0].input_digest.value, 77u);
}

TEST(DedupeTest, ExternalKeysSplitOnPattern) {
  const std::vector<BugReport> r =
      Dedupe({Event(1, {ExternalKey(11, PatternDigest{5})}),
              Event(2, {ExternalKey(11, PatternDigest{6})}),
              Event(3, {ExternalKey(11, PatternDigest{5})})});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].key.id, 11u);
  EXPECT_NE(r[0].key.pattern, r[1].key.pattern);
}

TEST(DedupeTest, IdempotentAndOrderIndependent) {
  std::vector<CrashEvent> events;
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    events.push_back(Event(rng.Below(1000),
                           {GroundTruthKey(rng.Between(1, 6))},
                           rng.Between(1, 50)));
  }
  const std::vector<BugReport> once = Dedupe(events);
  std::vector<CrashEvent> twice = events;
  twice.insert(twice.end(), events.begin(), events.end());
  EXPECT_EQ(Dedupe(twice), once);
  std::vector<CrashEvent> reversed(events.rbegin(), events.rend());
  EXPECT_EQ(Dedupe(reversed), once);
}

TEST(BugKeyTest, TextRoundTrip) {
  for (const BugKey &k :
       {GroundTruthKey(3), ExternalKey(139, PatternDigest{0xabcdef})}) {
    EXPECT_EQ(BugKey::Parse(k.ToString()), k);
  }
  EXPECT_EQ(GroundTruthKey(3).ToString(), "bug:3");
  EXPECT_FALSE(BugKey::Parse("bug:").has_value());
  EXPECT_FALSE(BugKey::Parse("crash:1@zz").has_value());
}

// Treat a synthetic target as external: the "signal" is the lowest firing
// bug id and the pattern is the run's Set digest. Compare the partition with
// ground truth. Keys never merge different ground-truth bugs; they may split
// one bug across several patterns.
TEST(DedupeTest, ExternalKeysAgainstGroundTruth) {
  auto t = std::make_shared<const SyntheticTarget>(
      *GenerateTarget(SuiteParams(SuiteOptions{}, 4)));
  CampaignConfig cfg = SyntheticCampaign(t, Strategy::kSanitizeAll, 1, 20000);
  cfg.exec_log = true;
  CampaignOutput out;
  ASSERT_TRUE(RunCampaign(cfg, out).ok());
  Bitmap bm(t->map_size);
  PatternDigester set(PatternPolicy::kSet);
  std::map<BugKey, std::set<BugId>> external_to_truth;
  std::set<BugId> truth;
  for (const ExecRecord &r : out.log) {
    const TargetRun run = RunTarget(*t, r.input, &bm, nullptr);
    if (run.timed_out || run.fired.empty()) continue;
    const BugKey k = ExternalKey(run.fired[0], *set.Digest(bm, nullptr));
    external_to_truth[k].insert(run.fired[0]);
    truth.insert(run.fired[0]);
  }
  ASSERT_FALSE(truth.empty());
  for (const auto &[key, ids] : external_to_truth) {
    EXPECT_EQ(ids.size(), 1u) << key.ToString();
  }
  EXPECT_GE(external_to_truth.size(), truth.size());
}

ExecRecord Rec(uint64_t i, bool set, bool hit, bool cov, ByteArray in = {}) {
  ExecRecord r;
  r.exec_index = i;
  r.input = in.empty() ? ByteArray{static_cast<uint8_t>(i)} : in;
  r.set_unique = set;
  r.hit_unique = hit;
  r.cov_increase = cov;
  return r;
}

BugOracle Fixed(std::set<uint8_t> triggering) {
  return [triggering](ByteSpan in) -> absl::StatusOr<bool> {
    return triggering.contains(in[0]);
  };
}

TEST(RatioTest, AllDistinctPatternsGiveOne) {
  CampaignOutput out;
  for (uint64_t i = 0; i < 10; ++i) out.log.push_back(Rec(i, true, true, i == 0));
  out.stats.total_execs = 10;
  auto c = ComputeRatioCounts(out, Fixed({}));
  ASSERT_TRUE(c.ok());
  const Ratios r = RatiosOf(*c);
  EXPECT_EQ(r.all_set, 1.0);
  EXPECT_EQ(r.all_hit, 1.0);
  EXPECT_DOUBLE_EQ(r.all_cov, 0.1);
  EXPECT_FALSE(r.bug_set.has_value());
}

TEST(RatioTest, BugRatioCountsOnlyTriggeringExecutions) {
  CampaignOutput out;
  out.log = {Rec(0, true, true, true), Rec(1, false, true, false),
             Rec(2, true, true, false), Rec(3, false, false, false)};
  out.stats.total_execs = 4;
  auto c = ComputeRatioCounts(out, Fixed({1, 2, 3}));
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->bug_triggering, 3u);
  EXPECT_EQ(c->bug_set_unique, 1u);
  EXPECT_EQ(c->bug_hit_unique, 2u);
  const Ratios r = RatiosOf(*c);
  EXPECT_DOUBLE_EQ(*r.bug_set, 1.0 / 3);
  EXPECT_DOUBLE_EQ(*r.bug_hit, 2.0 / 3);
  EXPECT_DOUBLE_EQ(*r.bug_cov, 0.0);
  EXPECT_DOUBLE_EQ(r.all_set, 0.5);
}

TEST(RatioTest, MissingLogIsUnavailable) {
  CampaignOutput out;
  out.stats.total_execs = 5;
  EXPECT_EQ(ComputeRatioCounts(out, Fixed({})).status().code(),
            absl::StatusCode::kUnavailable);
}

TEST(RatioTest, MeanAndPooledDiffer) {
  RatioCounts a{10, 5, 6, 1, 2, 2, 2, 0};
  RatioCounts b{90, 9, 18, 3, 0, 0, 0, 0};
  const RatioSummary s = SummarizeRatios({a, b});
  EXPECT_DOUBLE_EQ(s.mean.all_set, (0.5 + 0.1) / 2);
  EXPECT_DOUBLE_EQ(s.pooled.all_set, 14.0 / 100);
  EXPECT_DOUBLE_EQ(*s.mean.bug_set, 1.0);  // Only `a` had triggers.
  EXPECT_DOUBLE_EQ(*s.pooled.bug_set, 1.0);
  EXPECT_EQ(s.total.executions, 100u);
}

TEST(RatioTest, BoundsOnRealCampaigns) {
  for (uint32_t index : {2u, 8u}) {
    auto t = std::make_shared<const SyntheticTarget>(
        *GenerateTarget(SuiteParams(SuiteOptions{}, index)));
    for (Strategy s : {Strategy::kPatternSet, Strategy::kNativeOnly}) {
      CampaignConfig cfg = SyntheticCampaign(t, s, 2, 10000);
      cfg.exec_log = true;
      CampaignOutput out;
      ASSERT_TRUE(RunCampaign(cfg, out).ok());
      auto pool = SanitizerDispatcher::Create(DefaultPool(t));
      ASSERT_TRUE(pool.ok());
      auto c = ComputeRatioCounts(out, PoolOracle(**pool));
      ASSERT_TRUE(c.ok());
      const Ratios r = RatiosOf(*c);
      for (double v : {r.all_set, r.all_hit, r.all_cov}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      if (r.bug_set) {
        EXPECT_GE(*r.bug_set, 0.0);
        EXPECT_LE(*r.bug_set, 1.0);
      }
      EXPECT_GT(out.stats.coverage_increases, 0u);
      EXPECT_GT(r.all_set, 0.0);
      EXPECT_GE(r.all_hit, r.all_set);
    }
  }
}

TEST(PoolOracleTest, MatchesGroundTruth) {
  auto t = std::make_shared<const SyntheticTarget>(
      *GenerateTarget(SuiteParams(SuiteOptions{}, 1)));
  auto pool = SanitizerDispatcher::Create(DefaultPool(t));
  ASSERT_TRUE(pool.ok());
  const BugOracle oracle = PoolOracle(**pool);
  for (const Witness &w : t->witnesses) EXPECT_TRUE(*oracle(w.input));
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const ByteArray in = RandomWalkInput(*t, rng);
    const TargetRun run = RunTarget(*t, in, nullptr, nullptr);
    EXPECT_EQ(*oracle(in), !run.timed_out && !run.fired.empty());
  }
}

CampaignResult Result(std::string target, Strategy s,
                      std::vector<BugId> bugs) {
  CampaignResult r;
  r.target = std::move(target);
  r.strategy = s;
  r.stats.strategy = s;
  r.stats.total_execs = 100;
  r.stats.native_ticks = 100 * 10000;
  for (BugId b : bugs) r.stats.bugs.push_back(BugReport{GroundTruthKey(b)});
  return r;
}

TEST(CompareTest, MissedAndAdditional) {
  const std::vector<CampaignResult> results = {
      Result("a", Strategy::kNativeOnly, {1}),
      Result("a", Strategy::kSanitizeAll, {1, 2, 3}),
      Result("a", Strategy::kPatternSet, {1, 2, 3, 4}),
      Result("b", Strategy::kNativeOnly, {}),
      Result("b", Strategy::kSanitizeAll, {7}),
      Result("b", Strategy::kPatternSet, {7}),
  };
  std::map<std::pair<std::string, Strategy>, ComparisonRow> rows;
  for (const ComparisonRow &r : Compare(results)) {
    rows[{r.scope, r.strategy}] = r;
    EXPECT_EQ(r.found + r.missed, r.union_size);
  }
  EXPECT_EQ(rows.size(), 9u);
  const ComparisonRow &native = rows[{"a", Strategy::kNativeOnly}];
  EXPECT_EQ(native.missed, 3u);
  EXPECT_EQ(native.additional, 0u);
  const ComparisonRow &set = rows[{"a", Strategy::kPatternSet}];
  EXPECT_EQ(set.missed, 0u);
  EXPECT_EQ(set.additional, 1u);
  const ComparisonRow &suite = rows[{"suite", Strategy::kSanitizeAll}];
  EXPECT_EQ(suite.union_size, 5u);
  EXPECT_EQ(suite.found, 4u);
  EXPECT_THAT(suite.missed_bugs, ::testing::ElementsAre("a/bug:4"));
  EXPECT_EQ((rows[{"suite", Strategy::kPatternSet}].missed), 0u);
}

std::string Slurp(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TEST(ReportTest, EmptyCampaignGivesHeadersAndNoRows) {
  const std::string dir = ::testing::TempDir() + "/report_empty";
  std::filesystem::remove_all(dir);
  ReportHeader h{ConfigDigest("empty"), 0};
  ASSERT_TRUE(EmitReports(dir, h, {}).ok());
  for (const char *name : {"stats.csv", "comparison.csv", "ratios.csv",
                           "timeline.csv", "wall.csv"}) {
    auto t = ReadCsv(dir + "/" + name);
    ASSERT_TRUE(t.ok()) << t.status();
    EXPECT_TRUE(t->rows.empty()) << name;
    EXPECT_FALSE(t->columns.empty());
    EXPECT_EQ(t->meta["config_digest"], h.config_digest);
    EXPECT_EQ(t->meta["digest_algorithm"], "xxh64");
    EXPECT_EQ(t->meta["artifact_version"], std::string(kArtifactVersion));
    EXPECT_EQ(t->meta["rng_seed"], "0");
  }
  const std::string json = Slurp(dir + "/report.json");
  EXPECT_NE(json.find("\"stats\": []"), std::string::npos);
}

TEST(ReportTest, RatioCsvRecomputesFromLog) {
  auto t = std::make_shared<const SyntheticTarget>(
      *GenerateTarget(SuiteParams(SuiteOptions{}, 3)));
  auto pool = SanitizerDispatcher::Create(DefaultPool(t));
  ASSERT_TRUE(pool.ok());
  std::vector<CampaignResult> results;
  std::map<std::string, CampaignOutput> logs;
  for (Strategy s : {Strategy::kPatternSet, Strategy::kPatternHitCount}) {
    CampaignConfig cfg = SyntheticCampaign(t, s, 6, 10000);
    cfg.exec_log = true;
    CampaignOutput out;
    ASSERT_TRUE(RunCampaign(cfg, out).ok());
    CampaignResult r;
    r.target = t->name;
    r.strategy = s;
    r.stats = out.stats;
    r.ratios = *ComputeRatioCounts(out, PoolOracle(**pool));
    results.push_back(r);
    logs[std::string(StrategyName(s))] = std::move(out);
  }
  const std::string dir = ::testing::TempDir() + "/report_ratios";
  ASSERT_TRUE(EmitReports(dir, ReportHeader{ConfigDigest("x"), 6}, results)
                  .ok());
  auto csv = ReadCsv(dir + "/ratios.csv");
  ASSERT_TRUE(csv.ok());
  int checked = 0;
  for (const auto &row : csv->rows) {
    if (row[csv->Column("row")] != "campaign") continue;
    const CampaignOutput &out = logs.at(row[csv->Column("strategy")]);
    // Recount from the log with an independent ground-truth oracle.
    uint64_t set = 0, hit = 0, cov = 0, trig = 0, trig_set = 0;
    for (const ExecRecord &r : out.log) {
      set += r.set_unique;
      hit += r.hit_unique;
      cov += r.cov_increase;
      const TargetRun run = RunTarget(*t, r.input, nullptr, nullptr);
      if (!run.timed_out && !run.fired.empty()) {
        ++trig;
        trig_set += r.set_unique;
      }
    }
    const double n = static_cast<double>(out.log.size());
    EXPECT_EQ(row[csv->Column("executions")], std::to_string(out.log.size()));
    EXPECT_EQ(row[csv->Column("set_unique")], std::to_string(set));
    EXPECT_EQ(row[csv->Column("bug_triggering")], std::to_string(trig));
    EXPECT_EQ(row[csv->Column("all_set")], FormatRatio(set / n));
    EXPECT_EQ(row[csv->Column("all_hit")], FormatRatio(hit / n));
    EXPECT_EQ(row[csv->Column("all_cov")], FormatRatio(cov / n));
    EXPECT_EQ(row[csv->Column("bug_set")],
              trig == 0 ? "" : FormatRatio(trig_set / double(trig)));
    ++checked;
  }
  EXPECT_EQ(checked, 2);
}

TEST(ReportTest, DeterministicFilesAcrossRuns) {
  auto t = std::make_shared<const SyntheticTarget>(
      *GenerateTarget(SuiteParams(SuiteOptions{}, 0)));
  std::string first[5];
  for (int run = 0; run < 2; ++run) {
    CampaignConfig cfg = SyntheticCampaign(t, Strategy::kPatternSet, 1, 5000);
    cfg.clock = ClockMode::kWall;
    CampaignOutput out;
    ASSERT_TRUE(RunCampaign(cfg, out).ok());
    CampaignResult r{t->name, Strategy::kPatternSet, 0, out.stats, {}};
    const std::string dir =
        absl::StrFormat("%s/report_det_%d", ::testing::TempDir(), run);
    ASSERT_TRUE(EmitReports(dir, ReportHeader{ConfigDigest("c"), 1}, {r})
                    .ok());
    int i = 0;
    for (const char *name : {"stats.csv", "comparison.csv", "ratios.csv",
                             "timeline.csv", "report.json"}) {
      const std::string text = Slurp(dir + "/" + name);
      if (run == 0) {
        first[i] = text;
      } else {
        EXPECT_EQ(text, first[i]) << name;
      }
      ++i;
    }
  }
}

TEST(ReportTest, UnwritableDirectoryNamesThePath) {
  const absl::Status s =
      EmitReports("/proc/patfuzz-no-such-dir/x", ReportHeader{}, {});
  EXPECT_FALSE(s.ok());
  EXPECT_NE(std::string(s.message()).find("/proc/patfuzz-no-such-dir"),
            std::string::npos);
}

}  // namespace
}  // namespace patfuzz
