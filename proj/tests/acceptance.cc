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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Tolerances are fixed here.

#include <algorithm>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "patfuzz/commands.h"
#include "patfuzz/config.h"
#include "patfuzz/pattern.h"
#include "patfuzz/pattern_registry.h"
#include "patfuzz/ratios.h"
#include "patfuzz/report.h"
#include "patfuzz/suite.h"

namespace patfuzz {
namespace {

namespace fs = std::filesystem;

constexpr uint64_t kExecs = 100000;
constexpr uint64_t kRngSeed = 7;
constexpr uint64_t kOrderSensitiveSeed = 4;
constexpr double kMaxDispatchShare = 0.15;
constexpr double kMaxSetRatio = 0.10;
constexpr double kMaxSetRatioForThroughput = 0.05;
constexpr double kMinNativeThroughputShare = 0.70;
constexpr double kMinSanitizeAllSpeedup = 2.0;
constexpr double kMinBugRatio = 0.9;
constexpr double kMaxDigestShare = 0.05;
constexpr double kBenchTolerance = 0.001;  // Relative.

int failures = 0;

void Report(int n, bool pass, const std::string &what,
            const std::string &detail) {
  std::printf("criterion %d %s %s: %s\n", n, pass ? "PASS" : "FAIL",
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string Scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / "patfuzz-acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

Config SuiteConfig() {
  Config c;
  c.max_execs = kExecs;
  c.rng_seed = kRngSeed;
  c.target.source = TargetSource::kSuite;
  c.target.order_sensitive = {kOrderSensitiveSeed};
  SlowdownTable table;
  for (BugClass cls : kAllBugClasses) {
    (void)table.Set(cls, DefaultSlowdownPercent(cls));
  }
  c.slowdowns = table;
  c.compare.strategies = {Strategy::kNativeOnly, Strategy::kSanitizeAll,
                          Strategy::kPatternSet};
  c.compare.reps = 1;
  return c;
}

struct SuiteRuns {
  std::vector<std::string> targets;  // Suite order.
  std::string order_sensitive;
  std::map<std::pair<std::string, Strategy>, CampaignResult> by_key;
  std::vector<CampaignResult> all;
  bool ok = true;

  const CampaignResult &Get(const std::string &t, Strategy s) const {
    return by_key.at({t, s});
  }
};

SuiteRuns RunSuite() {
  SuiteRuns out;
  const Config cfg = SuiteConfig();
  auto targets = ResolveTargets(cfg);
  if (!targets.ok()) {
    std::printf("suite: %s\n", std::string(targets.status().message()).c_str());
    out.ok = false;
    return out;
  }
  for (const ResolvedTarget &t : *targets) out.targets.push_back(t.name);
  out.order_sensitive = out.targets.back();
  for (CampaignRun &r : RunComparison(cfg, *targets)) {
    if (!r.status.ok()) {
      std::printf("campaign %s %s: %s\n", r.result.target.c_str(),
                  std::string(StrategyName(r.result.strategy)).c_str(),
                  std::string(r.status.message()).c_str());
      out.ok = false;
    }
    out.by_key[{r.result.target, r.result.strategy}] = r.result;
    out.all.push_back(std::move(r.result));
  }
  return out;
}

std::set<BugKey> Bugs(const CampaignResult &r) {
  std::set<BugKey> s;
  for (const BugReport &b : r.stats.bugs) s.insert(b.key);
  return s;
}

void Criterion1(const SuiteRuns &runs) {
  int same = 0, total = 0;
  uint64_t ps = 0, sa = 0;
  std::string differing;
  for (const std::string &t : runs.targets) {
    if (t == runs.order_sensitive) continue;
    const CampaignResult &a = runs.Get(t, Strategy::kPatternSet);
    const CampaignResult &b = runs.Get(t, Strategy::kSanitizeAll);
    ++total;
    if (Bugs(a) == Bugs(b)) {
      ++same;
    } else {
      differing += " " + t;
    }
    ps += a.stats.dispatched_execs;
    sa += b.stats.dispatched_execs;
  }
  const double share = sa == 0 ? 1.0 : double(ps) / double(sa);
  Report(1, runs.ok && total >= 50 && same == total && share <= kMaxDispatchShare,
         "bug-set equivalence",
         absl::StrFormat("%d/%d targets with identical bug sets%s; PatternSet "
                         "dispatches %.3f%% of SanitizeAll's (bound %.0f%%)",
                         same, total, differing, 100 * share,
                         100 * kMaxDispatchShare));
}

void Criterion2(const SuiteRuns &runs) {
  bool pass = runs.ok;
  double max_set = 0, mean_set = 0, mean_hit = 0, mean_cov = 0;
  int n = 0;
  std::string bad;
  for (const std::string &t : runs.targets) {
    if (t == runs.order_sensitive) continue;
    const auto &c = runs.Get(t, Strategy::kPatternSet).ratios;
    if (!c) {
      pass = false;
      continue;
    }
    const Ratios r = RatiosOf(*c);
    max_set = std::max(max_set, r.all_set);
    mean_set += r.all_set;
    mean_hit += r.all_hit;
    mean_cov += r.all_cov;
    ++n;
    if (!(r.all_set <= kMaxSetRatio && r.all_hit > r.all_set &&
          r.all_cov < r.all_set)) {
      pass = false;
      bad += " " + t;
    }
  }
  if (n > 0) {
    mean_set /= n;
    mean_hit /= n;
    mean_cov /= n;
  }
  Report(2, pass && n > 0, "unique-pattern ratio ordering",
         absl::StrFormat("per target set<=%.2f, hit>set, cov<set%s; max set "
                         "%.4f; means set %.4f hit %.4f cov %.5f",
                         kMaxSetRatio, bad.empty() ? "" : " violated on" + bad,
                         max_set, mean_set, mean_hit, mean_cov));
}

// Two independent branches; the bug needs both high sides at once. Each high
// side is covered by its own seed first, so the pair never adds coverage.
void Criterion3() {
  TargetBuilder b("pairs", 64);
  const NodeId n0 = b.AddThreshold(0, 128);
  const NodeId n1 = b.AddThreshold(1, 128);
  const NodeId exit = b.AddExit();
  b.Connect(n0, n1);
  const EdgeId a1 = b.Connect(n0, n1);
  b.Connect(n1, exit);
  const EdgeId b1 = b.Connect(n1, exit);
  BugSpec bug;
  bug.id = 1;
  bug.sanitizer_class = BugClass::kAddressLike;
  bug.trigger.kind = TriggerKind::kEdgeSubset;
  bug.trigger.edges = {a1, b1};
  b.AddBug(bug);
  auto t = b.Build();
  if (!t.ok()) {
    Report(3, false, "coverage-baseline miss", std::string(t.status().message()));
    return;
  }
  auto tp = std::make_shared<const SyntheticTarget>(*t);
  // Low and high sides of each branch, one at a time.
  const std::vector<ByteArray> seeds = {ByteArray{0, 0}, ByteArray{0xff, 0},
                                        ByteArray{0, 0xff}};
  std::string detail;
  bool pass = true;
  for (const ByteArray &s : seeds) {
    if (!RunTarget(*tp, s, nullptr, nullptr).fired.empty()) pass = false;
  }
  std::map<Strategy, size_t> found;
  uint64_t post_cov_pairs = 0;
  for (Strategy s : {Strategy::kPostProcessCoverage, Strategy::kPatternSet}) {
    CampaignConfig cfg = SyntheticCampaign(tp, s, 1, 5000);
    cfg.initial_seeds = seeds;
    cfg.exec_log = true;
    CampaignOutput out;
    if (!RunCampaign(cfg, out).ok()) {
      pass = false;
      continue;
    }
    found[s] = out.stats.bugs.size();
    for (const ExecRecord &r : out.log) {
      const bool pair = !RunTarget(*tp, r.input, nullptr, nullptr).fired.empty();
      post_cov_pairs += pair && r.cov_increase;
    }
  }
  pass = pass && found[Strategy::kPostProcessCoverage] == 0 &&
         found[Strategy::kPatternSet] == 1 && post_cov_pairs == 0;
  Report(3, pass, "coverage-baseline miss",
         absl::StrFormat("PostProcessCoverage found %d, PatternSet found %d; "
                         "triggering inputs with a coverage increase: %d",
                         found[Strategy::kPostProcessCoverage],
                         found[Strategy::kPatternSet], post_cov_pairs));
}

void Criterion4(const SuiteRuns &runs) {
  std::map<Strategy, ComparisonRow> suite;
  for (const ComparisonRow &row : Compare(runs.all)) {
    if (row.scope == kSuiteScope) suite[row.strategy] = row;
  }
  const double ps = suite[Strategy::kPatternSet].VirtualThroughput();
  const double na = suite[Strategy::kNativeOnly].VirtualThroughput();
  const double sa = suite[Strategy::kSanitizeAll].VirtualThroughput();
  std::vector<RatioCounts> counts;
  for (const CampaignResult &r : runs.all) {
    if (r.strategy == Strategy::kPatternSet && r.ratios) counts.push_back(*r.ratios);
  }
  const double r = SummarizeRatios(counts).mean.all_set;
  const double vs_native = na > 0 ? ps / na : 0;
  const double vs_sa = sa > 0 ? ps / sa : 0;
  Report(4,
         runs.ok && r <= kMaxSetRatioForThroughput &&
             vs_native >= kMinNativeThroughputShare &&
             vs_sa >= kMinSanitizeAllSpeedup,
         "throughput",
         absl::StrFormat("PatternSet/NativeOnly %.3f (>= %.2f), "
                         "PatternSet/SanitizeAll %.2fx (>= %.1fx), mean "
                         "all_ratio %.4f (<= %.2f)",
                         vs_native, kMinNativeThroughputShare, vs_sa,
                         kMinSanitizeAllSpeedup, r, kMaxSetRatioForThroughput));
}

void Criterion5() {
  bool pass = true;
  Bitmap b(16);
  for (uint32_t e : {5, 3, 9, 7}) b.Hit(e);
  auto p = ExtractPattern(b, PatternPolicy::kSet, nullptr);
  pass = pass && p.ok() && p->indices == std::vector<uint32_t>{3, 5, 7, 9};
  CoverageMap virgin(16);
  bool first = false, second = true;
  pass = pass && virgin.Update(b, first).ok() && virgin.Update(b, second).ok() &&
         first && !second;

  const std::vector<std::vector<uint32_t>> seq = {
      {5, 3, 9, 7}, {9, 7, 5, 3},    {1, 7, 9, 2}, {3, 5, 7, 9},
      {6, 4, 2, 3, 5}, {2, 9, 7, 1}, {5, 3, 2, 4, 6}, {7, 9, 3, 5}};
  PatternRegistry registry;
  PatternDigester digester(PatternPolicy::kSet);
  int unique = 0;
  for (const auto &run : seq) {
    Bitmap m(16);
    for (uint32_t e : run) m.Hit(e);
    unique += registry.IsUnique(*digester.Digest(m, nullptr));
  }
  pass = pass && unique == 3;
  Report(5, pass, "figure-level behaviour",
         absl::StrFormat("stream [5,3,9,7] -> {3,5,7,9}, coverage update "
                         "%d then %d; eight executions -> %d unique",
                         first, second, unique));
}

void Criterion6(const SuiteRuns &runs) {
  bool pass = runs.ok;
  std::string trailing;
  double min_other = 1.0;
  for (const std::string &t : runs.targets) {
    const std::set<BugKey> ps = Bugs(runs.Get(t, Strategy::kPatternSet));
    const std::set<BugKey> sa = Bugs(runs.Get(t, Strategy::kSanitizeAll));
    if (!std::includes(ps.begin(), ps.end(), sa.begin(), sa.end())) {
      trailing += " " + t;
      if (t != runs.order_sensitive) pass = false;
    }
    if (t == runs.order_sensitive) continue;
    const auto &c = runs.Get(t, Strategy::kPatternSet).ratios;
    if (c && c->bug_triggering > 0) {
      min_other = std::min(min_other, *RatiosOf(*c).bug_set);
    }
  }
  const auto &os = runs.Get(runs.order_sensitive, Strategy::kPatternSet).ratios;
  const bool has = os && os->bug_triggering > 0;
  const double os_ratio = has ? *RatiosOf(*os).bug_set : 1.0;
  pass = pass && has && os_ratio < 1.0 && min_other >= kMinBugRatio;
  Report(6, pass, "false-negative channel",
         absl::StrFormat("%s: bug_ratio %.3f over %d triggering executions; "
                         "PatternSet trails SanitizeAll on:%s; minimum "
                         "bug_ratio elsewhere %.3f (>= %.1f)",
                         runs.order_sensitive, os_ratio,
                         has ? os->bug_triggering : 0,
                         trailing.empty() ? " none" : trailing, min_other,
                         kMinBugRatio));
}

void Criterion7() {
  GeneratorParams p = SuiteParams(SuiteOptions{}, 0);
  p.map_size = kDefaultMapSize;
  auto t = GenerateTarget(p);
  if (!t.ok()) {
    Report(7, false, "hash overhead and collisions",
           std::string(t.status().message()));
    return;
  }
  CampaignConfig cfg = SyntheticCampaign(
      std::make_shared<const SyntheticTarget>(*t), Strategy::kPatternSet,
      kRngSeed, kExecs);
  cfg.clock = ClockMode::kWall;
  cfg.collision_audit = true;
  CampaignOutput out;
  const bool ok = RunCampaign(cfg, out).ok();
  const CampaignStats &s = out.stats;
  const double share = s.DigestTimeShare();
  Report(7,
         ok && share <= kMaxDigestShare && s.audit_collisions == 0 &&
             s.audit_distinct > 0,
         "hash overhead and collisions",
         absl::StrFormat("map %d, %d execs: digest+registry %.2f%% of loop "
                         "time (<= %.0f%%), pattern scan %.2f%% separately; "
                         "%d collisions among %d distinct patterns",
                         cfg.map_size, s.total_execs,
                         100 * share, 100 * kMaxDigestShare,
                         s.wall_seconds > 0 ? 100 * s.extract_seconds / s.wall_seconds : 0,
                         s.audit_collisions, s.audit_distinct));
}

std::map<std::string, std::string> Files(const std::string &dir) {
  std::map<std::string, std::string> files;
  for (const auto &e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.starts_with("wall.")) continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

void Criterion8() {
  std::map<std::string, std::string> first;
  bool pass = true;
  size_t count = 0;
  for (int run = 0; run < 2; ++run) {
    Config cfg = SuiteConfig();
    cfg.max_execs = 20000;
    cfg.target.suite.targets = 2;
    cfg.collision_audit = true;
    cfg.compare.strategies = {Strategy::kNativeOnly, Strategy::kPostProcessCoverage,
                              Strategy::kPatternHitCount, Strategy::kPatternSet};
    cfg.compare.reps = 2;
    // Same config both times, output directory included.
    cfg.output_dir = Scratch("det");
    std::ostringstream sink;
    pass = pass && CmdCompare(cfg, sink) == kExitOk;
    // A single campaign with its crash store and queue.
    Config one = cfg;
    one.target.source = TargetSource::kGenerate;
    one.target.generate = SuiteParams(SuiteOptions{}, 1);
    one.output_dir = cfg.output_dir + "/run";
    pass = pass && CmdRun(one, sink) == kExitOk;
    std::map<std::string, std::string> files = Files(cfg.output_dir);
    if (run == 0) {
      first = files;
      count = files.size();
    } else {
      pass = pass && files == first;
    }
  }
  Report(8, pass && count > 0, "determinism",
         absl::StrFormat("%d report, crash and queue files byte-identical "
                         "across two runs (wall.* excluded)",
                         count));
}

void Criterion9() {
  Config cfg = SuiteConfig();
  cfg.target.source = TargetSource::kGenerate;
  cfg.target.generate = SuiteParams(SuiteOptions{}, 0);
  cfg.bench.corpus_size = 10000;
  cfg.output_dir = Scratch("bench");
  std::ostringstream sink;
  bool pass = CmdBench(cfg, sink) == kExitOk;
  std::string detail;
  auto rows = ReadCsv(cfg.output_dir + "/bench.csv");
  pass = pass && rows.ok() && rows->rows.size() == 1 + kAllBugClasses.size();
  if (rows.ok()) {
    for (const auto &row : rows->rows) {
      const std::string id = row[rows->Column("executor")];
      const double got = std::stod(row[rows->Column("virtual_slowdown_percent")]);
      double want = 100;
      if (auto cls = ParseBugClass(id)) want = DefaultSlowdownPercent(*cls);
      pass = pass && std::abs(got - want) <= kBenchTolerance * want &&
             row[rows->Column("execs")] == "10000";
      detail += absl::StrFormat(" %s %.3f%% (want %.0f%%)", id, got, want);
    }
  }
  Report(9, pass, "bench surrogate", absl::StrCat("10000 inputs;", detail));
}

}  // namespace
}  // namespace patfuzz

// With arguments, runs only the listed criteria.
int main(int argc, char **argv) {
  using namespace patfuzz;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int n) { return only.empty() || only.contains(n); };
  if (want(5)) Criterion5();
  if (want(3)) Criterion3();
  if (want(9)) Criterion9();
  if (want(7)) Criterion7();
  if (want(8)) Criterion8();
  if (want(1) || want(2) || want(4) || want(6)) {
    const SuiteRuns runs = RunSuite();
    if (want(1)) Criterion1(runs);
    if (want(2)) Criterion2(runs);
    if (want(4)) Criterion4(runs);
    if (want(6)) Criterion6(runs);
  }
  std::printf("acceptance: %d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
