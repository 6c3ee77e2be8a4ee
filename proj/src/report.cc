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

#include "patfuzz/report.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "patfuzz/pattern.h"

namespace patfuzz {

using nlohmann::json;

double ComparisonRow::VirtualThroughput() const {
  if (ticks == 0) return 0;
  return static_cast<double>(executions) * 1e6 * kCentiTicksPerTick /
         static_cast<double>(ticks);
}

std::vector<ComparisonRow> Compare(const std::vector<CampaignResult> &results) {
  std::vector<Strategy> strategies;
  std::vector<std::string> targets;
  for (const CampaignResult &r : results) {
    if (std::find(strategies.begin(), strategies.end(), r.strategy) ==
        strategies.end()) {
      strategies.push_back(r.strategy);
    }
    if (std::find(targets.begin(), targets.end(), r.target) == targets.end()) {
      targets.push_back(r.target);
    }
  }
  std::sort(strategies.begin(), strategies.end());
  std::vector<std::string> scopes = targets;
  scopes.emplace_back(kSuiteScope);

  std::vector<ComparisonRow> rows;
  for (const std::string &scope : scopes) {
    const bool suite = scope == kSuiteScope;
    std::map<Strategy, std::set<std::string>> bugs;
    std::map<Strategy, ComparisonRow> acc;
    for (const CampaignResult &r : results) {
      if (!suite && r.target != scope) continue;
      ComparisonRow &row = acc[r.strategy];
      row.executions += r.stats.total_execs;
      row.dispatches += r.stats.dispatched_execs;
      row.ticks += r.stats.total_ticks();
      for (const BugReport &b : r.stats.bugs) {
        bugs[r.strategy].insert(absl::StrCat(r.target, "/", b.key.ToString()));
      }
    }
    std::set<std::string> all;
    for (const auto &[s, set] : bugs) all.insert(set.begin(), set.end());
    for (Strategy s : strategies) {
      if (!acc.contains(s)) continue;
      ComparisonRow row = acc[s];
      row.scope = scope;
      row.strategy = s;
      row.union_size = all.size();
      const std::set<std::string> &mine = bugs[s];
      row.found = mine.size();
      for (const std::string &b : all) {
        if (!mine.contains(b)) row.missed_bugs.push_back(b);
      }
      row.missed = row.missed_bugs.size();
      for (const std::string &b : mine) {
        bool elsewhere = false;
        for (const auto &[other, set] : bugs) {
          if (other != s && set.contains(b)) elsewhere = true;
        }
        row.additional += !elsewhere;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string ConfigDigest(std::string_view effective_config) {
  const ByteSpan bytes(reinterpret_cast<const uint8_t *>(
                           effective_config.data()),
                       effective_config.size());
  return absl::StrFormat("%016x", DigestBytes(bytes).value);
}

std::string FormatRatio(double r) { return absl::StrFormat("%.9f", r); }

std::string FormatRatio(const std::optional<double> &r) {
  return r ? FormatRatio(*r) : std::string();
}

namespace {

json OptionalJson(const std::optional<double> &r) {
  return r ? json(*r) : json(nullptr);
}

std::string CsvField(const std::string &v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  CsvWriter(const ReportHeader &h, std::string_view table,
            std::vector<std::string> columns) {
    absl::StrAppend(&text_, "# patfuzz report\n# table=", std::string(table),
                    "\n# schema_version=", kReportSchemaVersion,
                    "\n# artifact_version=", std::string(kArtifactVersion),
                    "\n# config_digest=", h.config_digest,
                    "\n# rng_seed=", h.rng_seed, "\n# digest_algorithm=xxh64\n",
                    absl::StrJoin(columns, ","), "\n");
  }
  void Row(const std::vector<std::string> &fields) {
    std::vector<std::string> quoted;
    for (const std::string &f : fields) quoted.push_back(CsvField(f));
    absl::StrAppend(&text_, absl::StrJoin(quoted, ","), "\n");
  }
  const std::string &text() const { return text_; }

 private:
  std::string text_;
};

absl::Status WriteFile(const std::filesystem::path &path,
                       const std::string &text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) {
    return absl::UnavailableError(
        absl::StrCat("cannot write ", path.string()));
  }
  return absl::OkStatus();
}

json HeaderJson(const ReportHeader &h) {
  return {{"schema_version", kReportSchemaVersion},
          {"artifact_version", std::string(kArtifactVersion)},
          {"config_digest", h.config_digest},
          {"rng_seed", h.rng_seed},
          {"digest_algorithm", "xxh64"},
          {"effective_config", h.effective_config}};
}

std::string S(uint64_t v) { return absl::StrCat(v); }

std::string Name(Strategy s) { return std::string(StrategyName(s)); }

void RatioRow(CsvWriter &csv, json &arr, const std::string &row,
              const std::string &target, const std::string &strategy,
              const std::string &rep, const RatioCounts &c, const Ratios &r) {
  csv.Row({row, target, strategy, rep, S(c.executions), S(c.set_unique),
           S(c.hit_unique), S(c.cov_increase), S(c.bug_triggering),
           S(c.bug_set_unique), S(c.bug_hit_unique), S(c.bug_cov_increase),
           FormatRatio(r.all_set), FormatRatio(r.all_hit),
           FormatRatio(r.all_cov), FormatRatio(r.bug_set),
           FormatRatio(r.bug_hit), FormatRatio(r.bug_cov)});
  arr.push_back({{"row", row},
                 {"target", target},
                 {"strategy", strategy},
                 {"repetition", rep},
                 {"executions", c.executions},
                 {"set_unique", c.set_unique},
                 {"hit_unique", c.hit_unique},
                 {"cov_increase", c.cov_increase},
                 {"bug_triggering", c.bug_triggering},
                 {"bug_set_unique", c.bug_set_unique},
                 {"bug_hit_unique", c.bug_hit_unique},
                 {"bug_cov_increase", c.bug_cov_increase},
                 {"all_set", r.all_set},
                 {"all_hit", r.all_hit},
                 {"all_cov", r.all_cov},
                 {"bug_set", OptionalJson(r.bug_set)},
                 {"bug_hit", OptionalJson(r.bug_hit)},
                 {"bug_cov", OptionalJson(r.bug_cov)}});
}

}  // namespace

absl::Status EmitReports(const std::string &dir, const ReportHeader &header,
                         const std::vector<CampaignResult> &results) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  json doc = {{"header", HeaderJson(header)}};

  CsvWriter stats(header, "stats",
                  {"target", "strategy", "repetition", "rng_seed",
                   "total_execs", "native_crashes", "timeouts",
                   "dispatched_execs", "post_dispatched",
                   "native_crash_dispatches", "member_dispatches",
                   "executor_errors", "pattern_queries", "pattern_insertions",
                   "coverage_increases", "coverage_bits", "coverage_edges",
                   "seeds", "native_ticks", "sanitized_ticks", "total_ticks",
                   "virtual_throughput", "crashes_saved", "audit_collisions",
                   "audit_distinct", "bugs", "aborted"});
  json jstats = json::array();
  CsvWriter timeline(header, "timeline",
                     {"target", "strategy", "repetition", "bug",
                      "first_exec_index", "first_tick", "detector",
                      "input_digest"});
  json jtimeline = json::array();
  CsvWriter wall(header, "wall",
                 {"target", "strategy", "repetition", "wall_seconds",
                  "digest_seconds", "extract_seconds", "digest_share"});
  json jwall = json::array();
  for (const CampaignResult &r : results) {
    const CampaignStats &st = r.stats;
    std::vector<std::string> members;
    json jm = json::object();
    for (const auto &[id, n] : st.dispatches) {
      members.push_back(absl::StrCat(id, "=", n));
      jm[id] = n;
    }
    const std::string strategy = Name(r.strategy);
    stats.Row({r.target, strategy, S(r.repetition), S(st.rng_seed),
               S(st.total_execs), S(st.native_crashes), S(st.timeouts),
               S(st.dispatched_execs), S(st.post_dispatched),
               S(st.native_crash_dispatches), absl::StrJoin(members, ";"),
               S(st.executor_errors), S(st.pattern_queries),
               S(st.pattern_insertions), S(st.coverage_increases),
               S(st.coverage_bits), S(st.coverage_edges), S(st.seeds),
               S(st.native_ticks), S(st.sanitized_ticks),
               S(st.total_ticks()),
               absl::StrFormat("%.3f", st.VirtualThroughput()),
               S(st.crashes_saved), S(st.audit_collisions),
               S(st.audit_distinct), S(st.bugs.size()),
               st.aborted ? "1" : "0"});
    json mutations = json::object();
    for (size_t i = 0; i < kNumMutationOps; ++i) {
      mutations[std::string(MutationOpName(static_cast<MutationOp>(i)))] =
          st.mutation_counts[i];
    }
    jstats.push_back({{"target", r.target},
                      {"strategy", strategy},
                      {"repetition", r.repetition},
                      {"rng_seed", st.rng_seed},
                      {"total_execs", st.total_execs},
                      {"native_crashes", st.native_crashes},
                      {"timeouts", st.timeouts},
                      {"dispatched_execs", st.dispatched_execs},
                      {"post_dispatched", st.post_dispatched},
                      {"native_crash_dispatches", st.native_crash_dispatches},
                      {"member_dispatches", jm},
                      {"executor_errors", st.executor_errors},
                      {"pattern_queries", st.pattern_queries},
                      {"pattern_insertions", st.pattern_insertions},
                      {"coverage_increases", st.coverage_increases},
                      {"coverage_bits", st.coverage_bits},
                      {"coverage_edges", st.coverage_edges},
                      {"seeds", st.seeds},
                      {"native_ticks", st.native_ticks},
                      {"sanitized_ticks", st.sanitized_ticks},
                      {"total_ticks", st.total_ticks()},
                      {"crashes_saved", st.crashes_saved},
                      {"audit_collisions", st.audit_collisions},
                      {"audit_distinct", st.audit_distinct},
                      {"mutation_counts", mutations},
                      {"bugs", st.bugs.size()},
                      {"aborted", st.aborted},
                      {"abort_reason", st.abort_reason}});
    for (const BugReport &b : st.bugs) {
      const std::string digest =
          absl::StrFormat("%016x", b.input_digest.value);
      timeline.Row({r.target, strategy, S(r.repetition), b.key.ToString(),
                    S(b.first_exec_index), S(b.first_tick), b.detector,
                    digest});
      jtimeline.push_back({{"target", r.target},
                           {"strategy", strategy},
                           {"repetition", r.repetition},
                           {"bug", b.key.ToString()},
                           {"first_exec_index", b.first_exec_index},
                           {"first_tick", b.first_tick},
                           {"detector", b.detector},
                           {"input_digest", digest}});
    }
    wall.Row({r.target, strategy, S(r.repetition),
              absl::StrFormat("%.6f", st.wall_seconds),
              absl::StrFormat("%.6f", st.digest_seconds),
              absl::StrFormat("%.6f", st.extract_seconds),
              absl::StrFormat("%.6f", st.DigestTimeShare())});
    jwall.push_back({{"target", r.target},
                     {"strategy", strategy},
                     {"repetition", r.repetition},
                     {"wall_seconds", st.wall_seconds},
                     {"digest_seconds", st.digest_seconds},
                     {"extract_seconds", st.extract_seconds},
                     {"digest_share", st.DigestTimeShare()}});
  }

  CsvWriter comparison(header, "comparison",
                       {"scope", "strategy", "found", "missed", "additional",
                        "union", "executions", "dispatches", "total_ticks",
                        "virtual_throughput", "missed_bugs"});
  json jcomparison = json::array();
  for (const ComparisonRow &row : Compare(results)) {
    comparison.Row({row.scope, Name(row.strategy), S(row.found),
                    S(row.missed), S(row.additional), S(row.union_size),
                    S(row.executions), S(row.dispatches), S(row.ticks),
                    absl::StrFormat("%.3f", row.VirtualThroughput()),
                    absl::StrJoin(row.missed_bugs, " ")});
    jcomparison.push_back({{"scope", row.scope},
                           {"strategy", Name(row.strategy)},
                           {"found", row.found},
                           {"missed", row.missed},
                           {"additional", row.additional},
                           {"union", row.union_size},
                           {"executions", row.executions},
                           {"dispatches", row.dispatches},
                           {"total_ticks", row.ticks},
                           {"virtual_throughput", row.VirtualThroughput()},
                           {"missed_bugs", row.missed_bugs}});
  }

  CsvWriter ratios(header, "ratios",
                   {"row", "target", "strategy", "repetition", "executions",
                    "set_unique", "hit_unique", "cov_increase",
                    "bug_triggering", "bug_set_unique", "bug_hit_unique",
                    "bug_cov_increase", "all_set", "all_hit", "all_cov",
                    "bug_set", "bug_hit", "bug_cov"});
  json jratios = json::array();
  std::map<Strategy, std::vector<RatioCounts>> by_strategy;
  for (const CampaignResult &r : results) {
    if (!r.ratios) continue;
    by_strategy[r.strategy].push_back(*r.ratios);
    RatioRow(ratios, jratios, "campaign", r.target, Name(r.strategy),
             S(r.repetition), *r.ratios, RatiosOf(*r.ratios));
  }
  for (const auto &[s, counts] : by_strategy) {
    const RatioSummary sum = SummarizeRatios(counts);
    RatioRow(ratios, jratios, "mean", "*", Name(s), "*", sum.total, sum.mean);
    RatioRow(ratios, jratios, "pooled", "*", Name(s), "*", sum.total,
             sum.pooled);
  }

  doc["stats"] = jstats;
  doc["comparison"] = jcomparison;
  doc["ratios"] = jratios;
  doc["timeline"] = jtimeline;
  json wall_doc = {{"header", HeaderJson(header)}, {"wall", jwall}};

  const std::pair<const char *, std::string> files[] = {
      {"stats.csv", stats.text()},
      {"comparison.csv", comparison.text()},
      {"ratios.csv", ratios.text()},
      {"timeline.csv", timeline.text()},
      {"report.json", doc.dump(1) + "\n"},
      {"wall.csv", wall.text()},
      {"wall.json", wall_doc.dump(1) + "\n"},
  };
  for (const auto &[name, text] : files) {
    if (auto s = WriteFile(root / name, text); !s.ok()) return s;
  }
  return absl::OkStatus();
}

double VirtualSlowdownPercent(const BenchRow &row, const BenchRow &native) {
  if (native.ticks == 0) return 0;
  return 100.0 * static_cast<double>(row.ticks) /
         static_cast<double>(native.ticks);
}

double WallSlowdownPercent(const BenchRow &row, const BenchRow &native) {
  if (native.wall_seconds <= 0) return 0;
  return 100.0 * row.wall_seconds / native.wall_seconds;
}

absl::Status EmitBenchReport(const std::string &dir, const ReportHeader &header,
                             const std::vector<BenchRow> &rows) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  CsvWriter bench(header, "bench",
                  {"executor", "classes", "execs", "virtual_ticks",
                   "virtual_slowdown_percent"});
  CsvWriter wall(header, "bench_wall",
                 {"executor", "classes", "execs", "wall_seconds",
                  "wall_slowdown_percent"});
  json jrows = json::array();
  for (const BenchRow &r : rows) {
    const double v = rows.empty() ? 0 : VirtualSlowdownPercent(r, rows[0]);
    bench.Row({r.executor, r.classes, S(r.execs),
               absl::StrFormat("%.2f", r.ticks / double(kCentiTicksPerTick)),
               absl::StrFormat("%.3f", v)});
    wall.Row({r.executor, r.classes, S(r.execs),
              absl::StrFormat("%.6f", r.wall_seconds),
              absl::StrFormat("%.3f", WallSlowdownPercent(r, rows[0]))});
    jrows.push_back({{"executor", r.executor},
                     {"classes", r.classes},
                     {"execs", r.execs},
                     {"virtual_centiticks", r.ticks},
                     {"virtual_slowdown_percent", v}});
  }
  json doc = {{"header", HeaderJson(header)}, {"bench", jrows}};
  for (const auto &[name, text] :
       {std::pair<const char *, std::string>{"bench.csv", bench.text()},
        {"bench_wall.csv", wall.text()},
        {"bench.json", doc.dump(1) + "\n"}}) {
    if (auto s = WriteFile(root / name, text); !s.ok()) return s;
  }
  return absl::OkStatus();
}

int CsvTable::Column(std::string_view column) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string &line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<CsvTable> ReadCsv(const std::string &path) {
  std::ifstream f(path);
  if (!f) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  CsvTable t;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.rfind("# ", 0) == 0) {
      const size_t eq = line.find('=');
      if (eq != std::string::npos) {
        t.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      }
      continue;
    }
    std::vector<std::string> fields = SplitCsvLine(line);
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", lineno, ": expected ", t.columns.size(),
                       " fields, got ", fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.columns.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no header row"));
  }
  return t;
}

}  // namespace patfuzz
