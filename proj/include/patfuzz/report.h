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

// Cross-campaign accounting and report files.

#ifndef PATFUZZ_REPORT_H_
#define PATFUZZ_REPORT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "patfuzz/campaign.h"
#include "patfuzz/ratios.h"

namespace patfuzz {

inline constexpr uint32_t kReportSchemaVersion = 1;

struct CampaignResult {
  std::string target;
  Strategy strategy = Strategy::kPatternSet;
  uint32_t repetition = 0;
  CampaignStats stats;
  std::optional<RatioCounts> ratios;
};

// One row per (scope, strategy). Scopes are each target plus "suite" over
// all of them. Bugs are identified as "<target>/<key>" and pooled over
// repetitions.
struct ComparisonRow {
  std::string scope;
  Strategy strategy = Strategy::kPatternSet;
  uint64_t found = 0;
  uint64_t missed = 0;      // In the union of all strategies but not here.
  uint64_t additional = 0;  // Here but in no other strategy.
  uint64_t union_size = 0;
  uint64_t executions = 0;
  uint64_t dispatches = 0;
  CentiTicks ticks = 0;
  std::vector<std::string> missed_bugs;

  double VirtualThroughput() const;
};

inline constexpr std::string_view kSuiteScope = "suite";

std::vector<ComparisonRow> Compare(const std::vector<CampaignResult> &results);

struct ReportHeader {
  std::string config_digest;  // 16 hex digits of the effective config.
  uint64_t rng_seed = 0;
  // Echoed verbatim into report.json.
  std::string effective_config;
};

// Digest of an effective configuration rendering.
std::string ConfigDigest(std::string_view effective_config);

// Writes stats, comparison, ratios and timeline tables as CSV and one JSON
// document into `dir`, plus wall-clock measurements into wall.csv and
// wall.json. Everything but the wall files is deterministic.
absl::Status EmitReports(const std::string &dir, const ReportHeader &header,
                         const std::vector<CampaignResult> &results);

// Minimal reader for the CSV files above.
// One executor's replay of a saved corpus.
struct BenchRow {
  std::string executor;
  std::string classes;  // Empty for the native target.
  uint64_t execs = 0;
  CentiTicks ticks = 0;
  double wall_seconds = 0;
};

// Slowdown of `row` against `native` in percent.
double VirtualSlowdownPercent(const BenchRow &row, const BenchRow &native);
double WallSlowdownPercent(const BenchRow &row, const BenchRow &native);

// bench.csv and bench.json hold the virtual-clock table; bench_wall.csv the
// wall-clock one. The first row is the native target.
absl::Status EmitBenchReport(const std::string &dir, const ReportHeader &header,
                             const std::vector<BenchRow> &rows);

struct CsvTable {
  std::map<std::string, std::string> meta;  // From "# key=value" lines.
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Index of `column`, or -1.
  int Column(std::string_view column) const;
};
absl::StatusOr<CsvTable> ReadCsv(const std::string &path);

// Fixed rendering of ratios used in the reports.
std::string FormatRatio(double r);
std::string FormatRatio(const std::optional<double> &r);

}  // namespace patfuzz

#endif  // PATFUZZ_REPORT_H_
