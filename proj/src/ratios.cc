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

#include "patfuzz/ratios.h"

#include "absl/strings/str_cat.h"

namespace patfuzz {

BugOracle PoolOracle(SanitizerDispatcher &pool) {
  return [&pool](ByteSpan input) -> absl::StatusOr<bool> {
    bool fired = false;
    for (const SanitizerVerdict &v : pool.Dispatch(input)) {
      if (v.outcome == VerdictOutcome::kExecutorError) {
        return absl::UnavailableError(
            absl::StrCat("oracle executor ", v.executor_id, ": ", v.error));
      }
      fired |= v.outcome == VerdictOutcome::kCrash;
    }
    return fired;
  };
}

absl::StatusOr<RatioCounts> ComputeRatioCounts(const CampaignOutput &out,
                                               const BugOracle &oracle) {
  if (out.log.size() != out.stats.total_execs) {
    return absl::UnavailableError(absl::StrCat(
        "execution log has ", out.log.size(), " records for ",
        out.stats.total_execs, " executions; run with the log enabled"));
  }
  RatioCounts c;
  c.executions = out.log.size();
  for (const ExecRecord &r : out.log) {
    c.set_unique += r.set_unique;
    c.hit_unique += r.hit_unique;
    c.cov_increase += r.cov_increase;
    auto fired = oracle(r.input);
    if (!fired.ok()) return fired.status();
    if (!*fired) continue;
    ++c.bug_triggering;
    c.bug_set_unique += r.set_unique;
    c.bug_hit_unique += r.hit_unique;
    c.bug_cov_increase += r.cov_increase;
  }
  return c;
}

namespace {

double Share(uint64_t part, uint64_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / whole;
}

std::optional<double> BugShare(uint64_t part, uint64_t whole) {
  if (whole == 0) return std::nullopt;
  return static_cast<double>(part) / whole;
}

}  // namespace

Ratios RatiosOf(const RatioCounts &c) {
  Ratios r;
  r.all_set = Share(c.set_unique, c.executions);
  r.all_hit = Share(c.hit_unique, c.executions);
  r.all_cov = Share(c.cov_increase, c.executions);
  r.bug_set = BugShare(c.bug_set_unique, c.bug_triggering);
  r.bug_hit = BugShare(c.bug_hit_unique, c.bug_triggering);
  r.bug_cov = BugShare(c.bug_cov_increase, c.bug_triggering);
  return r;
}

RatioSummary SummarizeRatios(const std::vector<RatioCounts> &counts) {
  RatioSummary s;
  double bug_sum[3] = {0, 0, 0};
  uint64_t with_bugs = 0;
  for (const RatioCounts &c : counts) {
    const Ratios r = RatiosOf(c);
    s.mean.all_set += r.all_set;
    s.mean.all_hit += r.all_hit;
    s.mean.all_cov += r.all_cov;
    if (c.bug_triggering > 0) {
      ++with_bugs;
      bug_sum[0] += *r.bug_set;
      bug_sum[1] += *r.bug_hit;
      bug_sum[2] += *r.bug_cov;
    }
    s.total.executions += c.executions;
    s.total.set_unique += c.set_unique;
    s.total.hit_unique += c.hit_unique;
    s.total.cov_increase += c.cov_increase;
    s.total.bug_triggering += c.bug_triggering;
    s.total.bug_set_unique += c.bug_set_unique;
    s.total.bug_hit_unique += c.bug_hit_unique;
    s.total.bug_cov_increase += c.bug_cov_increase;
  }
  if (!counts.empty()) {
    s.mean.all_set /= counts.size();
    s.mean.all_hit /= counts.size();
    s.mean.all_cov /= counts.size();
  }
  if (with_bugs > 0) {
    s.mean.bug_set = bug_sum[0] / with_bugs;
    s.mean.bug_hit = bug_sum[1] / with_bugs;
    s.mean.bug_cov = bug_sum[2] / with_bugs;
  }
  s.pooled = RatiosOf(s.total);
  return s;
}

}  // namespace patfuzz
