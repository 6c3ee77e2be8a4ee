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

#include "patfuzz/triage.h"

#include <algorithm>
#include <tuple>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace patfuzz {

std::string BugKey::ToString() const {
  if (ground_truth) return absl::StrCat("bug:", id);
  return absl::StrFormat("crash:%d@%016x", id, pattern);
}

std::optional<BugKey> BugKey::Parse(std::string_view text) {
  BugKey key;
  if (text.rfind("bug:", 0) == 0) {
    if (!absl::SimpleAtoi(std::string(text.substr(4)), &key.id)) {
      return std::nullopt;
    }
    return key;
  }
  if (text.rfind("crash:", 0) == 0) {
    const size_t at = text.find('@');
    if (at == std::string_view::npos || text.size() - at - 1 != 16) {
      return std::nullopt;
    }
    key.ground_truth = false;
    if (!absl::SimpleAtoi(std::string(text.substr(6, at - 6)), &key.id) ||
        text.substr(at + 1).find_first_not_of("0123456789abcdef") !=
            std::string_view::npos) {
      return std::nullopt;
    }
    key.pattern = std::stoull(std::string(text.substr(at + 1)), nullptr, 16);
    return key;
  }
  return std::nullopt;
}

BugKey GroundTruthKey(uint64_t bug_id) { return BugKey{true, bug_id, 0}; }

BugKey ExternalKey(uint64_t crash_id, PatternDigest set_pattern) {
  return BugKey{false, crash_id, set_pattern.value};
}

void Triage::Ingest(const CrashEvent &e) {
  for (const BugKey &key : e.keys) {
    BugReport candidate{key, e.exec_index, e.tick, e.input_digest, e.detector};
    auto [it, inserted] = reports_.try_emplace(key, candidate);
    if (inserted) continue;
    BugReport &r = it->second;
    // Earliest trigger wins; ties are broken on the remaining fields so the
    // result does not depend on ingestion order.
    auto rank = [](const BugReport &x) {
      return std::tie(x.first_exec_index, x.first_tick, x.input_digest,
                      x.detector);
    };
    if (rank(candidate) < rank(r)) r = candidate;
  }
}

std::vector<BugReport> Triage::Reports() const {
  std::vector<BugReport> out;
  out.reserve(reports_.size());
  for (const auto &[key, r] : reports_) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const BugReport &a, const BugReport &b) { return a.key < b.key; });
  return out;
}

std::vector<BugReport> Dedupe(const std::vector<CrashEvent> &events) {
  Triage t;
  for (const CrashEvent &e : events) t.Ingest(e);
  return t.Reports();
}

}  // namespace patfuzz
