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

#include "patfuzz/crash_store.h"

#include <filesystem>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"

namespace patfuzz {

std::string SidecarJson(const CrashSidecar &s) {
  nlohmann::json j;
  j["exec_index"] = s.exec_index;
  j["tick"] = s.tick / kCentiTicksPerTick;
  j["strategy"] = s.strategy;
  j["native_status"] = ExecStatusName(s.native_status);
  if (s.native_status == ExecStatus::kCrash) {
    j["native_crash_id"] = s.native_crash_id;
  }
  nlohmann::json verdicts = nlohmann::json::array();
  for (const SanitizerVerdict &v : s.verdicts) {
    nlohmann::json jv = {{"executor", v.executor_id},
                         {"outcome", VerdictOutcomeName(v.outcome)},
                         {"crash_ids", v.crash_ids},
                         {"cost_ticks", v.cost / kCentiTicksPerTick}};
    if (!v.error.empty()) jv["error"] = v.error;
    verdicts.push_back(std::move(jv));
  }
  j["verdicts"] = std::move(verdicts);
  nlohmann::json keys = nlohmann::json::array();
  for (const BugKey &k : s.keys) keys.push_back(k.ToString());
  j["bugs"] = std::move(keys);
  return j.dump(1) + "\n";
}

absl::Status CrashStore::Init() {
  if (dir_.empty()) return absl::OkStatus();
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir_, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<bool> CrashStore::Save(ByteSpan input,
                                      const CrashSidecar &sidecar) {
  const PatternDigest d = DigestBytes(input);
  if (!saved_.insert(d).second) return false;
  if (dir_.empty()) return true;
  const std::string base = absl::StrFormat("%s/%016x", dir_, d.value);
  std::ofstream data(base, std::ios::binary | std::ios::trunc);
  data.write(reinterpret_cast<const char *>(input.data()),
             static_cast<std::streamsize>(input.size()));
  std::ofstream meta(base + ".json", std::ios::trunc);
  meta << SidecarJson(sidecar);
  data.close();
  meta.close();
  if (!data || !meta) {
    return absl::UnavailableError(absl::StrCat("cannot write crash ", base));
  }
  return true;
}

}  // namespace patfuzz
