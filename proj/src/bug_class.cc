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

#include "patfuzz/bug_class.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace patfuzz {

std::string_view BugClassName(BugClass cls) {
  switch (cls) {
    case BugClass::kAddressLike:
      return "address";
    case BugClass::kUndefinedLike:
      return "undefined";
    case BugClass::kMemoryLike:
      return "memory";
  }
  return "unknown";
}

std::optional<BugClass> ParseBugClass(std::string_view name) {
  for (BugClass c : kAllBugClasses) {
    if (BugClassName(c) == name) return c;
  }
  return std::nullopt;
}

uint32_t DefaultSlowdownPercent(BugClass cls) {
  switch (cls) {
    case BugClass::kAddressLike:
      return 326;
    case BugClass::kUndefinedLike:
      return 196;
    case BugClass::kMemoryLike:
      return 4552;
  }
  return 100;
}

bool Compatible(BugClass a, BugClass b) {
  const bool am = (a == BugClass::kAddressLike && b == BugClass::kMemoryLike);
  const bool ma = (a == BugClass::kMemoryLike && b == BugClass::kAddressLike);
  return !(am || ma);
}

std::string BugClassSet::ToString() const {
  std::string out;
  for (BugClass c : kAllBugClasses) {
    if (!Contains(c)) continue;
    if (!out.empty()) out += ",";
    out += BugClassName(c);
  }
  return out;
}

absl::Status ValidateClassSet(BugClassSet set) {
  if (set.empty()) {
    return absl::InvalidArgumentError("sanitizer class set is empty");
  }
  for (BugClass a : kAllBugClasses) {
    for (BugClass b : kAllBugClasses) {
      if (set.Contains(a) && set.Contains(b) && !Compatible(a, b)) {
        return absl::InvalidArgumentError(
            absl::StrCat("bug classes ", std::string(BugClassName(a)), " and ",
                         std::string(BugClassName(b)), " cannot share one executor"));
      }
    }
  }
  return absl::OkStatus();
}

SlowdownTable::SlowdownTable() {
  for (BugClass c : kAllBugClasses) {
    percent_[static_cast<size_t>(c)] = DefaultSlowdownPercent(c);
  }
}

absl::Status SlowdownTable::Set(BugClass c, uint32_t percent) {
  if (percent < 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("slowdown for ", std::string(BugClassName(c)),
                     " must be at least 100%, got ", percent, "%"));
  }
  percent_[static_cast<size_t>(c)] = percent;
  return absl::OkStatus();
}

uint32_t SlowdownTable::Combined(BugClassSet set) const {
  uint32_t total = 100;
  for (BugClass c : kAllBugClasses) {
    if (set.Contains(c)) total += percent(c) - 100;
  }
  return total;
}

absl::Status SlowdownFactorToPercent(double factor, uint32_t &percent) {
  if (!(factor >= 1.0) || factor > 1e6) {
    return absl::InvalidArgumentError(
        absl::StrCat("slowdown factor must be >= 1.0, got ", factor));
  }
  const double scaled = factor * 100.0;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6) {
    return absl::InvalidArgumentError(absl::StrCat(
        "slowdown factor ", factor, " is not a whole number of percent"));
  }
  percent = static_cast<uint32_t>(rounded);
  return absl::OkStatus();
}

}  // namespace patfuzz
