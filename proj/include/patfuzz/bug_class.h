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

// Sanitizer-style bug classes and their virtual-clock slowdowns.

#ifndef PATFUZZ_BUG_CLASS_H_
#define PATFUZZ_BUG_CLASS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"

namespace patfuzz {

enum class BugClass : uint8_t {
  kAddressLike = 0,
  kUndefinedLike = 1,
  kMemoryLike = 2,
};

inline constexpr std::array<BugClass, 3> kAllBugClasses = {
    BugClass::kAddressLike, BugClass::kUndefinedLike, BugClass::kMemoryLike};

std::string_view BugClassName(BugClass cls);
std::optional<BugClass> ParseBugClass(std::string_view name);

// Average slowdowns over native execution, in percent: 326, 196 and 4552.
uint32_t DefaultSlowdownPercent(BugClass cls);

// AddressLike and MemoryLike cannot be combined in one executor; every other
// pair can.
bool Compatible(BugClass a, BugClass b);

// Small bitset of bug classes.
class BugClassSet {
 public:
  constexpr BugClassSet() = default;
  constexpr BugClassSet(std::initializer_list<BugClass> classes) {
    for (BugClass c : classes) Insert(c);
  }

  constexpr void Insert(BugClass c) { bits_ |= Bit(c); }
  constexpr bool Contains(BugClass c) const { return (bits_ & Bit(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr uint8_t bits() const { return bits_; }

  bool operator==(const BugClassSet &) const = default;

  // Comma-separated class names, e.g. "address,undefined".
  std::string ToString() const;

 private:
  static constexpr uint8_t Bit(BugClass c) {
    return static_cast<uint8_t>(1u << static_cast<uint8_t>(c));
  }
  uint8_t bits_ = 0;
};

// Non-empty and pairwise compatible.
absl::Status ValidateClassSet(BugClassSet set);

// Slowdown per class in percent, defaulting to DefaultSlowdownPercent().
class SlowdownTable {
 public:
  SlowdownTable();

  uint32_t percent(BugClass c) const {
    return percent_[static_cast<size_t>(c)];
  }
  absl::Status Set(BugClass c, uint32_t percent);

  // Slowdown of one executor instrumented for all of `set`: the per-class
  // overheads add, i.e. 100 + sum(percent - 100).
  uint32_t Combined(BugClassSet set) const;

  bool operator==(const SlowdownTable &) const = default;

 private:
  std::array<uint32_t, 3> percent_;
};

// Converts a multiplicative factor such as 3.26 into a whole percent (326).
// Factors below 1.0 or not representable in hundredths are rejected.
absl::Status SlowdownFactorToPercent(double factor, uint32_t &percent);

}  // namespace patfuzz

#endif  // PATFUZZ_BUG_CLASS_H_
