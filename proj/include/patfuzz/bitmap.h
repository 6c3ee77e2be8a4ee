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

// Edge-hit bitmaps and the cumulative coverage ("virgin") map.

#ifndef PATFUZZ_BITMAP_H_
#define PATFUZZ_BITMAP_H_

#include <algorithm>
#include <array>
#include <cstring>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"

namespace patfuzz {

// Returns OK iff `map_size` is a positive power of two.
absl::Status ValidateMapSize(size_t map_size);

// Maps a raw hit count to its bucket bit. Buckets are
// {1},{2},{3},{4-7},{8-15},{16-31},{32-127},{128-255}, rendered as the bits
// 1,2,4,...,128 respectively; a zero count maps to 0.
inline uint8_t BucketOf(uint8_t count) {
  static constexpr std::array<uint8_t, 256> kTable = [] {
    std::array<uint8_t, 256> t{};
    for (int i = 1; i < 256; ++i) {
      if (i == 1) t[i] = 1;
      else if (i == 2) t[i] = 2;
      else if (i == 3) t[i] = 4;
      else if (i <= 7) t[i] = 8;
      else if (i <= 15) t[i] = 16;
      else if (i <= 31) t[i] = 32;
      else if (i <= 127) t[i] = 64;
      else t[i] = 128;
    }
    return t;
  }();
  return kTable[count];
}

// Calls fn(index, count) for every nonzero counter in ascending index order.
// All-zero 8-byte words are skipped.
template <typename Fn>
void ForEachNonzeroCounter(std::span<const uint8_t> counters, Fn fn) {
  const size_t n = counters.size();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    uint64_t word;
    std::memcpy(&word, counters.data() + i, sizeof(word));
    if (word == 0) continue;
    for (size_t j = i; j < i + 8; ++j) {
      if (counters[j] != 0) fn(j, counters[j]);
    }
  }
  for (; i < n; ++i) {
    if (counters[i] != 0) fn(i, counters[i]);
  }
}

// Per-execution array of 8-bit edge counters. Counters saturate at 255.
class Bitmap {
 public:
  explicit Bitmap(size_t map_size = 1 << 16) : counters_(map_size, 0) {}

  size_t size() const { return counters_.size(); }

  void Hit(size_t index) {
    uint8_t &c = counters_[index];
    if (c != 0xff) ++c;
  }
  void Clear() { std::fill(counters_.begin(), counters_.end(), 0); }

  uint8_t operator[](size_t index) const { return counters_[index]; }
  std::span<const uint8_t> counters() const { return counters_; }
  std::span<uint8_t> mutable_counters() { return counters_; }

  bool operator==(const Bitmap &other) const = default;

 private:
  std::vector<uint8_t> counters_;
};

// Cumulative OR of bucket-classified bitmaps over a campaign.
class CoverageMap {
 public:
  explicit CoverageMap(size_t map_size = 1 << 16) : bits_(map_size, 0) {}

  size_t size() const { return bits_.size(); }

  // Bucket-classifies `bitmap`, ORs it in, and returns true iff a bit that
  // was clear before is now set. Sizes must match.
  absl::Status Update(const Bitmap &bitmap, bool &increased);

  // Like Update but leaves the map untouched.
  absl::Status WouldIncrease(const Bitmap &bitmap, bool &increased) const;

  // Number of set bits across the whole map.
  size_t CoveredBits() const;
  // Number of slots with any bit set.
  size_t CoveredEdges() const;

  uint8_t operator[](size_t index) const { return bits_[index]; }

 private:
  std::vector<uint8_t> bits_;
};

}  // namespace patfuzz

#endif  // PATFUZZ_BITMAP_H_
