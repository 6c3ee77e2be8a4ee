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

#include "patfuzz/bitmap.h"

#include <bit>
#include <cstring>

#include "absl/strings/str_cat.h"

namespace patfuzz {

absl::Status ValidateMapSize(size_t map_size) {
  if (map_size == 0 || !std::has_single_bit(map_size)) {
    return absl::InvalidArgumentError(
        absl::StrCat("map_size must be a power of two, got ", map_size));
  }
  if (map_size > (size_t{1} << 28)) {
    return absl::InvalidArgumentError(
        absl::StrCat("map_size too large: ", map_size));
  }
  return absl::OkStatus();
}

namespace {

absl::Status CheckSizes(size_t map, size_t bitmap) {
  if (map != bitmap) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bitmap length ", bitmap, " does not match coverage map length ", map));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status CoverageMap::Update(const Bitmap &bitmap, bool &increased) {
  if (auto s = CheckSizes(bits_.size(), bitmap.size()); !s.ok()) return s;
  increased = false;
  ForEachNonzeroCounter(bitmap.counters(), [&](size_t i, uint8_t count) {
    const uint8_t bucket = BucketOf(count);
    if (bucket & ~bits_[i]) {
      increased = true;
      bits_[i] |= bucket;
    }
  });
  return absl::OkStatus();
}

absl::Status CoverageMap::WouldIncrease(const Bitmap &bitmap,
                                        bool &increased) const {
  if (auto s = CheckSizes(bits_.size(), bitmap.size()); !s.ok()) return s;
  increased = false;
  ForEachNonzeroCounter(bitmap.counters(), [&](size_t i, uint8_t count) {
    if (BucketOf(count) & ~bits_[i]) increased = true;
  });
  return absl::OkStatus();
}

size_t CoverageMap::CoveredBits() const {
  size_t total = 0;
  for (uint8_t b : bits_) total += std::popcount(b);
  return total;
}

size_t CoverageMap::CoveredEdges() const {
  size_t total = 0;
  for (uint8_t b : bits_) total += b != 0;
  return total;
}

}  // namespace patfuzz
