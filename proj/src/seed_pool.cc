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

#include "patfuzz/seed_pool.h"

#include "absl/status/status.h"

namespace patfuzz {

absl::StatusOr<size_t> SeedPool::Select() {
  if (seeds_.empty()) {
    return absl::FailedPreconditionError(
        "seed pool is empty; at least one initial seed is required");
  }
  if (pos_ >= order_.size()) {
    order_.clear();
    for (size_t i = 0; i < seeds_.size(); ++i) {
      if (seeds_[i].favored) order_.push_back(i);
    }
    for (size_t i = 0; i < seeds_.size(); ++i) {
      if (!seeds_[i].favored) order_.push_back(i);
      seeds_[i].favored = false;
    }
    pos_ = 0;
    ++cycles_;
  }
  return order_[pos_++];
}

}  // namespace patfuzz
