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

// The seed pool and its round-robin scheduler.

#ifndef PATFUZZ_SEED_POOL_H_
#define PATFUZZ_SEED_POOL_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "patfuzz/defs.h"

namespace patfuzz {

struct Seed {
  ByteArray input;
  uint64_t exec_index = 0;  // Execution that admitted it.
  CentiTicks cost = 0;
  // Set when the seed, or a mutant of it, most recently added coverage.
  bool favored = false;
};

// Cycles over the pool. At the start of each cycle the order is fixed:
// favored seeds first, then the others, each group in admission order.
// Building the cycle consumes the favored flags. Seeds admitted or favored
// mid-cycle take effect from the next cycle.
class SeedPool {
 public:
  void Add(Seed seed) { seeds_.push_back(std::move(seed)); }
  void MarkFavored(size_t index) { seeds_[index].favored = true; }

  // Index of the next seed; an error on an empty pool.
  absl::StatusOr<size_t> Select();

  size_t size() const { return seeds_.size(); }
  bool empty() const { return seeds_.empty(); }
  const Seed &operator[](size_t i) const { return seeds_[i]; }
  const std::vector<Seed> &seeds() const { return seeds_; }
  uint64_t cycles() const { return cycles_; }

 private:
  std::vector<Seed> seeds_;
  std::vector<size_t> order_;
  size_t pos_ = 0;
  uint64_t cycles_ = 0;
};

}  // namespace patfuzz

#endif  // PATFUZZ_SEED_POOL_H_
