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

// Shared vocabulary types for patfuzz.

#ifndef PATFUZZ_DEFS_H_
#define PATFUZZ_DEFS_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patfuzz {

using ByteArray = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// Virtual clock. One tick is one virtual microsecond; all costs are kept in
// hundredths of a tick so that integer slowdown percentages compose exactly:
// a run costing `c` native ticks costs `c * percent` centiticks sanitized.
using CentiTicks = uint64_t;
inline constexpr CentiTicks kCentiTicksPerTick = 100;

inline constexpr size_t kDefaultMapSize = 1 << 16;
inline constexpr size_t kDefaultMaxInputLen = 4096;
inline constexpr size_t kDefaultHavocStack = 16;
inline constexpr uint32_t kDefaultStepCap = 1024;

inline constexpr std::string_view kArtifactVersion = "0.1.0";

using EdgeId = uint32_t;
using NodeId = uint32_t;
using BugId = uint32_t;

// Deterministic random source. The engine's output sequence is fixed by the
// standard; bounded draws are done here rather than with <random>
// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, n). `n` must be positive.
  uint64_t Below(uint64_t n) {
    // Rejection sampling on the top of the range keeps the draw unbiased.
    const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                           std::numeric_limits<uint64_t>::max() % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [lo, hi].
  uint64_t Between(uint64_t lo, uint64_t hi) { return lo + Below(hi - lo + 1); }

  // True with probability num/den.
  bool Chance(uint64_t num, uint64_t den) { return Below(den) < num; }

  uint8_t Byte() { return static_cast<uint8_t>(engine_() >> 56); }

 private:
  std::mt19937_64 engine_;
};

// Lower-case hex rendering of a byte string and its inverse.
std::string HexEncode(ByteSpan bytes);
bool HexDecode(std::string_view hex, ByteArray &out);

}  // namespace patfuzz

#endif  // PATFUZZ_DEFS_H_
