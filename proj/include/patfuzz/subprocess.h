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

// A persistent helper process that launches external commands on behalf of
// the campaign. The helper is forked once, before any input is run; each
// execution then forks from the small helper instead of the campaign
// process. Every command of one runner shares the helper.

#ifndef PATFUZZ_SUBPROCESS_H_
#define PATFUZZ_SUBPROCESS_H_

#include <sys/types.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "patfuzz/defs.h"

namespace patfuzz {

enum class InputDelivery { kStdin, kFile };

// Environment variable naming the shared-memory bitmap for a child.
inline constexpr char kShmEnvVar[] = "PATFUZZ_SHM_ID";
// Inherited variables with this prefix are not passed to children.
inline constexpr char kInternalEnvPrefix[] = "PATFUZZ_";

struct CommandSpec {
  // argv[0] is looked up in PATH. An argument equal to "@@" is replaced by
  // the input file path; with kFile delivery and no "@@", the path is
  // appended.
  std::vector<std::string> argv;
  InputDelivery delivery = InputDelivery::kStdin;
  // Size of the shared-memory edge map the child writes, 0 for none.
  size_t bitmap_size = 0;
};

enum class ProcessOutcome { kExited, kSignaled, kTimedOut, kSpawnFailed };

struct ProcessResult {
  ProcessOutcome outcome = ProcessOutcome::kExited;
  // Exit code, signal number, or errno for kSpawnFailed.
  int value = 0;
  uint64_t elapsed_us = 0;
};

class CommandRunner {
 public:
  static absl::StatusOr<std::unique_ptr<CommandRunner>> Start(
      std::vector<CommandSpec> commands);
  ~CommandRunner();

  CommandRunner(const CommandRunner &) = delete;
  CommandRunner &operator=(const CommandRunner &) = delete;

  size_t size() const { return commands_.size(); }

  // Runs command `index` on `input` with a deadline. When the command has a
  // bitmap channel, the map is zeroed first and copied to `bitmap`
  // afterwards; `bitmap` must then have the channel's size.
  absl::StatusOr<ProcessResult> Run(size_t index, ByteSpan input,
                                    uint32_t timeout_ms,
                                    std::span<uint8_t> bitmap = {});

 private:
  struct Channel {
    std::string name;
    uint8_t *map = nullptr;
    size_t size = 0;
  };

  explicit CommandRunner(std::vector<CommandSpec> commands)
      : commands_(std::move(commands)) {}
  absl::Status Init();

  std::vector<CommandSpec> commands_;
  std::string dir_;
  std::vector<std::string> input_paths_;
  std::vector<Channel> channels_;
  pid_t helper_ = -1;
  int sock_ = -1;
};

}  // namespace patfuzz

#endif  // PATFUZZ_SUBPROCESS_H_
