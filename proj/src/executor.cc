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

#include "patfuzz/executor.h"

#include <cstring>
#include <thread>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "patfuzz/target_io.h"

namespace patfuzz {

absl::Status ValidateExecutorSpec(const ExecutorSpec &spec) {
  if (spec.id.empty()) return absl::InvalidArgumentError("executor id is empty");
  auto err = [&](const std::string &what) {
    return absl::InvalidArgumentError(
        absl::StrCat("executor '", spec.id, "': ", what));
  };
  if (spec.kind == ExecutorKind::kInProcessSynthetic) {
    if (!spec.target && spec.target_path.empty()) return err("no target");
  } else {
    if (spec.command.argv.empty() || spec.command.argv[0].empty()) {
      return err("empty command");
    }
    if (spec.timeout_ms == 0) return err("timeout_ms must be positive");
  }
  if (spec.role == ExecutorRole::kSanitizerTarget) {
    if (auto s = ValidateClassSet(spec.classes); !s.ok()) {
      return err(std::string(s.message()));
    }
    if (spec.command.bitmap_size != 0) {
      return err("sanitizer executors take no bitmap channel");
    }
  } else if (!spec.classes.empty()) {
    return err("the fuzz target takes no bug classes");
  }
  return absl::OkStatus();
}

absl::Status ValidateExecutors(const ExecutorSpec &fuzz,
                               const std::vector<ExecutorSpec> &pool) {
  if (fuzz.role != ExecutorRole::kFuzzTarget) {
    return absl::InvalidArgumentError("fuzz executor must have the fuzz role");
  }
  if (auto s = ValidateExecutorSpec(fuzz); !s.ok()) return s;
  absl::flat_hash_set<std::string> ids = {fuzz.id};
  for (const ExecutorSpec &m : pool) {
    if (m.role != ExecutorRole::kSanitizerTarget) {
      return absl::InvalidArgumentError(
          absl::StrCat("pool member '", m.id, "' is not a sanitizer target"));
    }
    if (auto s = ValidateExecutorSpec(m); !s.ok()) return s;
    if (!ids.insert(m.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate executor id '", m.id, "'"));
    }
  }
  return absl::OkStatus();
}

absl::Status ResolveSyntheticTarget(ExecutorSpec &spec) {
  if (spec.kind != ExecutorKind::kInProcessSynthetic) return absl::OkStatus();
  if (!spec.target) {
    auto t = LoadTarget(spec.target_path);
    if (!t.ok()) return t.status();
    spec.target = std::make_shared<const SyntheticTarget>(*std::move(t));
  }
  if (spec.slowdowns && !(*spec.slowdowns == spec.target->slowdowns)) {
    auto copy = std::make_shared<SyntheticTarget>(*spec.target);
    copy->slowdowns = *spec.slowdowns;
    spec.target = std::move(copy);
  }
  return absl::OkStatus();
}

uint32_t SanitizerTimeoutMs(const ExecutorSpec &spec) {
  if (!spec.scale_timeout) return spec.timeout_ms;
  const SlowdownTable table = spec.slowdowns.value_or(SlowdownTable());
  const uint64_t scaled =
      uint64_t{spec.timeout_ms} * table.Combined(spec.classes) / 100;
  return static_cast<uint32_t>(std::min<uint64_t>(scaled, UINT32_MAX));
}

namespace {

class SyntheticFuzzExecutor : public FuzzExecutor {
 public:
  explicit SyntheticFuzzExecutor(std::shared_ptr<const SyntheticTarget> t)
      : target_(std::move(t)) {}

  absl::StatusOr<ExecutionResult> Run(ByteSpan input, Bitmap &bitmap) override {
    ExecutionResult r = ExecuteNative(*target_, input, bitmap);
    r.exec_index = next_index_++;
    return r;
  }

  const SyntheticTarget *synthetic() const override { return target_.get(); }

 private:
  std::shared_ptr<const SyntheticTarget> target_;
};

void ApplyProcessResult(const ProcessResult &p, ExecutionResult &r) {
  r.cost = p.elapsed_us * kCentiTicksPerTick;
  switch (p.outcome) {
    case ProcessOutcome::kExited:
      if (p.value != 0) {
        r.status = ExecStatus::kCrash;
        r.crash_id = kExitCodeCrashBase + static_cast<uint64_t>(p.value);
      }
      break;
    case ProcessOutcome::kSignaled:
      r.status = ExecStatus::kCrash;
      r.crash_id = static_cast<uint64_t>(p.value);
      break;
    case ProcessOutcome::kTimedOut:
      r.status = ExecStatus::kTimeout;
      break;
    case ProcessOutcome::kSpawnFailed:
      break;
  }
}

class ExternalFuzzExecutor : public FuzzExecutor {
 public:
  ExternalFuzzExecutor(std::unique_ptr<CommandRunner> runner,
                       uint32_t timeout_ms, bool has_channel)
      : runner_(std::move(runner)),
        timeout_ms_(timeout_ms),
        has_channel_(has_channel) {}

  absl::StatusOr<ExecutionResult> Run(ByteSpan input, Bitmap &bitmap) override {
    bitmap.Clear();
    auto p = runner_->Run(0, input, timeout_ms_,
                          has_channel_ ? bitmap.mutable_counters()
                                       : std::span<uint8_t>());
    if (!p.ok()) return p.status();
    if (p->outcome == ProcessOutcome::kSpawnFailed) {
      return absl::UnavailableError(
          absl::StrCat("cannot start fuzz target: ", std::strerror(p->value)));
    }
    ExecutionResult r;
    ApplyProcessResult(*p, r);
    r.exec_index = next_index_++;
    return r;
  }

 private:
  std::unique_ptr<CommandRunner> runner_;
  uint32_t timeout_ms_;
  bool has_channel_;
};

}  // namespace

absl::StatusOr<std::unique_ptr<FuzzExecutor>> MakeFuzzExecutor(
    ExecutorSpec spec, size_t map_size) {
  if (spec.role != ExecutorRole::kFuzzTarget) {
    return absl::InvalidArgumentError("not a fuzz target executor");
  }
  if (auto s = ValidateExecutorSpec(spec); !s.ok()) return s;
  if (spec.kind == ExecutorKind::kInProcessSynthetic) {
    if (auto s = ResolveSyntheticTarget(spec); !s.ok()) return s;
    if (spec.target->map_size != map_size) {
      return absl::InvalidArgumentError(absl::StrCat(
          "target map_size ", spec.target->map_size, " != campaign map_size ",
          map_size));
    }
    return std::make_unique<SyntheticFuzzExecutor>(spec.target);
  }
  const bool channel = spec.command.bitmap_size != 0;
  if (channel && spec.command.bitmap_size != map_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bitmap channel size ", spec.command.bitmap_size,
        " != campaign map_size ", map_size));
  }
  auto runner = CommandRunner::Start({spec.command});
  if (!runner.ok()) return runner.status();
  return std::make_unique<ExternalFuzzExecutor>(*std::move(runner),
                                                spec.timeout_ms, channel);
}

absl::StatusOr<std::unique_ptr<SanitizerDispatcher>> SanitizerDispatcher::Create(
    std::vector<ExecutorSpec> pool, bool parallel) {
  std::unique_ptr<SanitizerDispatcher> d(new SanitizerDispatcher());
  d->parallel_ = parallel;
  std::vector<CommandSpec> shared;
  std::vector<size_t> shared_members;
  for (size_t i = 0; i < pool.size(); ++i) {
    ExecutorSpec &m = pool[i];
    if (m.role != ExecutorRole::kSanitizerTarget) {
      return absl::InvalidArgumentError(
          absl::StrCat("pool member '", m.id, "' is not a sanitizer target"));
    }
    if (auto s = ValidateExecutorSpec(m); !s.ok()) return s;
    if (auto s = ResolveSyntheticTarget(m); !s.ok()) return s;
    d->slots_.emplace_back(nullptr, 0);
    if (m.kind != ExecutorKind::kExternalCommand) continue;
    if (parallel) {
      auto r = CommandRunner::Start({m.command});
      if (!r.ok()) return r.status();
      d->slots_[i] = {r->get(), 0};
      d->runners_.push_back(*std::move(r));
    } else {
      shared_members.push_back(i);
      shared.push_back(m.command);
    }
  }
  if (!shared.empty()) {
    auto r = CommandRunner::Start(std::move(shared));
    if (!r.ok()) return r.status();
    for (size_t k = 0; k < shared_members.size(); ++k) {
      d->slots_[shared_members[k]] = {r->get(), k};
    }
    d->runners_.push_back(*std::move(r));
  }
  d->members_ = std::move(pool);
  return d;
}

SanitizerVerdict SanitizerDispatcher::RunMember(size_t i, ByteSpan input) {
  const ExecutorSpec &m = members_[i];
  if (m.kind == ExecutorKind::kInProcessSynthetic) {
    SanitizerVerdict v = ExecuteSanitized(*m.target, input, m.classes);
    v.executor_id = m.id;
    return v;
  }
  SanitizerVerdict v;
  v.executor_id = m.id;
  auto [runner, slot] = slots_[i];
  auto p = runner->Run(slot, input, SanitizerTimeoutMs(m));
  if (!p.ok()) {
    v.outcome = VerdictOutcome::kExecutorError;
    v.error = std::string(p.status().message());
    return v;
  }
  if (p->outcome == ProcessOutcome::kSpawnFailed) {
    v.outcome = VerdictOutcome::kExecutorError;
    v.error = absl::StrCat("cannot start ", m.command.argv[0], ": ",
                           std::strerror(p->value));
    return v;
  }
  ExecutionResult r;
  ApplyProcessResult(*p, r);
  v.cost = r.cost;
  if (r.status == ExecStatus::kCrash) {
    v.outcome = VerdictOutcome::kCrash;
    v.crash_ids = {r.crash_id};
  } else if (r.status == ExecStatus::kTimeout) {
    v.outcome = VerdictOutcome::kTimeout;
  }
  return v;
}

std::vector<SanitizerVerdict> SanitizerDispatcher::Dispatch(ByteSpan input) {
  std::vector<SanitizerVerdict> out(members_.size());
  if (!parallel_ || members_.size() < 2) {
    for (size_t i = 0; i < members_.size(); ++i) out[i] = RunMember(i, input);
    return out;
  }
  std::vector<std::thread> threads;
  threads.reserve(members_.size());
  for (size_t i = 0; i < members_.size(); ++i) {
    threads.emplace_back([&, i] { out[i] = RunMember(i, input); });
  }
  for (std::thread &t : threads) t.join();
  return out;
}

}  // namespace patfuzz
