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

#include "patfuzz/config.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "patfuzz/target_io.h"
#include "yaml-cpp/yaml.h"

namespace patfuzz {
namespace {

namespace fs = std::filesystem;

struct ConfigError {
  YAML::Mark mark;
  std::string message;
};

std::string_view SourceName(TargetSource s) {
  switch (s) {
    case TargetSource::kFile:
      return "file";
    case TargetSource::kGenerate:
      return "generate";
    case TargetSource::kSuite:
      return "suite";
    case TargetSource::kCommand:
      return "command";
  }
  return "?";
}

std::string_view ClockName(ClockMode c) {
  return c == ClockMode::kWall ? "wall" : "virtual";
}

std::string_view DeliveryName(InputDelivery d) {
  return d == InputDelivery::kFile ? "file" : "stdin";
}

class Reader {
 public:
  explicit Reader(std::string base_dir) : base_(std::move(base_dir)) {}

  [[noreturn]] void Fail(const YAML::Node &n, std::string message) const {
    throw ConfigError{n.Mark(), std::move(message)};
  }

  void RequireMap(const YAML::Node &n, std::string_view what) const {
    if (!n.IsMap()) Fail(n, absl::StrCat(std::string(what), ": expected a mapping"));
  }

  void Keys(const YAML::Node &n, std::string_view what,
            std::initializer_list<std::string_view> allowed) const {
    RequireMap(n, what);
    for (const auto &kv : n) {
      const std::string key = kv.first.as<std::string>();
      bool ok = false;
      for (std::string_view a : allowed) ok = ok || a == key;
      if (!ok) {
        Fail(kv.first, absl::StrCat("unknown key '", key, "' in ",
                                    std::string(what)));
      }
    }
  }

  std::string Str(const YAML::Node &n, std::string_view key) const {
    if (!n.IsScalar()) Fail(n, absl::StrCat(std::string(key), ": expected a scalar"));
    return n.Scalar();
  }

  uint64_t U64(const YAML::Node &n, std::string_view key,
               uint64_t max = UINT64_MAX) const {
    const std::string s = Str(n, key);
    uint64_t v = 0;
    try {
      if (s.empty() || s[0] == '-' || s[0] == '+') throw YAML::BadConversion(n.Mark());
      v = n.as<uint64_t>();
    } catch (const YAML::BadConversion &) {
      Fail(n, absl::StrCat(std::string(key),
                           ": expected a non-negative integer, got '", s, "'"));
    }
    if (v > max) {
      Fail(n, absl::StrCat(std::string(key), ": ", v, " exceeds ", max));
    }
    return v;
  }

  uint32_t U32(const YAML::Node &n, std::string_view key) const {
    return static_cast<uint32_t>(U64(n, key, UINT32_MAX));
  }

  bool Bool(const YAML::Node &n, std::string_view key) const {
    const std::string s = Str(n, key);
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion &) {
      Fail(n, absl::StrCat(std::string(key), ": expected true or false, got '",
                           s, "'"));
    }
  }

  double Double(const YAML::Node &n, std::string_view key) const {
    const std::string s = Str(n, key);
    try {
      return n.as<double>();
    } catch (const YAML::BadConversion &) {
      Fail(n, absl::StrCat(std::string(key), ": expected a number, got '", s,
                           "'"));
    }
  }

  Strategy StrategyOf(const YAML::Node &n) const {
    const std::string s = Str(n, "strategy");
    auto v = ParseStrategy(s);
    if (!v) {
      std::vector<std::string> names;
      for (Strategy x : kAllStrategies) names.emplace_back(StrategyName(x));
      Fail(n, absl::StrCat("unknown strategy '", s, "' (expected one of ",
                           absl::StrJoin(names, ", "), ")"));
    }
    return *v;
  }

  BugClassSet Classes(const YAML::Node &n) const {
    if (!n.IsSequence()) Fail(n, "classes: expected a list");
    BugClassSet set;
    for (const YAML::Node &c : n) {
      const std::string s = Str(c, "classes");
      auto cls = ParseBugClass(s);
      if (!cls) Fail(c, absl::StrCat("unknown bug class '", s, "'"));
      set.Insert(*cls);
    }
    return set;
  }

  std::string Path(const YAML::Node &n, std::string_view key) const {
    const std::string s = Str(n, key);
    if (s.empty()) Fail(n, absl::StrCat(std::string(key), ": empty path"));
    if (base_.empty() || fs::path(s).is_absolute()) return s;
    return fs::absolute(fs::path(base_) / s).lexically_normal().string();
  }

  std::vector<std::string> StrList(const YAML::Node &n,
                                   std::string_view key) const {
    if (!n.IsSequence()) Fail(n, absl::StrCat(std::string(key), ": expected a list"));
    std::vector<std::string> out;
    for (const YAML::Node &x : n) out.push_back(Str(x, key));
    return out;
  }

  CommandConfig Command(const YAML::Node &n) const {
    Keys(n, "command", {"argv", "delivery", "bitmap_size", "timeout_ms"});
    CommandConfig c;
    if (!n["argv"]) Fail(n, "command: missing argv");
    c.argv = StrList(n["argv"], "argv");
    if (c.argv.empty()) Fail(n["argv"], "argv: empty");
    if (const YAML::Node d = n["delivery"]) {
      const std::string s = Str(d, "delivery");
      if (s == "stdin") {
        c.delivery = InputDelivery::kStdin;
      } else if (s == "file") {
        c.delivery = InputDelivery::kFile;
      } else {
        Fail(d, absl::StrCat("delivery: expected stdin or file, got '", s, "'"));
      }
    }
    if (const YAML::Node x = n["bitmap_size"]) c.bitmap_size = U64(x, "bitmap_size");
    if (const YAML::Node x = n["timeout_ms"]) c.timeout_ms = U32(x, "timeout_ms");
    return c;
  }

  GeneratorParams Generator(const YAML::Node &n) const {
    Keys(n, "generate",
         {"seed", "max_edges", "min_bugs", "max_bugs", "trigger_kinds",
          "native_percent", "corruption_detours", "map_size", "step_cap",
          "cost_base", "cost_per_edge", "alias_map_indices",
          "max_loop_iterations", "max_dispatch_iterations", "min_input_size",
          "early_exit_percent", "max_random_fire_ppm", "rarity_samples",
          "witness_attempts"});
    GeneratorParams p;
    auto u32 = [&](const char *key, uint32_t &field) {
      if (const YAML::Node x = n[key]) field = U32(x, key);
    };
    if (const YAML::Node x = n["seed"]) p.seed = U64(x, "seed");
    u32("max_edges", p.max_edges);
    u32("min_bugs", p.min_bugs);
    u32("max_bugs", p.max_bugs);
    u32("native_percent", p.native_percent);
    u32("corruption_detours", p.corruption_detours);
    if (const YAML::Node x = n["map_size"]) p.map_size = U64(x, "map_size");
    u32("step_cap", p.step_cap);
    u32("cost_base", p.cost.base);
    u32("cost_per_edge", p.cost.per_edge);
    if (const YAML::Node x = n["alias_map_indices"]) {
      p.alias_map_indices = Bool(x, "alias_map_indices");
    }
    u32("max_loop_iterations", p.max_loop_iterations);
    u32("max_dispatch_iterations", p.max_dispatch_iterations);
    u32("min_input_size", p.min_input_size);
    u32("early_exit_percent", p.early_exit_percent);
    u32("max_random_fire_ppm", p.max_random_fire_ppm);
    u32("rarity_samples", p.rarity_samples);
    u32("witness_attempts", p.witness_attempts);
    if (const YAML::Node k = n["trigger_kinds"]) {
      p.trigger_kinds.clear();
      for (const std::string &s : StrList(k, "trigger_kinds")) {
        bool found = false;
        for (TriggerKind t :
             {TriggerKind::kEdgeSubset, TriggerKind::kEdgeAbsent,
              TriggerKind::kCountThreshold, TriggerKind::kOrderSensitive}) {
          if (TriggerKindName(t) == s) {
            p.trigger_kinds.push_back(t);
            found = true;
          }
        }
        if (!found) Fail(k, absl::StrCat("unknown trigger kind '", s, "'"));
      }
    }
    return p;
  }

  TargetConfig Target(const YAML::Node &n) const {
    Keys(n, "target", {"file", "generate", "suite", "command"});
    if (n.size() != 1) {
      Fail(n, "target: give exactly one of file, generate, suite, command");
    }
    TargetConfig t;
    if (const YAML::Node x = n["file"]) {
      t.source = TargetSource::kFile;
      t.path = Path(x, "file");
    } else if (const YAML::Node x = n["generate"]) {
      t.source = TargetSource::kGenerate;
      t.generate = Generator(x);
    } else if (const YAML::Node x = n["suite"]) {
      t.source = TargetSource::kSuite;
      Keys(x, "suite", {"targets", "first_seed", "map_size", "order_sensitive"});
      if (const YAML::Node y = x["targets"]) t.suite.targets = U32(y, "targets");
      if (const YAML::Node y = x["first_seed"]) {
        t.suite.first_seed = U64(y, "first_seed");
      }
      if (const YAML::Node y = x["map_size"]) t.suite.map_size = U64(y, "map_size");
      if (const YAML::Node y = x["order_sensitive"]) {
        if (!y.IsSequence()) Fail(y, "order_sensitive: expected a list of seeds");
        for (const YAML::Node &s : y) {
          t.order_sensitive.push_back(U64(s, "order_sensitive"));
        }
      }
    } else {
      t.source = TargetSource::kCommand;
      t.command = Command(n["command"]);
    }
    return t;
  }

  std::vector<PoolMemberConfig> Pool(const YAML::Node &n) const {
    if (!n.IsSequence()) Fail(n, "pool: expected a list");
    std::vector<PoolMemberConfig> pool;
    for (const YAML::Node &m : n) {
      Keys(m, "pool member", {"id", "classes", "command"});
      PoolMemberConfig p;
      if (!m["id"]) Fail(m, "pool member: missing id");
      p.id = Str(m["id"], "id");
      if (!m["classes"]) Fail(m, absl::StrCat("pool member '", p.id, "': missing classes"));
      p.classes = Classes(m["classes"]);
      if (p.classes.empty()) Fail(m["classes"], "classes: empty");
      if (const YAML::Node c = m["command"]) p.command = Command(c);
      pool.push_back(std::move(p));
    }
    return pool;
  }

  SlowdownTable Slowdowns(const YAML::Node &n) const {
    RequireMap(n, "slowdowns");
    SlowdownTable table;
    for (const auto &kv : n) {
      const std::string name = kv.first.as<std::string>();
      auto cls = ParseBugClass(name);
      if (!cls) Fail(kv.first, absl::StrCat("unknown bug class '", name, "'"));
      uint32_t percent = 0;
      if (auto s = SlowdownFactorToPercent(Double(kv.second, name), percent);
          !s.ok()) {
        Fail(kv.second, std::string(s.message()));
      }
      if (auto s = table.Set(*cls, percent); !s.ok()) {
        Fail(kv.second, std::string(s.message()));
      }
    }
    return table;
  }

  MutatorConfig Mutator(const YAML::Node &n) const {
    Keys(n, "mutator",
         {"max_input_len", "havoc_stack", "weights", "arith_max", "max_block"});
    MutatorConfig m;
    if (const YAML::Node x = n["max_input_len"]) {
      m.max_input_len = U64(x, "max_input_len");
    }
    if (const YAML::Node x = n["havoc_stack"]) m.havoc_stack = U32(x, "havoc_stack");
    if (const YAML::Node x = n["arith_max"]) m.arith_max = U32(x, "arith_max");
    if (const YAML::Node x = n["max_block"]) m.max_block = U64(x, "max_block");
    if (const YAML::Node w = n["weights"]) {
      RequireMap(w, "weights");
      for (const auto &kv : w) {
        const std::string name = kv.first.as<std::string>();
        bool found = false;
        for (size_t i = 0; i < kNumMutationOps; ++i) {
          if (MutationOpName(static_cast<MutationOp>(i)) == name) {
            m.weights[i] = U32(kv.second, name);
            found = true;
          }
        }
        if (!found) Fail(kv.first, absl::StrCat("unknown mutation op '", name, "'"));
      }
    }
    return m;
  }

  Config Parse(const YAML::Node &root) const {
    Config c;
    if (root.IsNull()) return c;
    Keys(root, "config",
         {"strategy", "budget", "rng_seed", "map_size", "clock", "mutator",
          "checkpoint_every", "parallel_dispatch", "collision_audit",
          "queue_crashes", "ratios", "target", "pool", "slowdowns", "seeds",
          "output_dir", "bench", "compare"});
    if (const YAML::Node x = root["strategy"]) c.strategy = StrategyOf(x);
    if (const YAML::Node b = root["budget"]) {
      Keys(b, "budget", {"execs", "ticks"});
      if (const YAML::Node x = b["execs"]) c.max_execs = U64(x, "execs");
      if (const YAML::Node x = b["ticks"]) c.max_ticks = U64(x, "ticks");
    }
    if (const YAML::Node x = root["rng_seed"]) c.rng_seed = U64(x, "rng_seed");
    if (const YAML::Node x = root["map_size"]) c.map_size = U64(x, "map_size");
    if (const YAML::Node x = root["clock"]) {
      const std::string s = Str(x, "clock");
      if (s == "virtual") {
        c.clock = ClockMode::kVirtual;
      } else if (s == "wall") {
        c.clock = ClockMode::kWall;
      } else {
        Fail(x, absl::StrCat("clock: expected virtual or wall, got '", s, "'"));
      }
    }
    if (const YAML::Node x = root["mutator"]) c.mutator = Mutator(x);
    if (const YAML::Node x = root["checkpoint_every"]) {
      c.checkpoint_every = U64(x, "checkpoint_every");
    }
    if (const YAML::Node x = root["parallel_dispatch"]) {
      c.parallel_dispatch = Bool(x, "parallel_dispatch");
    }
    if (const YAML::Node x = root["collision_audit"]) {
      c.collision_audit = Bool(x, "collision_audit");
    }
    if (const YAML::Node x = root["queue_crashes"]) {
      c.queue_crashes = Bool(x, "queue_crashes");
    }
    if (const YAML::Node x = root["ratios"]) c.ratios = Bool(x, "ratios");
    if (const YAML::Node x = root["target"]) c.target = Target(x);
    if (const YAML::Node x = root["pool"]) c.pool = Pool(x);
    if (const YAML::Node x = root["slowdowns"]) c.slowdowns = Slowdowns(x);
    if (const YAML::Node x = root["seeds"]) {
      if (!x.IsSequence()) Fail(x, "seeds: expected a list of paths");
      for (const YAML::Node &s : x) c.seeds.push_back(Path(s, "seeds"));
    }
    if (const YAML::Node x = root["output_dir"]) c.output_dir = Str(x, "output_dir");
    if (const YAML::Node b = root["bench"]) {
      Keys(b, "bench", {"corpus_size", "corpus_dir"});
      if (const YAML::Node x = b["corpus_size"]) {
        c.bench.corpus_size = U64(x, "corpus_size");
      }
      if (const YAML::Node x = b["corpus_dir"]) c.bench.corpus_dir = Str(x, "corpus_dir");
    }
    if (const YAML::Node b = root["compare"]) {
      Keys(b, "compare", {"strategies", "reps", "jobs"});
      if (const YAML::Node x = b["strategies"]) {
        if (!x.IsSequence()) Fail(x, "strategies: expected a list");
        c.compare.strategies.clear();
        for (const YAML::Node &s : x) c.compare.strategies.push_back(StrategyOf(s));
      }
      if (const YAML::Node x = b["reps"]) c.compare.reps = U32(x, "reps");
      if (const YAML::Node x = b["jobs"]) c.compare.jobs = U32(x, "jobs");
    }
    return c;
  }

 private:
  std::string base_;
};

absl::Status LocatedError(std::string_view origin, const YAML::Mark &mark,
                          const std::string &message) {
  if (mark.is_null()) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(origin), ": ", message));
  }
  return absl::InvalidArgumentError(absl::StrCat(
      std::string(origin), ":", mark.line + 1, ":", mark.column + 1, ": ",
      message));
}

void EmitCommand(YAML::Emitter &e, const CommandConfig &c) {
  e << YAML::BeginMap;
  e << YAML::Key << "argv" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const std::string &a : c.argv) e << YAML::DoubleQuoted << a;
  e << YAML::EndSeq;
  e << YAML::Key << "delivery" << YAML::Value << std::string(DeliveryName(c.delivery));
  e << YAML::Key << "bitmap_size" << YAML::Value << c.bitmap_size;
  e << YAML::Key << "timeout_ms" << YAML::Value << c.timeout_ms;
  e << YAML::EndMap;
}

std::vector<ByteArray> ReadSeeds(const std::vector<std::string> &paths,
                                 absl::Status &status) {
  std::vector<ByteArray> out;
  auto read = [&](const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) {
      status = absl::NotFoundError(absl::StrCat("cannot read seed ", p.string()));
      return;
    }
    out.emplace_back(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
  };
  for (const std::string &s : paths) {
    std::error_code ec;
    if (fs::is_directory(s, ec)) {
      std::vector<fs::path> files;
      for (const auto &entry : fs::directory_iterator(s, ec)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path &p : files) read(p);
    } else {
      read(s);
    }
    if (!status.ok()) break;
  }
  return out;
}

}  // namespace

std::vector<PoolMemberConfig> DefaultPoolConfig() {
  std::vector<PoolMemberConfig> pool;
  for (BugClass cls : kAllBugClasses) {
    pool.push_back({std::string(BugClassName(cls)), BugClassSet{cls}, {}});
  }
  return pool;
}

absl::StatusOr<Config> ParseConfig(std::string_view text,
                                   std::string_view origin,
                                   const std::string &base_dir) {
  try {
    const YAML::Node root = YAML::Load(std::string(text));
    Config c = Reader(base_dir).Parse(root);
    return c;
  } catch (const ConfigError &e) {
    return LocatedError(origin, e.mark, e.message);
  } catch (const YAML::Exception &e) {
    return LocatedError(origin, e.mark, e.msg);
  }
}

absl::StatusOr<Config> LoadConfig(const std::string &path) {
  std::ifstream f(path);
  if (!f) return absl::NotFoundError(absl::StrCat("cannot read config ", path));
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string base = fs::path(path).parent_path().string();
  return ParseConfig(ss.str(), path, base.empty() ? "." : base);
}

absl::Status ValidateConfig(const Config &cfg) {
  auto err = [](const std::string &m) { return absl::InvalidArgumentError(m); };
  if (cfg.max_execs == 0 && cfg.max_ticks == 0) {
    return err("budget: set execs and/or ticks");
  }
  if (auto s = ValidateMutatorConfig(cfg.mutator); !s.ok()) return s;
  if (cfg.target.source == TargetSource::kCommand) {
    for (const PoolMemberConfig &m : cfg.pool) {
      if (!m.command) {
        return err(absl::StrCat("pool member '", m.id,
                                "' needs a command when the target is a command"));
      }
    }
  }
  if (cfg.target.source == TargetSource::kSuite && cfg.target.suite.targets == 0 &&
      cfg.target.order_sensitive.empty()) {
    return err("suite: no targets");
  }
  for (Strategy s : {cfg.strategy}) {
    if (StrategyNeedsPool(s) && cfg.pool.empty()) {
      return err(absl::StrCat("strategy ", std::string(StrategyName(s)),
                              " needs a non-empty sanitizer pool"));
    }
  }
  if (cfg.compare.strategies.empty()) return err("compare: no strategies");
  if (cfg.compare.reps == 0) return err("compare: reps must be at least 1");
  if (cfg.compare.jobs == 0) return err("compare: jobs must be at least 1");
  if (cfg.bench.corpus_size == 0) return err("bench: corpus_size must be positive");
  return absl::OkStatus();
}

void ApplyOverrides(Config &cfg, const Overrides &o) {
  if (o.strategy) cfg.strategy = *o.strategy;
  if (o.max_execs) cfg.max_execs = *o.max_execs;
  if (o.rng_seed) cfg.rng_seed = *o.rng_seed;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.corpus_size) cfg.bench.corpus_size = *o.corpus_size;
  if (o.strategies) cfg.compare.strategies = *o.strategies;
  if (o.reps) cfg.compare.reps = *o.reps;
  if (o.jobs) cfg.compare.jobs = *o.jobs;
}

std::string EffectiveConfig(const Config &c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "strategy" << YAML::Value << std::string(StrategyName(c.strategy));
  e << YAML::Key << "budget" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "execs" << YAML::Value << c.max_execs;
  e << YAML::Key << "ticks" << YAML::Value << c.max_ticks;
  e << YAML::EndMap;
  e << YAML::Key << "rng_seed" << YAML::Value << c.rng_seed;
  e << YAML::Key << "map_size" << YAML::Value << c.map_size;
  e << YAML::Key << "clock" << YAML::Value << std::string(ClockName(c.clock));
  e << YAML::Key << "mutator" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "max_input_len" << YAML::Value << c.mutator.max_input_len;
  e << YAML::Key << "havoc_stack" << YAML::Value << c.mutator.havoc_stack;
  e << YAML::Key << "arith_max" << YAML::Value << c.mutator.arith_max;
  e << YAML::Key << "max_block" << YAML::Value << c.mutator.max_block;
  e << YAML::Key << "weights" << YAML::Value << YAML::Flow << YAML::BeginMap;
  for (size_t i = 0; i < kNumMutationOps; ++i) {
    e << YAML::Key << std::string(MutationOpName(static_cast<MutationOp>(i)))
      << YAML::Value << c.mutator.weights[i];
  }
  e << YAML::EndMap << YAML::EndMap;
  e << YAML::Key << "checkpoint_every" << YAML::Value << c.checkpoint_every;
  e << YAML::Key << "parallel_dispatch" << YAML::Value << c.parallel_dispatch;
  e << YAML::Key << "collision_audit" << YAML::Value << c.collision_audit;
  e << YAML::Key << "queue_crashes" << YAML::Value << c.queue_crashes;
  e << YAML::Key << "ratios" << YAML::Value << c.ratios;

  e << YAML::Key << "target" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << std::string(SourceName(c.target.source)) << YAML::Value;
  switch (c.target.source) {
    case TargetSource::kFile:
      e << YAML::DoubleQuoted << c.target.path;
      break;
    case TargetSource::kGenerate: {
      const GeneratorParams &p = c.target.generate;
      e << YAML::BeginMap;
      e << YAML::Key << "seed" << YAML::Value << p.seed;
      e << YAML::Key << "max_edges" << YAML::Value << p.max_edges;
      e << YAML::Key << "min_bugs" << YAML::Value << p.min_bugs;
      e << YAML::Key << "max_bugs" << YAML::Value << p.max_bugs;
      e << YAML::Key << "trigger_kinds" << YAML::Value << YAML::Flow
        << YAML::BeginSeq;
      for (TriggerKind k : p.trigger_kinds) e << std::string(TriggerKindName(k));
      e << YAML::EndSeq;
      e << YAML::Key << "native_percent" << YAML::Value << p.native_percent;
      e << YAML::Key << "corruption_detours" << YAML::Value << p.corruption_detours;
      e << YAML::Key << "map_size" << YAML::Value << p.map_size;
      e << YAML::Key << "step_cap" << YAML::Value << p.step_cap;
      e << YAML::Key << "cost_base" << YAML::Value << p.cost.base;
      e << YAML::Key << "cost_per_edge" << YAML::Value << p.cost.per_edge;
      e << YAML::Key << "alias_map_indices" << YAML::Value << p.alias_map_indices;
      e << YAML::Key << "max_loop_iterations" << YAML::Value << p.max_loop_iterations;
      e << YAML::Key << "max_dispatch_iterations" << YAML::Value
        << p.max_dispatch_iterations;
      e << YAML::Key << "min_input_size" << YAML::Value << p.min_input_size;
      e << YAML::Key << "early_exit_percent" << YAML::Value << p.early_exit_percent;
      e << YAML::Key << "max_random_fire_ppm" << YAML::Value << p.max_random_fire_ppm;
      e << YAML::Key << "rarity_samples" << YAML::Value << p.rarity_samples;
      e << YAML::Key << "witness_attempts" << YAML::Value << p.witness_attempts;
      e << YAML::EndMap;
      break;
    }
    case TargetSource::kSuite:
      e << YAML::BeginMap;
      e << YAML::Key << "targets" << YAML::Value << c.target.suite.targets;
      e << YAML::Key << "first_seed" << YAML::Value << c.target.suite.first_seed;
      e << YAML::Key << "map_size" << YAML::Value << c.target.suite.map_size;
      e << YAML::Key << "order_sensitive" << YAML::Value << YAML::Flow
        << c.target.order_sensitive;
      e << YAML::EndMap;
      break;
    case TargetSource::kCommand:
      EmitCommand(e, c.target.command);
      break;
  }
  e << YAML::EndMap;

  e << YAML::Key << "pool" << YAML::Value << YAML::BeginSeq;
  for (const PoolMemberConfig &m : c.pool) {
    e << YAML::BeginMap;
    e << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << m.id;
    e << YAML::Key << "classes" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (BugClass cls : kAllBugClasses) {
      if (m.classes.Contains(cls)) e << std::string(BugClassName(cls));
    }
    e << YAML::EndSeq;
    if (m.command) {
      e << YAML::Key << "command" << YAML::Value;
      EmitCommand(e, *m.command);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  if (c.slowdowns) {
    e << YAML::Key << "slowdowns" << YAML::Value << YAML::BeginMap;
    for (BugClass cls : kAllBugClasses) {
      const uint32_t p = c.slowdowns->percent(cls);
      e << YAML::Key << std::string(BugClassName(cls)) << YAML::Value
        << absl::StrFormat("%u.%02u", p / 100, p % 100);
    }
    e << YAML::EndMap;
  }
  e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const std::string &s : c.seeds) e << YAML::DoubleQuoted << s;
  e << YAML::EndSeq;
  e << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir;
  e << YAML::Key << "bench" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "corpus_size" << YAML::Value << c.bench.corpus_size;
  e << YAML::Key << "corpus_dir" << YAML::Value << YAML::DoubleQuoted
    << c.bench.corpus_dir;
  e << YAML::EndMap;
  e << YAML::Key << "compare" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "strategies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Strategy s : c.compare.strategies) e << std::string(StrategyName(s));
  e << YAML::EndSeq;
  e << YAML::Key << "reps" << YAML::Value << c.compare.reps;
  e << YAML::Key << "jobs" << YAML::Value << c.compare.jobs;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

absl::StatusOr<std::vector<ResolvedTarget>> ResolveTargets(const Config &cfg) {
  absl::Status status;
  std::vector<ByteArray> seeds = ReadSeeds(cfg.seeds, status);
  if (!status.ok()) return status;

  std::vector<std::shared_ptr<const SyntheticTarget>> synthetic;
  switch (cfg.target.source) {
    case TargetSource::kFile: {
      auto t = LoadTarget(cfg.target.path);
      if (!t.ok()) return t.status();
      synthetic.push_back(std::make_shared<const SyntheticTarget>(*std::move(t)));
      break;
    }
    case TargetSource::kGenerate: {
      auto t = GenerateTarget(cfg.target.generate);
      if (!t.ok()) return t.status();
      synthetic.push_back(std::make_shared<const SyntheticTarget>(*std::move(t)));
      break;
    }
    case TargetSource::kSuite: {
      auto suite = GenerateSuite(cfg.target.suite);
      if (!suite.ok()) return suite.status();
      synthetic = *std::move(suite);
      for (uint64_t seed : cfg.target.order_sensitive) {
        auto t = GenerateTarget(OrderSensitiveParams(seed, cfg.target.suite.map_size));
        if (!t.ok()) return t.status();
        t->name = absl::StrCat("order-", seed);
        synthetic.push_back(std::make_shared<const SyntheticTarget>(*std::move(t)));
      }
      break;
    }
    case TargetSource::kCommand:
      break;
  }

  auto member = [&](const PoolMemberConfig &m,
                    const std::shared_ptr<const SyntheticTarget> &t) {
    ExecutorSpec s;
    s.id = m.id;
    s.role = ExecutorRole::kSanitizerTarget;
    s.classes = m.classes;
    s.slowdowns = cfg.slowdowns;
    if (m.command) {
      s.kind = ExecutorKind::kExternalCommand;
      s.command.argv = m.command->argv;
      s.command.delivery = m.command->delivery;
      s.timeout_ms = m.command->timeout_ms;
    } else {
      s.kind = ExecutorKind::kInProcessSynthetic;
      s.target = t;
    }
    return s;
  };

  std::vector<ResolvedTarget> out;
  if (cfg.target.source == TargetSource::kCommand) {
    ResolvedTarget r;
    r.name = fs::path(cfg.target.command.argv[0]).filename().string();
    r.fuzz.id = "native";
    r.fuzz.kind = ExecutorKind::kExternalCommand;
    r.fuzz.role = ExecutorRole::kFuzzTarget;
    r.fuzz.command.argv = cfg.target.command.argv;
    r.fuzz.command.delivery = cfg.target.command.delivery;
    r.fuzz.command.bitmap_size = cfg.target.command.bitmap_size;
    r.fuzz.timeout_ms = cfg.target.command.timeout_ms;
    r.map_size = cfg.target.command.bitmap_size != 0
                     ? cfg.target.command.bitmap_size
                     : cfg.map_size;
    for (const PoolMemberConfig &m : cfg.pool) r.pool.push_back(member(m, nullptr));
    r.seeds = seeds.empty() ? std::vector<ByteArray>{ByteArray(1, 0)} : seeds;
    out.push_back(std::move(r));
    return out;
  }
  for (const auto &t : synthetic) {
    ResolvedTarget r;
    r.name = t->name;
    r.synthetic = t;
    r.fuzz = SyntheticFuzzSpec(t);
    r.fuzz.slowdowns = cfg.slowdowns;
    r.map_size = t->map_size;
    for (const PoolMemberConfig &m : cfg.pool) r.pool.push_back(member(m, t));
    r.seeds = seeds.empty()
                  ? std::vector<ByteArray>{ByteArray(t->input_size, 0)}
                  : seeds;
    out.push_back(std::move(r));
  }
  return out;
}

CampaignConfig MakeCampaign(const Config &cfg, const ResolvedTarget &target,
                            Strategy strategy, uint64_t rng_seed) {
  CampaignConfig c;
  c.strategy = strategy;
  c.fuzz = target.fuzz;
  if (StrategyNeedsPool(strategy)) c.pool = target.pool;
  c.parallel_dispatch = cfg.parallel_dispatch;
  c.max_execs = cfg.max_execs;
  c.max_ticks = cfg.max_ticks;
  c.rng_seed = rng_seed;
  c.initial_seeds = target.seeds;
  c.map_size = target.map_size;
  c.mutator = cfg.mutator;
  c.clock = cfg.clock;
  c.exec_log = cfg.ratios;
  c.collision_audit = cfg.collision_audit;
  c.checkpoint_every = cfg.checkpoint_every;
  c.queue_crashes = cfg.queue_crashes;
  return c;
}

}  // namespace patfuzz
