#pragma once

// Run configuration and the report envelope shared by the CLI and the test
// harnesses. Reports are deterministic given (argv, seed): the wall-clock
// timestamp is the only nondeterministic field and is excluded from the
// determinism hash.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morrey/util.hpp"

namespace morrey::cli {

inline constexpr const char* kToolName = "morrey";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

struct RunConfig {
  std::string command;
  std::string density = "square4d";
  std::vector<std::string> A;  // flat scalar literals, component-major
  std::size_t k = 8;
  std::uint64_t trials = 10000;
  std::uint64_t local_search_steps = 2000;
  std::uint64_t seed = 0;
  // auto resolves per command: exact arithmetic for gallery evaluation and the
  // reproduction pipeline, doubles for the randomized searches.
  std::string mode = "auto";  // auto | rational | float

  // epsilon-delta search
  std::string epsilon_def = "1/2";
  std::string K = "1";
  std::vector<std::string> deltas;  // empty: 2^-j, j = 1..delta_count
  std::size_t delta_count = 10;
  std::vector<std::string> families = {"zigzag", "laminate", "random"};

  // sublevel convexity
  std::string s = "1/2";
  std::string pairs = "both";  // vertices | random | both
  std::uint64_t samples = 1000;

  // scalar suite
  std::uint64_t num_A = 1000;
  std::uint64_t qc_pairs = 1000;
  std::uint64_t weak_trials_per_A = 16;

  // reproduce
  std::vector<std::string> strong_A;

  std::string out;
  std::size_t threads = 0;  // 0: MORREY_THREADS or hardware default
};

inline void validate_mode(const std::string& mode) {
  if (mode != "auto" && mode != "rational" && mode != "float")
    throw InputError("mode: expected auto|rational|float, got: " + mode);
}

inline std::string default_mode_for_command(const std::string& command) {
  if (command == "falsify-weak" || command == "falsify-strong" || command == "scalar-suite")
    return "float";
  return "rational";
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"density", c.density},
          {"A", c.A},
          {"k", c.k},
          {"trials", c.trials},
          {"local_search_steps", c.local_search_steps},
          {"seed", c.seed},
          {"mode", c.mode},
          {"epsilon_def", c.epsilon_def},
          {"K", c.K},
          {"deltas", c.deltas},
          {"delta_count", c.delta_count},
          {"families", c.families},
          {"s", c.s},
          {"pairs", c.pairs},
          {"samples", c.samples},
          {"num_A", c.num_A},
          {"qc_pairs", c.qc_pairs},
          {"weak_trials_per_A", c.weak_trials_per_A},
          {"strong_A", c.strong_A},
          {"out", c.out},
          {"threads", c.threads}};
}

// Strict parse: unknown keys are rejected so config typos cannot silently
// fall back to defaults.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known = {
      "command",   "density",     "A",        "k",       "trials", "local_search_steps",
      "seed",      "mode",        "epsilon_def", "K",    "deltas", "delta_count",
      "families",  "s",           "pairs",    "samples", "num_A",  "qc_pairs",
      "weak_trials_per_A", "strong_A", "out", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw InputError("config: unknown field '" + it.key() + "'");
  }
  RunConfig c;
  auto get = [&j](const char* key, auto& into) {
    if (j.contains(key)) into = j.at(key).template get<std::decay_t<decltype(into)>>();
  };
  get("command", c.command);
  get("density", c.density);
  get("A", c.A);
  get("k", c.k);
  get("trials", c.trials);
  get("local_search_steps", c.local_search_steps);
  get("seed", c.seed);
  get("mode", c.mode);
  get("epsilon_def", c.epsilon_def);
  get("K", c.K);
  get("deltas", c.deltas);
  get("delta_count", c.delta_count);
  get("families", c.families);
  get("s", c.s);
  get("pairs", c.pairs);
  get("samples", c.samples);
  get("num_A", c.num_A);
  get("qc_pairs", c.qc_pairs);
  get("weak_trials_per_A", c.weak_trials_per_A);
  get("strong_A", c.strong_A);
  get("out", c.out);
  get("threads", c.threads);
  validate_mode(c.mode);
  return c;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Envelope with the deterministic hash computed over everything except the
// timestamp and the hash itself.
inline nlohmann::json make_report(const RunConfig& cfg, nlohmann::json result) {
  nlohmann::json report{{"schema_version", kSchemaVersion},
                        {"tool", kToolName},
                        {"tool_version", kToolVersion},
                        {"command", cfg.command},
                        {"config", to_json(cfg)},
                        {"config_hash", fnv1a64_hex(to_json(cfg).dump())},
                        {"seed", cfg.seed},
                        {"arithmetic_mode", cfg.mode},
                        {"result", std::move(result)}};
  report["determinism_hash"] = fnv1a64_hex(report.dump());
  report["timestamp"] = utc_timestamp();
  return report;
}

/// Recomputes the determinism hash of a finished report (for auditing).
inline std::string recompute_determinism_hash(nlohmann::json report) {
  report.erase("determinism_hash");
  report.erase("timestamp");
  return fnv1a64_hex(report.dump());
}

/// Atomic write: temp file in the target directory, then rename.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace morrey::cli
