#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "invivo/config.hpp"
#include "invivo/learning.hpp"
#include "invivo/scenario.hpp"
#include "invivo/trace.hpp"

namespace invivo {

struct RunOptions {
  std::optional<ScenarioKind> scenario;
  std::optional<ProtocolVariant> protocol;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_cycles;
  std::filesystem::path out_dir = "out";
  TraceLevel trace_level = TraceLevel::summary;
  bool dump_patterns = false;
  std::optional<std::filesystem::path> verify_dir;
  std::optional<std::filesystem::path> memory_snapshot;  // skips learning
};

struct RunResult {
  Metrics metrics;
  LearningReport learning;
  std::vector<std::string> verify_failures;
};

WorldConfig apply_overrides(WorldConfig cfg, const RunOptions& opts);

// Learning (or snapshot load), then the working-mode scenario. Writes trace.tsv,
// metrics.txt, memory.txt and optionally patterns.json into opts.out_dir.
RunResult run_once(const WorldConfig& cfg, const RunOptions& opts);

// Compares a memory snapshot against golden_dir/memory.txt and the metrics against
// golden_dir/bounds.json ({"metric": {"min": x, "max": y}}). Returns mismatches.
std::vector<std::string> verify_against(const std::filesystem::path& golden_dir,
                                        const std::string& memory_text, const Metrics& metrics);

}  // namespace invivo
