#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fedact/engine.hpp"

namespace fedact {

struct ExperimentConfig {
  SimulationConfig simulation;
  // Shared parameters; `schedulers` lists which kinds to run with them.
  SchedulerSettings scheduler;
  std::vector<SchedulerKind> schedulers{SchedulerKind::kFedAct};
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "results";
  unsigned threads = 0;  // 0: one per hardware thread
  // "key = value" for every default that was filled in.
  std::vector<std::string> applied_defaults;
};

/// Parses and validates a JSON experiment file. Unknown keys, type errors and
/// out-of-range values raise ConfigError naming the field, e.g.
/// `jobs[0].fraction_Cm`. Applied defaults are logged and recorded.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view text);

/// "fedact", ..., or "all".
std::vector<SchedulerKind> parse_scheduler_list(std::string_view name);
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace fedact
