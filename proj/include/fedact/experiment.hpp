#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedact/config.hpp"
#include "fedact/engine.hpp"

namespace fedact {

struct Replication {
  SchedulerKind scheduler = SchedulerKind::kFedAct;
  std::uint64_t seed = 0;
  std::optional<SimResult> result;
  std::string error;  // set when the run threw

  bool ok() const noexcept { return result && result->ok(); }
};

/// Runs every (scheduler, seed) pair. Pairs are independent and run on up to
/// `config.threads` workers; results come back in (scheduler, seed) order.
std::vector<Replication> run_experiment(const ExperimentConfig& config);

struct SchedulerReport {
  SchedulerKind scheduler = SchedulerKind::kFedAct;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_average_jct = 0.0;
  double stddev_average_jct = 0.0;
};

std::vector<SchedulerReport> summarize(const std::vector<Replication>& replications);

/// Writes rounds.csv, summary.csv and report.txt into `dir`, creating it if
/// needed. Throws std::runtime_error on I/O failure.
void write_results(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const std::vector<Replication>& replications);

/// Fixed "%#.6g" formatting used for every float in the CSV files.
std::string format_number(double value);

}  // namespace fedact
