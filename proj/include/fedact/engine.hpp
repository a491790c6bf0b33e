#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fedact/baselines.hpp"
#include "fedact/fleet.hpp"
#include "fedact/ledger.hpp"
#include "fedact/rng.hpp"
#include "fedact/selection.hpp"
#include "fedact/types.hpp"
#include "fedact/workload.hpp"

namespace fedact {

enum class SchedulerKind { kFedAct, kRandom, kGreedy, kGenetic, kSequential };

std::string_view scheduler_name(SchedulerKind kind) noexcept;
/// Throws ConfigError for unknown names.
SchedulerKind parse_scheduler(std::string_view name);
std::vector<SchedulerKind> all_schedulers();

struct SchedulerSettings {
  SchedulerKind kind = SchedulerKind::kFedAct;
  FedActParams fedact;
  double greedy_lambda = 0.3;
  GeneticParams genetic;
};

struct SimulationConfig {
  std::vector<FleetCluster> fleet;
  std::vector<JobSpec> jobs;
  WorkloadParams workload;

  /// Checks job fields and fleet ranges; throws ConfigError naming the field.
  void validate() const;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// tau * alpha * D: the support floor of a device's execution time.
double execution_floor(const DeviceProfile& device, const JobSpec& job);

/// Shifted exponential: the floor plus an exponential tail with rate
/// mu / (tau * D). Throws std::invalid_argument when the device holds no data
/// for the job.
double sample_execution_time(const DeviceProfile& device, const JobSpec& job, Rng& rng);

enum class EventKind : std::uint8_t { kRoundComplete, kJobDone, kScheduleRetry };

struct SimEvent {
  double time = 0.0;
  JobId job = 0;
  EventKind kind = EventKind::kRoundComplete;

  friend bool operator<(const SimEvent& a, const SimEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.job != b.job) return a.job < b.job;
    return a.kind < b.kind;
  }
  friend bool operator>(const SimEvent& a, const SimEvent& b) { return b < a; }
};

struct RoundRecord {
  JobId job = 0;
  std::uint32_t round = 0;  // 1-based
  std::vector<DeviceId> selected;
  double start_time = 0.0;
  double round_duration = 0.0;
  double global_loss = 0.0;
  double global_accuracy = 0.0;
  double cumulative_time = 0.0;
};

/// One synchronous round: every selected device trains, the slowest sets
/// the duration, and aggregation takes no time. Execution times come from
/// the (job, round, device) stream.
RoundRecord run_round(const JobSpec& job, const SchedulingPlan& plan,
                      std::span<const DeviceProfile> fleet, const StreamFactory& streams,
                      JobWorkload& workload, double start_time);

struct JobResult {
  JobId job = 0;
  std::string name;
  double jct = 0.0;
  std::optional<double> time_to_target;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
  std::string status = "ok";
  std::vector<RoundRecord> rounds;
};

struct SimResult {
  std::vector<JobResult> jobs;
  double average_jct = 0.0;
  std::uint64_t events_processed = 0;
  ParticipationLedger ledger;
  std::vector<DeviceProfile> fleet;

  bool ok() const noexcept;
};

struct SimulationHooks {
  std::function<void(const SimEvent&)> on_event;
  std::function<void(double time, const SchedulingPlan&)> on_plan;
  std::function<void(double time, const RoundRecord&)> on_round_complete;
};

/// Runs every job to its loss target or round cap. Jobs run concurrently
/// except under SchedulerKind::kSequential, which runs them one after
/// another with random selection.
SimResult run_simulation(const SimulationConfig& config, const SchedulerSettings& scheduler,
                         std::uint64_t seed, const SimulationHooks& hooks = {});

struct JobMetrics {
  double jct = 0.0;
  std::optional<double> time_to_target;
  double final_accuracy = 0.0;
};

struct MetricsSummary {
  std::vector<JobMetrics> jobs;
  double average_jct = 0.0;
};

/// JCT is the end of a job's last round; time to target is the end of the
/// first round whose accuracy reaches the job's target.
MetricsSummary compute_metrics(std::span<const std::vector<RoundRecord>> histories,
                               std::span<const std::optional<double>> accuracy_targets);

}  // namespace fedact
