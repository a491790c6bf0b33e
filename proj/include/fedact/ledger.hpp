#pragma once

#include <cstdint>
#include <vector>

#include "fedact/types.hpp"

namespace fedact {

/// Participation counts s[k][m]: how many plans of job m have included
/// device k. Counts only grow.
class ParticipationLedger {
 public:
  ParticipationLedger() = default;
  ParticipationLedger(std::size_t num_devices, std::size_t num_jobs);

  std::size_t num_devices() const noexcept { return num_devices_; }
  std::size_t num_jobs() const noexcept { return num_jobs_; }

  std::uint32_t count(DeviceId k, JobId m) const;
  std::uint32_t rounds_started(JobId m) const;
  std::uint64_t total_count(JobId m) const;

  /// Adds one to every selected device's count for plan.job and marks one
  /// more round as started. Throws std::out_of_range on unknown ids.
  void record(const SchedulingPlan& plan);

  friend bool operator==(const ParticipationLedger&, const ParticipationLedger&) = default;

 private:
  std::size_t num_devices_ = 0;
  std::size_t num_jobs_ = 0;
  std::vector<std::uint32_t> counts_;  // device-major
  std::vector<std::uint32_t> rounds_started_;
};

/// Functional form of ParticipationLedger::record.
ParticipationLedger update_ledger(ParticipationLedger ledger, const SchedulingPlan& plan);

}  // namespace fedact
