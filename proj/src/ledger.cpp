#include "fedact/ledger.hpp"

#include <stdexcept>

namespace fedact {

ParticipationLedger::ParticipationLedger(std::size_t num_devices, std::size_t num_jobs)
    : num_devices_(num_devices),
      num_jobs_(num_jobs),
      counts_(num_devices * num_jobs, 0),
      rounds_started_(num_jobs, 0) {}

std::uint32_t ParticipationLedger::count(DeviceId k, JobId m) const {
  if (k >= num_devices_ || m >= num_jobs_) throw std::out_of_range("ledger index");
  return counts_[static_cast<std::size_t>(k) * num_jobs_ + m];
}

std::uint32_t ParticipationLedger::rounds_started(JobId m) const {
  return rounds_started_.at(m);
}

std::uint64_t ParticipationLedger::total_count(JobId m) const {
  std::uint64_t sum = 0;
  for (std::size_t k = 0; k < num_devices_; ++k) sum += count(static_cast<DeviceId>(k), m);
  return sum;
}

void ParticipationLedger::record(const SchedulingPlan& plan) {
  if (plan.job >= num_jobs_) throw std::out_of_range("ledger: unknown job");
  for (DeviceId k : plan.selected) {
    if (k >= num_devices_) throw std::out_of_range("ledger: unknown device");
  }
  for (DeviceId k : plan.selected) {
    ++counts_[static_cast<std::size_t>(k) * num_jobs_ + plan.job];
  }
  ++rounds_started_[plan.job];
}

ParticipationLedger update_ledger(ParticipationLedger ledger, const SchedulingPlan& plan) {
  ledger.record(plan);
  return ledger;
}

}  // namespace fedact
