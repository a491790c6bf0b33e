#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "fedact/ledger.hpp"
#include "fedact/scoring.hpp"
#include "fedact/types.hpp"

namespace fedact {

/// Devices currently running a round for some job.
class OccupiedSet {
 public:
  explicit OccupiedSet(std::size_t num_devices = 0) : flags_(num_devices, 0) {}
  OccupiedSet(std::size_t num_devices, std::initializer_list<DeviceId> ids);

  bool contains(DeviceId k) const noexcept { return k < flags_.size() && flags_[k] != 0; }
  // Throws std::logic_error if k is already occupied.
  void insert(DeviceId k);
  void erase(DeviceId k);
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return flags_.size(); }

 private:
  std::vector<char> flags_;
  std::size_t size_ = 0;
};

/// Ids (ascending) of devices that meet the job's demand, are not occupied,
/// and hold data for the job.
std::vector<DeviceId> candidate_pool(const JobSpec& job, std::span<const DeviceProfile> fleet,
                                     const OccupiedSet& occupied);

/// Throws SchedulingStarved unless the pool can fill a plan of `needed`.
void require_pool(const JobSpec& job, std::size_t pool_size, std::size_t needed);

struct FedActParams {
  ScoreWeights weights;
  ResourceWeights resource_weights;
  FairnessForm fairness = FairnessForm::kOverParticipation;
};

std::vector<ScoreBreakdown> score_candidates(const JobSpec& job,
                                             std::span<const DeviceProfile> fleet,
                                             std::span<const DeviceId> pool,
                                             const ParticipationLedger& ledger,
                                             std::uint32_t round, const FedActParams& params);

/// Top round(C_m * K) candidates by combined alignment score, lower id on
/// ties. `round` is the number of plans already issued for the job.
SchedulingPlan fedact_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                             const OccupiedSet& occupied, const ParticipationLedger& ledger,
                             std::uint32_t round, const FedActParams& params = {});

}  // namespace fedact
