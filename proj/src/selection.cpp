#include "fedact/selection.hpp"

#include <algorithm>
#include <stdexcept>

#include "fedact/fleet.hpp"

namespace fedact {

OccupiedSet::OccupiedSet(std::size_t num_devices, std::initializer_list<DeviceId> ids)
    : flags_(num_devices, 0) {
  for (DeviceId k : ids) insert(k);
}

void OccupiedSet::insert(DeviceId k) {
  if (k >= flags_.size()) throw std::out_of_range("OccupiedSet: device id");
  if (flags_[k]) {
    throw std::logic_error("device " + std::to_string(k) + " is already occupied");
  }
  flags_[k] = 1;
  ++size_;
}

void OccupiedSet::erase(DeviceId k) {
  if (k < flags_.size() && flags_[k]) {
    flags_[k] = 0;
    --size_;
  }
}

std::vector<DeviceId> candidate_pool(const JobSpec& job, std::span<const DeviceProfile> fleet,
                                     const OccupiedSet& occupied) {
  std::vector<DeviceId> pool;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const DeviceProfile& d = fleet[i];
    if (d.id != i) throw std::invalid_argument("fleet ids must equal their index");
    if (!occupied.contains(d.id) && d.data_size(job.id) > 0 && eligible(d, job)) {
      pool.push_back(d.id);
    }
  }
  return pool;
}

void require_pool(const JobSpec& job, std::size_t pool_size, std::size_t needed) {
  if (pool_size < needed) throw SchedulingStarved(job.id, needed - pool_size);
}

std::vector<ScoreBreakdown> score_candidates(const JobSpec& job,
                                             std::span<const DeviceProfile> fleet,
                                             std::span<const DeviceId> pool,
                                             const ParticipationLedger& ledger,
                                             std::uint32_t round, const FedActParams& params) {
  const std::vector<double> fairness =
      fairness_scores(ledger, job.id, round, params.fairness);
  std::vector<ScoreBreakdown> out;
  out.reserve(pool.size());
  for (DeviceId k : pool) {
    ScoreBreakdown s;
    s.device = k;
    s.job = job.id;
    s.resource_term = resource_alignment(fleet[k], job, params.resource_weights);
    s.fairness_term = fairness.at(k);
    s.combined = alignment_score(s.resource_term, s.fairness_term, params.weights);
    out.push_back(s);
  }
  return out;
}

SchedulingPlan fedact_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                             const OccupiedSet& occupied, const ParticipationLedger& ledger,
                             std::uint32_t round, const FedActParams& params) {
  const std::size_t needed = devices_per_round(job, fleet.size());
  const std::vector<DeviceId> pool = candidate_pool(job, fleet, occupied);
  require_pool(job, pool.size(), needed);

  std::vector<ScoreBreakdown> scores =
      score_candidates(job, fleet, pool, ledger, round, params);
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(needed),
                    scores.end(), [](const ScoreBreakdown& a, const ScoreBreakdown& b) {
                      if (a.combined != b.combined) return a.combined > b.combined;
                      return a.device < b.device;
                    });

  SchedulingPlan plan{job.id, round, {}};
  plan.selected.reserve(needed);
  for (std::size_t i = 0; i < needed; ++i) plan.selected.push_back(scores[i].device);
  return plan;
}

}  // namespace fedact
