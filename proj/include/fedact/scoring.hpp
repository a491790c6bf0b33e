#pragma once

#include <array>
#include <span>
#include <vector>

#include "fedact/ledger.hpp"
#include "fedact/types.hpp"

namespace fedact {

/// Per-resource weights of the alignment dot product. Must be non-negative
/// and sum to 1.
struct ResourceWeights {
  std::array<double, ResourceVector::kDimensions> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  void validate() const;
};

/// Mix between resource alignment (alpha) and participation fairness (beta).
struct ScoreWeights {
  double alpha = 0.7;
  double beta = 0.3;

  void validate() const;
};

enum class FairnessForm {
  // Penalize only frequencies above the fleet mean. Least-selected devices
  // always rank first.
  kOverParticipation,
  // 1 - (s - mean)^2 on both sides of the mean.
  kSymmetric,
};

struct ScoreBreakdown {
  DeviceId device = 0;
  JobId job = 0;
  double resource_term = 0.0;
  double fairness_term = 0.0;
  double combined = 0.0;
};

/// sum_j w_j * (demand_j / capacity_j) * (available_j / capacity_j), clamped
/// to [0, 1]. Throws std::invalid_argument for an ineligible device and
/// ConfigError for a non-positive capacity component.
double resource_alignment(const DeviceProfile& device, const JobSpec& job,
                          const ResourceWeights& weights = {});

/// Fairness of device k for job m when scheduling the job's round with
/// `round` plans already issued. Counts are turned into frequencies
/// s / max(1, round) before the deviation from the fleet mean is taken.
double fairness_score(const ParticipationLedger& ledger, DeviceId k, JobId m,
                      std::uint32_t round,
                      FairnessForm form = FairnessForm::kOverParticipation);

/// fairness_score for every device in the ledger, in id order.
std::vector<double> fairness_scores(const ParticipationLedger& ledger, JobId m,
                                    std::uint32_t round,
                                    FairnessForm form = FairnessForm::kOverParticipation);

/// (alpha * resource + beta * fairness) / (alpha + beta).
double alignment_score(double resource_term, double fairness_term,
                       const ScoreWeights& weights);

}  // namespace fedact
