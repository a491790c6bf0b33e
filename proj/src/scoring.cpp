#include "fedact/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedact/fleet.hpp"

namespace fedact {

void ResourceWeights::validate() const {
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError("scheduler.resource_weights: entries must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("scheduler.resource_weights: entries must sum to 1");
  }
}

void ScoreWeights::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("scheduler.alpha: must be >= 0");
  if (!std::isfinite(beta) || beta < 0.0) throw ConfigError("scheduler.beta: must be >= 0");
  if (!(alpha + beta > 0.0)) throw ConfigError("scheduler.alpha + scheduler.beta: must be > 0");
}

double resource_alignment(const DeviceProfile& device, const JobSpec& job,
                          const ResourceWeights& weights) {
  if (!device.capacity.all_positive()) {
    throw ConfigError("device " + std::to_string(device.id) +
                      ": every capacity component must be > 0");
  }
  if (!eligible(device, job)) {
    throw std::invalid_argument("device " + std::to_string(device.id) +
                                " is not eligible for job " + std::to_string(job.id));
  }
  double score = 0.0;
  for (std::size_t j = 0; j < ResourceVector::kDimensions; ++j) {
    const double cap = device.capacity[j];
    score += weights.w[j] * (job.demand[j] / cap) * (device.available[j] / cap);
  }
  return std::clamp(score, 0.0, 1.0);
}

namespace {

double fairness_from_deviation(double deviation, FairnessForm form) {
  if (form == FairnessForm::kOverParticipation) deviation = std::max(0.0, deviation);
  return std::clamp(1.0 - deviation * deviation, 0.0, 1.0);
}

}  // namespace

std::vector<double> fairness_scores(const ParticipationLedger& ledger, JobId m,
                                    std::uint32_t round, FairnessForm form) {
  const std::size_t k_total = ledger.num_devices();
  const double denom = static_cast<double>(std::max<std::uint32_t>(1, round));
  std::vector<double> freq(k_total);
  double mean = 0.0;
  for (std::size_t k = 0; k < k_total; ++k) {
    freq[k] = ledger.count(static_cast<DeviceId>(k), m) / denom;
    mean += freq[k];
  }
  if (k_total > 0) mean /= static_cast<double>(k_total);
  for (double& f : freq) f = fairness_from_deviation(f - mean, form);
  return freq;
}

double fairness_score(const ParticipationLedger& ledger, DeviceId k, JobId m,
                      std::uint32_t round, FairnessForm form) {
  if (k >= ledger.num_devices()) throw std::out_of_range("fairness_score: device id");
  return fairness_scores(ledger, m, round, form)[k];
}

double alignment_score(double resource_term, double fairness_term,
                       const ScoreWeights& weights) {
  // Splitting the normalization keeps beta == 0 bit-identical to the
  // resource term alone.
  const double total = weights.alpha + weights.beta;
  return (weights.alpha / total) * resource_term + (weights.beta / total) * fairness_term;
}

}  // namespace fedact
