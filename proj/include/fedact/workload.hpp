#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fedact/rng.hpp"
#include "fedact/types.hpp"

namespace fedact {

class WorkloadDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PartitionMode { kIid, kNonIid };
enum class WorkloadMode { kReal, kSurrogate };

struct DatasetParams {
  std::size_t num_samples = 5000;
  std::size_t dim = 16;
  std::size_t classes = 10;
  // Standard deviation of each class cluster around its mean.
  double cluster_spread = 1.0;
  // Standard deviation of the class means around the origin.
  double class_separation = 1.0;

  void validate() const;
};

/// Gaussian class clusters, features stored row-major.
struct SyntheticDataset {
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<double> features;
  std::vector<std::uint32_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  friend bool operator==(const SyntheticDataset&, const SyntheticDataset&) = default;
};

SyntheticDataset generate_dataset(const DatasetParams& params, std::uint64_t seed);

/// Returns (train, held_out). `fraction` of the samples go to held_out.
std::pair<SyntheticDataset, SyntheticDataset> split_holdout(const SyntheticDataset& data,
                                                            double fraction,
                                                            std::uint64_t seed);

/// Sample indices held by each device.
using Partition = std::vector<std::vector<std::size_t>>;

/// IID: a random permutation cut into near-equal shards.
/// NonIID: 2K class subsets; class c contributes roughly 2K/C of them, and
/// each device receives one subset from each of two distinct classes.
Partition partition(const SyntheticDataset& data, std::size_t num_devices, PartitionMode mode,
                    std::uint64_t seed);

/// Multinomial logistic regression: weights (classes x dim, row-major)
/// followed by one bias per class.
struct ModelState {
  std::size_t dim = 0;
  std::size_t classes = 0;
  double step_size = 0.05;
  std::vector<double> parameters;

  static ModelState zeros(std::size_t dim, std::size_t classes, double step_size);
  std::size_t parameter_count() const noexcept { return classes * dim + classes; }
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Mean cross-entropy over `indices` and its gradient.
LossGradient loss_and_gradient(const ModelState& model, const SyntheticDataset& data,
                               std::span<const std::size_t> indices);

/// `epochs` passes of mini-batch SGD over the shard, reshuffled each epoch.
/// Throws WorkloadDivergence on a non-finite gradient.
std::vector<double> client_update(const ModelState& model, const SyntheticDataset& data,
                                  std::span<const std::size_t> shard, std::uint32_t epochs,
                                  std::uint32_t batch_size, Rng& rng);

struct WeightedUpdate {
  std::span<const double> parameters;
  std::size_t samples = 0;
};

/// Sample-weighted mean, accumulated as a running mean so identical inputs
/// come back unchanged.
std::vector<double> aggregate(std::span<const WeightedUpdate> updates);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const ModelState& model, const SyntheticDataset& held_out);

/// floor + (loss - floor) * (1 - decay * coverage)
double surrogate_progress(double current_loss, double coverage, double decay, double floor);

struct WorkloadParams {
  WorkloadMode mode = WorkloadMode::kReal;
  DatasetParams data;
  double learning_rate = 0.05;
  PartitionMode partition = PartitionMode::kIid;
  double holdout = 0.2;
  double surrogate_decay = 0.3;
  double surrogate_floor = 0.1;

  void validate() const;
};

/// The training side of one job inside a simulation.
class JobWorkload {
 public:
  virtual ~JobWorkload() = default;

  virtual std::size_t shard_size(DeviceId device) const = 0;
  virtual Evaluation current() const = 0;
  /// Runs local updates on `devices` and folds them into the global model.
  virtual Evaluation train_round(std::span<const DeviceId> devices, std::uint32_t round) = 0;

  static std::unique_ptr<JobWorkload> create(const WorkloadParams& params, const JobSpec& job,
                                             std::size_t num_devices,
                                             const StreamFactory& streams);
};

}  // namespace fedact
