#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedact {

using DeviceId = std::uint32_t;
using JobId = std::uint32_t;

/// Raised for any invalid configuration value. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A selector could not fill a plan from the eligible, unoccupied pool.
class SchedulingStarved : public std::runtime_error {
 public:
  SchedulingStarved(JobId job, std::size_t shortfall);

  JobId job() const noexcept { return job_; }
  std::size_t shortfall() const noexcept { return shortfall_; }

 private:
  JobId job_;
  std::size_t shortfall_;
};

/// Compute units, megabytes, megabits per second.
struct ResourceVector {
  static constexpr std::size_t kDimensions = 3;

  double compute = 0.0;
  double memory = 0.0;
  double bandwidth = 0.0;

  double operator[](std::size_t i) const;
  double& operator[](std::size_t i);

  // Componentwise <=.
  bool fits_within(const ResourceVector& other) const noexcept;
  bool all_finite_nonnegative() const noexcept;
  bool all_positive() const noexcept;

  friend bool operator==(const ResourceVector&, const ResourceVector&) = default;
};

const char* resource_name(std::size_t dimension);

struct DeviceProfile {
  DeviceId id = 0;
  ResourceVector capacity;
  ResourceVector available;
  // Shifted-exponential speed parameters: seconds per (epoch * sample) and
  // fluctuation rate.
  double alpha = 1e-4;
  double mu = 1.0;
  // Sample count held for each job, indexed by job id.
  std::vector<std::size_t> data_sizes;

  std::size_t data_size(JobId job) const noexcept {
    return job < data_sizes.size() ? data_sizes[job] : 0;
  }

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

struct JobSpec {
  JobId id = 0;
  // Keys every random stream owned by this job, so a job keeps its data and
  // noise when run alone or next to other jobs.
  std::string name;
  ResourceVector demand;
  double fraction = 0.1;
  std::uint32_t max_rounds = 50;
  double target_loss = 0.0;
  std::optional<double> target_accuracy;
  std::uint32_t local_epochs = 5;
  std::uint32_t batch_size = 10;
};

/// Devices selected per round: round(fraction * fleet_size), at least one.
std::size_t devices_per_round(const JobSpec& job, std::size_t fleet_size);

struct SchedulingPlan {
  JobId job = 0;
  std::uint32_t round = 0;
  // Rank order as produced by the selector.
  std::vector<DeviceId> selected;
};

}  // namespace fedact
