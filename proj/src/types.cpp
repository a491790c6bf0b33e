#include "fedact/types.hpp"

#include <algorithm>
#include <cmath>

namespace fedact {

SchedulingStarved::SchedulingStarved(JobId job, std::size_t shortfall)
    : std::runtime_error("job " + std::to_string(job) + " is short " +
                         std::to_string(shortfall) +
                         " eligible unoccupied device(s)"),
      job_(job),
      shortfall_(shortfall) {}

double ResourceVector::operator[](std::size_t i) const {
  switch (i) {
    case 0: return compute;
    case 1: return memory;
    case 2: return bandwidth;
  }
  throw std::out_of_range("ResourceVector index");
}

double& ResourceVector::operator[](std::size_t i) {
  switch (i) {
    case 0: return compute;
    case 1: return memory;
    case 2: return bandwidth;
  }
  throw std::out_of_range("ResourceVector index");
}

bool ResourceVector::fits_within(const ResourceVector& other) const noexcept {
  return compute <= other.compute && memory <= other.memory &&
         bandwidth <= other.bandwidth;
}

bool ResourceVector::all_finite_nonnegative() const noexcept {
  for (std::size_t i = 0; i < kDimensions; ++i) {
    const double v = (*this)[i];
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return true;
}

bool ResourceVector::all_positive() const noexcept {
  return all_finite_nonnegative() && compute > 0.0 && memory > 0.0 && bandwidth > 0.0;
}

const char* resource_name(std::size_t dimension) {
  static constexpr const char* kNames[] = {"compute", "memory", "bandwidth"};
  return dimension < ResourceVector::kDimensions ? kNames[dimension] : "?";
}

std::size_t devices_per_round(const JobSpec& job, std::size_t fleet_size) {
  const auto n = std::llround(job.fraction * static_cast<double>(fleet_size));
  return static_cast<std::size_t>(std::max<long long>(1, n));
}

}  // namespace fedact
