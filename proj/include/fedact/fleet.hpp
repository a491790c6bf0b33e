#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedact/types.hpp"

namespace fedact {

struct Range {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

/// Sampling bounds for one homogeneous group of devices. Values are drawn
/// uniformly within each range.
struct FleetRanges {
  Range compute{1.0, 10.0};
  Range memory{512.0, 8192.0};
  Range bandwidth{5.0, 100.0};
  Range alpha{0.5e-4, 5e-4};
  Range mu{0.5, 5.0};
  // Static background load, as an upper bound on the fraction of each
  // capacity component that is unavailable.
  double background_load = 0.3;

  friend bool operator==(const FleetRanges&, const FleetRanges&) = default;
};

struct FleetCluster {
  std::size_t count = 0;
  FleetRanges ranges;
};

// Throws ConfigError naming `field_prefix`.<field> on the first bad range.
void validate_ranges(const FleetRanges& ranges, const std::string& field_prefix);

std::vector<DeviceProfile> generate_fleet(std::size_t fleet_size,
                                          const FleetRanges& ranges,
                                          std::uint64_t seed);

/// Concatenates clusters in order; ids run 0..sum(count)-1.
std::vector<DeviceProfile> generate_fleet(std::span<const FleetCluster> clusters,
                                          std::uint64_t seed);

bool eligible(const DeviceProfile& device, const JobSpec& job) noexcept;

}  // namespace fedact
