#include "fedact/fleet.hpp"

#include <cmath>

#include "fedact/rng.hpp"

namespace fedact {
namespace {

void check_range(const Range& r, const std::string& field) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max)) {
    throw ConfigError(field + ": range bounds must be finite");
  }
  if (r.min <= 0.0) throw ConfigError(field + ": range minimum must be > 0");
  if (r.min > r.max) throw ConfigError(field + ": range minimum exceeds maximum");
}

double draw(const Range& r, Rng& rng) {
  if (r.min == r.max) return r.min;
  return std::uniform_real_distribution<double>(r.min, r.max)(rng);
}

}  // namespace

void validate_ranges(const FleetRanges& ranges, const std::string& field_prefix) {
  check_range(ranges.compute, field_prefix + ".compute");
  check_range(ranges.memory, field_prefix + ".memory");
  check_range(ranges.bandwidth, field_prefix + ".bandwidth");
  check_range(ranges.alpha, field_prefix + ".alpha");
  check_range(ranges.mu, field_prefix + ".mu");
  if (!(ranges.background_load >= 0.0 && ranges.background_load < 1.0)) {
    throw ConfigError(field_prefix + ".background_load: must lie in [0, 1)");
  }
}

std::vector<DeviceProfile> generate_fleet(std::size_t fleet_size,
                                          const FleetRanges& ranges,
                                          std::uint64_t seed) {
  const FleetCluster single{fleet_size, ranges};
  return generate_fleet(std::span<const FleetCluster>(&single, 1), seed);
}

std::vector<DeviceProfile> generate_fleet(std::span<const FleetCluster> clusters,
                                          std::uint64_t seed) {
  std::size_t total = 0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const std::string prefix = clusters.size() == 1
                                   ? std::string("fleet")
                                   : "fleet.clusters[" + std::to_string(c) + "]";
    validate_ranges(clusters[c].ranges, prefix);
    total += clusters[c].count;
  }
  if (total == 0) throw ConfigError("fleet.num_devices: must be >= 1");

  const StreamFactory streams(seed);
  std::vector<DeviceProfile> fleet;
  fleet.reserve(total);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const FleetRanges& r = clusters[c].ranges;
    Rng rng = streams.stream(StreamTag::kFleet, c);
    for (std::size_t i = 0; i < clusters[c].count; ++i) {
      DeviceProfile d;
      d.id = static_cast<DeviceId>(fleet.size());
      d.capacity = {draw(r.compute, rng), draw(r.memory, rng), draw(r.bandwidth, rng)};
      d.alpha = draw(r.alpha, rng);
      d.mu = draw(r.mu, rng);
      d.available = d.capacity;
      if (r.background_load > 0.0) {
        std::uniform_real_distribution<double> load(0.0, r.background_load);
        for (std::size_t j = 0; j < ResourceVector::kDimensions; ++j) {
          d.available[j] = d.capacity[j] * (1.0 - load(rng));
        }
      }
      fleet.push_back(std::move(d));
    }
  }
  return fleet;
}

bool eligible(const DeviceProfile& device, const JobSpec& job) noexcept {
  return job.demand.fits_within(device.available);
}

}  // namespace fedact
