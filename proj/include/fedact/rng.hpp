#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fedact {

using Rng = std::mt19937_64;

enum class StreamTag : std::uint64_t {
  kFleet = 1,
  kDataset,
  kHoldout,
  kPartition,
  kSelect,
  kGenetic,
  kExecTime,
  kTrain,
};

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_name(std::string_view name) noexcept;

/// Derives independent generators from one root seed. A stream is a pure
/// function of (root, tag, a, b, c), so two schedulers that pick the same
/// device for the same job and round see the same noise.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t root) : root_(root) {}

  std::uint64_t root() const noexcept { return root_; }
  std::uint64_t derive(StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) const noexcept;
  Rng stream(StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0,
             std::uint64_t c = 0) const {
    return Rng(derive(tag, a, b, c));
  }

 private:
  std::uint64_t root_;
};

}  // namespace fedact
