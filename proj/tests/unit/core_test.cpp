#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fedact/fleet.hpp"
#include "fedact/ledger.hpp"
#include "fedact/rng.hpp"
#include "fedact/types.hpp"

namespace fedact {
namespace {

DeviceProfile device_with(ResourceVector available) {
  DeviceProfile d;
  d.capacity = {10, 10, 10};
  d.available = available;
  return d;
}

JobSpec job_with(ResourceVector demand) {
  JobSpec j;
  j.demand = demand;
  return j;
}

TEST(FleetTest, HundredDevicesHaveDistinctSequentialIds) {
  const auto fleet = generate_fleet(100, FleetRanges{}, 7);
  ASSERT_EQ(fleet.size(), 100u);
  for (std::size_t k = 0; k < fleet.size(); ++k) EXPECT_EQ(fleet[k].id, k);
}

TEST(FleetTest, DegenerateRangesGiveBoundaryValues) {
  FleetRanges r;
  r.compute = {4, 4};
  r.memory = {1024, 1024};
  r.bandwidth = {20, 20};
  r.alpha = {2e-4, 2e-4};
  r.mu = {3, 3};
  r.background_load = 0.0;
  const auto fleet = generate_fleet(1, r, 99);
  ASSERT_EQ(fleet.size(), 1u);
  EXPECT_EQ(fleet[0].capacity, (ResourceVector{4, 1024, 20}));
  EXPECT_EQ(fleet[0].available, fleet[0].capacity);
  EXPECT_EQ(fleet[0].alpha, 2e-4);
  EXPECT_EQ(fleet[0].mu, 3.0);
}

TEST(FleetTest, SameSeedSameFleet) {
  EXPECT_EQ(generate_fleet(5, FleetRanges{}, 42), generate_fleet(5, FleetRanges{}, 42));
  EXPECT_NE(generate_fleet(5, FleetRanges{}, 42), generate_fleet(5, FleetRanges{}, 43));
}

TEST(FleetTest, ValuesStayInsideRanges) {
  const FleetRanges r;
  for (const DeviceProfile& d : generate_fleet(500, r, 3)) {
    EXPECT_TRUE(d.capacity.all_positive());
    EXPECT_GE(d.capacity.compute, r.compute.min);
    EXPECT_LE(d.capacity.compute, r.compute.max);
    EXPECT_GE(d.capacity.memory, r.memory.min);
    EXPECT_LE(d.capacity.memory, r.memory.max);
    EXPECT_GE(d.alpha, r.alpha.min);
    EXPECT_LE(d.alpha, r.alpha.max);
    EXPECT_GT(d.mu, 0.0);
    for (std::size_t j = 0; j < ResourceVector::kDimensions; ++j) {
      EXPECT_GE(d.available[j], (1.0 - r.background_load) * d.capacity[j] - 1e-9);
      EXPECT_LE(d.available[j], d.capacity[j]);
    }
  }
}

TEST(FleetTest, NoBackgroundLoadMeansFullAvailability) {
  FleetRanges r;
  r.background_load = 0.0;
  for (const DeviceProfile& d : generate_fleet(50, r, 11)) EXPECT_EQ(d.available, d.capacity);
}

TEST(FleetTest, ClustersAreConcatenatedInOrder) {
  FleetRanges slow;
  slow.mu = {0.5, 0.5};
  FleetRanges fast;
  fast.mu = {5, 5};
  const std::vector<FleetCluster> clusters{{3, slow}, {2, fast}};
  const auto fleet = generate_fleet(clusters, 1);
  ASSERT_EQ(fleet.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(fleet[k].id, k);
    EXPECT_EQ(fleet[k].mu, k < 3 ? 0.5 : 5.0);
  }
}

TEST(FleetTest, RejectsBadRanges) {
  FleetRanges r;
  r.memory = {100, 50};
  EXPECT_THROW(validate_ranges(r, "fleet"), ConfigError);
  r = FleetRanges{};
  r.mu = {0, 1};
  EXPECT_THROW(validate_ranges(r, "fleet"), ConfigError);
  r = FleetRanges{};
  r.background_load = 1.0;
  EXPECT_THROW(validate_ranges(r, "fleet"), ConfigError);
  try {
    r = FleetRanges{};
    r.alpha = {-1, 1};
    validate_ranges(r, "fleet");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fleet.alpha"), std::string::npos);
  }
}

TEST(EligibilityTest, BoundaryEqualityIsEligible) {
  EXPECT_TRUE(eligible(device_with({4, 4, 4}), job_with({4, 4, 4})));
}

TEST(EligibilityTest, OneShortComponentIsIneligible) {
  EXPECT_FALSE(eligible(device_with({4, 4, 4}), job_with({4, 5, 4})));
}

TEST(EligibilityTest, ZeroDemandFitsZeroAvailability) {
  EXPECT_TRUE(eligible(device_with({0, 0, 0}), job_with({0, 0, 0})));
}

TEST(EligibilityTest, MonotoneInAvailability) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const ResourceVector avail{u(rng), u(rng), u(rng)};
    const JobSpec job = job_with({u(rng), u(rng), u(rng)});
    if (!eligible(device_with(avail), job)) continue;
    ResourceVector more = avail;
    more[trial % 3] += u(rng);
    EXPECT_TRUE(eligible(device_with(more), job));
  }
}

TEST(DevicesPerRoundTest, RoundsAndFloorsAtOne) {
  JobSpec j;
  j.fraction = 0.1;
  EXPECT_EQ(devices_per_round(j, 100), 10u);
  EXPECT_EQ(devices_per_round(j, 4), 1u);
  j.fraction = 0.25;
  EXPECT_EQ(devices_per_round(j, 10), 3u);  // 2.5 rounds half away from zero
  j.fraction = 1.0;
  EXPECT_EQ(devices_per_round(j, 7), 7u);
}

TEST(LedgerTest, PlanIncrementsSelectedOnly) {
  ParticipationLedger ledger(6, 1);
  ledger.record({0, 0, {2, 5}});
  for (DeviceId k = 0; k < 6; ++k) {
    EXPECT_EQ(ledger.count(k, 0), (k == 2 || k == 5) ? 1u : 0u);
  }
  EXPECT_EQ(ledger.rounds_started(0), 1u);
}

TEST(LedgerTest, SamePlanTwiceGivesTwo) {
  const SchedulingPlan plan{0, 0, {2, 5}};
  const auto ledger = update_ledger(update_ledger(ParticipationLedger(6, 1), plan), plan);
  EXPECT_EQ(ledger.count(2, 0), 2u);
  EXPECT_EQ(ledger.count(5, 0), 2u);
  EXPECT_EQ(ledger.count(0, 0), 0u);
}

TEST(LedgerTest, ThreePlansAccumulate) {
  ParticipationLedger ledger(4, 1);
  for (const auto& sel : {std::vector<DeviceId>{0, 1}, {2, 3}, {0, 2}}) {
    ledger.record({0, 0, sel});
  }
  EXPECT_EQ(ledger.count(0, 0), 2u);
  EXPECT_EQ(ledger.count(1, 0), 1u);
  EXPECT_EQ(ledger.count(2, 0), 2u);
  EXPECT_EQ(ledger.count(3, 0), 1u);
  EXPECT_EQ(ledger.total_count(0), 6u);
}

TEST(LedgerTest, JobsAreIndependent) {
  ParticipationLedger ledger(3, 2);
  ledger.record({1, 0, {0, 2}});
  EXPECT_EQ(ledger.count(0, 0), 0u);
  EXPECT_EQ(ledger.count(0, 1), 1u);
  EXPECT_EQ(ledger.rounds_started(0), 0u);
  EXPECT_EQ(ledger.rounds_started(1), 1u);
}

TEST(LedgerTest, UnknownIdsThrow) {
  ParticipationLedger ledger(3, 1);
  EXPECT_THROW(ledger.record({0, 0, {3}}), std::out_of_range);
  EXPECT_THROW(ledger.record({1, 0, {0}}), std::out_of_range);
  EXPECT_THROW((void)ledger.count(5, 0), std::out_of_range);
}

TEST(LedgerTest, ConservationAndMonotonicity) {
  std::mt19937_64 rng(17);
  ParticipationLedger ledger(12, 1);
  ParticipationLedger prev = ledger;
  std::vector<DeviceId> ids(12);
  for (DeviceId k = 0; k < 12; ++k) ids[k] = k;
  for (int r = 0; r < 50; ++r) {
    std::vector<DeviceId> sel;
    std::sample(ids.begin(), ids.end(), std::back_inserter(sel), 4, rng);
    ledger.record({0, static_cast<std::uint32_t>(r), sel});
    EXPECT_EQ(ledger.total_count(0), 4u * static_cast<std::uint64_t>(r + 1));
    for (DeviceId k = 0; k < 12; ++k) EXPECT_GE(ledger.count(k, 0), prev.count(k, 0));
    prev = ledger;
  }
}

TEST(RngTest, StreamsArePureAndDistinct) {
  const StreamFactory f(123);
  EXPECT_EQ(f.derive(StreamTag::kExecTime, 1, 2, 3), StreamFactory(123).derive(StreamTag::kExecTime, 1, 2, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 8; ++a) {
    for (std::uint64_t b = 0; b < 8; ++b) {
      for (std::uint64_t c = 0; c < 8; ++c) seen.insert(f.derive(StreamTag::kTrain, a, b, c));
    }
  }
  EXPECT_EQ(seen.size(), 512u);
  EXPECT_NE(f.derive(StreamTag::kTrain, 1, 2, 3), f.derive(StreamTag::kExecTime, 1, 2, 3));
  EXPECT_NE(f.derive(StreamTag::kTrain, 1, 2, 3), f.derive(StreamTag::kTrain, 2, 1, 3));
  EXPECT_NE(f.derive(StreamTag::kTrain), StreamFactory(124).derive(StreamTag::kTrain));
}

TEST(RngTest, NameHashIsStable) {
  EXPECT_EQ(hash_name("job"), hash_name(std::string("job")));
  EXPECT_NE(hash_name("job-a"), hash_name("job-b"));
  EXPECT_EQ(hash_name(""), 0xcbf29ce484222325ULL);  // FNV-1a offset basis
}

}  // namespace
}  // namespace fedact
