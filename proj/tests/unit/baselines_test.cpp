#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fedact/baselines.hpp"
#include "fedact/fleet.hpp"
#include "fedact/scoring.hpp"
#include "fedact/selection.hpp"
#include "test_support.hpp"

namespace fedact {
namespace {

using testing::random_fleet;
using testing::random_job;
using testing::uniform_device;
using testing::unit_job;

std::vector<DeviceProfile> fleet_with_terms(std::initializer_list<double> terms) {
  std::vector<DeviceProfile> fleet;
  DeviceId id = 0;
  for (double t : terms) fleet.push_back(uniform_device(id++, 1.0 / t));
  return fleet;
}

void expect_valid_plan(const SchedulingPlan& plan, const JobSpec& job,
                       const std::vector<DeviceProfile>& fleet, const OccupiedSet& occ) {
  const std::set<DeviceId> distinct(plan.selected.begin(), plan.selected.end());
  EXPECT_EQ(distinct.size(), plan.selected.size());
  EXPECT_EQ(plan.selected.size(), devices_per_round(job, fleet.size()));
  for (DeviceId k : plan.selected) {
    EXPECT_FALSE(occ.contains(k));
    EXPECT_TRUE(eligible(fleet[k], job));
  }
}

// Best total alignment over all subsets of the pool, ties to the
// lexicographically smaller id set.
std::pair<double, std::vector<DeviceId>> best_subset(const JobSpec& job,
                                                     const std::vector<DeviceProfile>& fleet,
                                                     const std::vector<DeviceId>& pool,
                                                     std::size_t n) {
  std::pair<double, std::vector<DeviceId>> best{-1.0, {}};
  const std::size_t p = pool.size();
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    std::vector<DeviceId> subset;
    double sum = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      if (mask & (1u << i)) {
        subset.push_back(pool[i]);
        sum += resource_alignment(fleet[pool[i]], job);
      }
    }
    if (sum > best.first || (sum == best.first && subset < best.second)) best = {sum, subset};
  }
  return best;
}

TEST(RandomSelectTest, ForcedSingleChoice) {
  auto fleet = fleet_with_terms({0.5, 0.5, 0.5, 0.5});
  Rng rng(1);
  const auto plan = random_select(unit_job(0, 0.25), fleet, OccupiedSet(4, {0, 1, 2}), rng);
  EXPECT_EQ(plan.selected, (std::vector<DeviceId>{3}));
}

TEST(RandomSelectTest, FullFractionTakesEveryDevice) {
  std::vector<DeviceProfile> fleet;
  for (DeviceId i = 0; i < 10; ++i) fleet.push_back(uniform_device(i, 2.0));
  Rng rng(3);
  auto plan = random_select(unit_job(0, 1.0), fleet, OccupiedSet(10), rng);
  std::sort(plan.selected.begin(), plan.selected.end());
  EXPECT_EQ(plan.selected, (std::vector<DeviceId>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST(RandomSelectTest, SameSeedSamePlan) {
  std::vector<DeviceProfile> fleet;
  for (DeviceId i = 0; i < 30; ++i) fleet.push_back(uniform_device(i, 2.0));
  Rng a(11);
  Rng b(11);
  EXPECT_EQ(random_select(unit_job(0, 0.2), fleet, OccupiedSet(30), a).selected,
            random_select(unit_job(0, 0.2), fleet, OccupiedSet(30), b).selected);
}

TEST(RandomSelectTest, CoversThePoolUniformly) {
  std::vector<DeviceProfile> fleet;
  for (DeviceId i = 0; i < 10; ++i) fleet.push_back(uniform_device(i, 2.0));
  Rng rng(5);
  std::vector<int> hits(10, 0);
  for (int t = 0; t < 20000; ++t) {
    for (DeviceId k : random_select(unit_job(0, 0.3), fleet, OccupiedSet(10), rng).selected) {
      ++hits[k];
    }
  }
  for (int h : hits) EXPECT_NEAR(h, 6000, 300);
}

TEST(GreedySelectTest, LambdaZeroMatchesFedActWithoutFairness) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 12;
    const auto fleet = random_fleet(rng, k, 1);
    const JobSpec job = random_job(rng, 0, k);
    ParticipationLedger ledger(k, 1);
    ledger.record({0, 0, {0}});
    if (candidate_pool(job, fleet, OccupiedSet(k)).size() < devices_per_round(job, k)) continue;
    FedActParams params;
    params.weights = {0.7, 0.0};
    EXPECT_EQ(greedy_select(job, fleet, OccupiedSet(k), ledger, 0.0, 1).selected,
              fedact_select(job, fleet, OccupiedSet(k), ledger, 1, params).selected);
  }
}

TEST(GreedySelectTest, PenaltyFavorsUnusedDevice) {
  auto fleet = fleet_with_terms({0.5, 0.5});
  ParticipationLedger ledger(2, 1);
  for (std::uint32_t r = 0; r < 5; ++r) ledger.record({0, r, {0}});
  const auto plan = greedy_select(unit_job(0, 0.5), fleet, OccupiedSet(2), ledger, 0.1, 5);
  EXPECT_EQ(plan.selected, (std::vector<DeviceId>{1}));
}

TEST(GreedySelectTest, AdjustedScoresPickOneThenTwo) {
  // Resource terms (0.9, 0.8, 0.7, 0.6), shares (0.5, 0, 0, 0.5), lambda 0.5:
  // adjusted (0.65, 0.8, 0.7, 0.35).
  auto fleet = fleet_with_terms({0.9, 0.8, 0.7, 0.6});
  ParticipationLedger ledger(4, 1);
  ledger.record({0, 0, {0}});
  ledger.record({0, 1, {3}});
  const auto plan = greedy_select(unit_job(0, 0.5), fleet, OccupiedSet(4), ledger, 0.5, 2);
  EXPECT_EQ(plan.selected, (std::vector<DeviceId>{1, 2}));
}

TEST(GreedySelectTest, RejectsNegativeLambda) {
  auto fleet = fleet_with_terms({0.5});
  EXPECT_THROW(greedy_select(unit_job(0, 1.0), fleet, OccupiedSet(1), ParticipationLedger(1, 1),
                             -0.1, 0),
               ConfigError);
}

TEST(GeneticSelectTest, OnlyFeasibleSubsetIsReturned) {
  auto fleet = fleet_with_terms({0.3, 0.9, 0.6, 0.2});
  GeneticParams params;
  params.generations = 50;
  const auto plan =
      genetic_select(unit_job(0, 0.5), fleet, OccupiedSet(4, {0, 3}), params);
  EXPECT_EQ(plan.selected, (std::vector<DeviceId>{1, 2}));
}

TEST(GeneticSelectTest, ZeroGenerationsKeepsGreedySeed) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto fleet = random_fleet(rng, 12, 1);
    JobSpec job = random_job(rng, 0, 12);
    job.fraction = 0.25;
    if (candidate_pool(job, fleet, OccupiedSet(12)).size() < 3) continue;
    GeneticParams params;
    params.generations = 0;
    params.seed = static_cast<std::uint64_t>(trial);
    const auto outcome = genetic_search(job, fleet, OccupiedSet(12), params);
    const auto greedy =
        greedy_select(job, fleet, OccupiedSet(12), ParticipationLedger(12, 1), 0.0, 0);
    EXPECT_GE(outcome.fitness, subset_fitness(job, fleet, greedy.selected));
    EXPECT_EQ(outcome.best_fitness.size(), 1u);
  }
}

TEST(GeneticSelectTest, SixDevicesPairMatchesEnumeration) {
  auto fleet = fleet_with_terms({0.2, 0.7, 0.4, 0.9, 0.1, 0.6});
  const JobSpec job = unit_job(0, 2.0 / 6.0);
  GeneticParams params;
  params.population_size = 6;
  params.generations = 5;
  params.seed = 3;
  const auto outcome = genetic_search(job, fleet, OccupiedSet(6), params);
  const auto oracle = best_subset(job, fleet, {0, 1, 2, 3, 4, 5}, 2);
  EXPECT_DOUBLE_EQ(outcome.fitness, oracle.first);
  auto chosen = outcome.plan.selected;
  std::sort(chosen.begin(), chosen.end());
  EXPECT_EQ(chosen, (std::vector<DeviceId>{1, 3}));
}

TEST(GeneticSelectTest, MatchesEnumerationOnRandomInstances) {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 7;
    const auto fleet = random_fleet(rng, k, 1);
    const JobSpec job = random_job(rng, 0, k);
    const auto pool = candidate_pool(job, fleet, OccupiedSet(k));
    const std::size_t n = devices_per_round(job, k);
    if (pool.size() < n) continue;
    GeneticParams params;
    params.seed = static_cast<std::uint64_t>(trial);
    const auto outcome = genetic_search(job, fleet, OccupiedSet(k), params);
    const auto oracle = best_subset(job, fleet, pool, n);
    EXPECT_NEAR(outcome.fitness, oracle.first, 1e-12);
    expect_valid_plan(outcome.plan, job, fleet, OccupiedSet(k));
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(GeneticSelectTest, BestFitnessNeverDecreases) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto fleet = random_fleet(rng, 30, 1);
    JobSpec job = random_job(rng, 0, 30);
    job.fraction = 0.2;
    if (candidate_pool(job, fleet, OccupiedSet(30)).size() < 6) continue;
    GeneticParams params;
    params.seed = static_cast<std::uint64_t>(trial);
    params.mutation_rate = 0.5;
    const auto outcome = genetic_search(job, fleet, OccupiedSet(30), params);
    ASSERT_EQ(outcome.best_fitness.size(), params.generations + 1u);
    for (std::size_t g = 1; g < outcome.best_fitness.size(); ++g) {
      EXPECT_GE(outcome.best_fitness[g], outcome.best_fitness[g - 1]);
    }
    EXPECT_EQ(outcome.best_fitness.back(), outcome.fitness);
  }
}

TEST(GeneticSelectTest, SameSeedSameResult) {
  std::mt19937_64 rng(8);
  const auto fleet = random_fleet(rng, 25, 1);
  JobSpec job = unit_job(0, 0.2);
  job.demand = {0.5, 100, 1};
  GeneticParams params;
  params.seed = 77;
  EXPECT_EQ(genetic_select(job, fleet, OccupiedSet(25), params).selected,
            genetic_select(job, fleet, OccupiedSet(25), params).selected);
}

TEST(GeneticSelectTest, ParamsAreValidated) {
  GeneticParams p;
  p.population_size = 1;
  EXPECT_THROW(p.validate(), ConfigError);
  p.crossover_rate = 0.0;
  EXPECT_NO_THROW(p.validate());
  p.mutation_rate = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(BaselinePropertyTest, AllPlansAreValid) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 3 + trial % 15;
    const auto fleet = random_fleet(rng, k, 1);
    const JobSpec job = random_job(rng, 0, k);
    OccupiedSet occ(k);
    for (DeviceId i = 0; i < k; ++i) {
      if (u(rng) < 0.25) occ.insert(i);
    }
    if (candidate_pool(job, fleet, occ).size() < devices_per_round(job, k)) {
      Rng r(1);
      EXPECT_THROW(random_select(job, fleet, occ, r), SchedulingStarved);
      continue;
    }
    Rng r(static_cast<std::uint64_t>(trial));
    expect_valid_plan(random_select(job, fleet, occ, r), job, fleet, occ);
    expect_valid_plan(greedy_select(job, fleet, occ, ParticipationLedger(k, 1), 0.3, 0), job,
                      fleet, occ);
    expect_valid_plan(genetic_select(job, fleet, occ, GeneticParams{}), job, fleet, occ);
    expect_valid_plan(fedact_select(job, fleet, occ, ParticipationLedger(k, 1), 0), job, fleet,
                      occ);
  }
}

TEST(SequentialPlanTest, SubmissionOrder) {
  std::vector<JobSpec> jobs{unit_job(0, 0.1), unit_job(1, 0.1), unit_job(2, 0.1)};
  EXPECT_EQ(sequential_plan(jobs), (std::vector<JobId>{0, 1, 2}));
  EXPECT_THROW(sequential_plan({}), std::invalid_argument);
}

}  // namespace
}  // namespace fedact
