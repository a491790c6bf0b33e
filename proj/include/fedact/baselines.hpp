#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedact/ledger.hpp"
#include "fedact/rng.hpp"
#include "fedact/scoring.hpp"
#include "fedact/selection.hpp"
#include "fedact/types.hpp"

namespace fedact {

/// Uniform sample without replacement from the candidate pool.
SchedulingPlan random_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                             const OccupiedSet& occupied, Rng& rng, std::uint32_t round = 0);

/// Repeatedly takes the candidate maximizing
///   resource_alignment - lambda * count / max(1, round)
/// until the plan is full. Lower id wins ties.
SchedulingPlan greedy_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                             const OccupiedSet& occupied, const ParticipationLedger& ledger,
                             double penalty_lambda, std::uint32_t round,
                             const ResourceWeights& resource_weights = {});

struct GeneticParams {
  std::uint32_t population_size = 20;
  std::uint32_t generations = 30;
  double mutation_rate = 0.1;
  double crossover_rate = 0.8;
  std::uint32_t tournament_size = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GeneticOutcome {
  SchedulingPlan plan;
  double fitness = 0.0;
  // Best fitness after initialization, then after each generation.
  std::vector<double> best_fitness;
};

/// Sum of resource alignment over `subset`, accumulated in ascending id order.
double subset_fitness(const JobSpec& job, std::span<const DeviceProfile> fleet,
                      std::span<const DeviceId> subset,
                      const ResourceWeights& resource_weights = {});

/// Evolves fixed-size subsets of the candidate pool toward maximal total
/// resource alignment. The initial population holds the alignment-greedy
/// subset plus random subsets; the best individual always survives.
GeneticOutcome genetic_search(const JobSpec& job, std::span<const DeviceProfile> fleet,
                              const OccupiedSet& occupied, const GeneticParams& params,
                              std::uint32_t round = 0,
                              const ResourceWeights& resource_weights = {});

SchedulingPlan genetic_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                              const OccupiedSet& occupied, const GeneticParams& params,
                              std::uint32_t round = 0,
                              const ResourceWeights& resource_weights = {});

/// Single-job baseline: jobs run one after another in submission order.
std::vector<JobId> sequential_plan(std::span<const JobSpec> jobs);

}  // namespace fedact
