#include "fedact/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <stdexcept>

namespace fedact {

SchedulingPlan random_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                             const OccupiedSet& occupied, Rng& rng, std::uint32_t round) {
  const std::size_t needed = devices_per_round(job, fleet.size());
  const std::vector<DeviceId> pool = candidate_pool(job, fleet, occupied);
  require_pool(job, pool.size(), needed);

  SchedulingPlan plan{job.id, round, {}};
  plan.selected.reserve(needed);
  std::sample(pool.begin(), pool.end(), std::back_inserter(plan.selected), needed, rng);
  return plan;
}

SchedulingPlan greedy_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                             const OccupiedSet& occupied, const ParticipationLedger& ledger,
                             double penalty_lambda, std::uint32_t round,
                             const ResourceWeights& resource_weights) {
  if (!std::isfinite(penalty_lambda) || penalty_lambda < 0.0) {
    throw ConfigError("scheduler.lambda: must be >= 0");
  }
  const std::size_t needed = devices_per_round(job, fleet.size());
  std::vector<DeviceId> remaining = candidate_pool(job, fleet, occupied);
  require_pool(job, remaining.size(), needed);

  const double denom = static_cast<double>(std::max<std::uint32_t>(1, round));
  std::vector<double> adjusted;
  adjusted.reserve(remaining.size());
  for (DeviceId k : remaining) {
    const double share = ledger.count(k, job.id) / denom;
    adjusted.push_back(resource_alignment(fleet[k], job, resource_weights) -
                       penalty_lambda * share);
  }

  SchedulingPlan plan{job.id, round, {}};
  plan.selected.reserve(needed);
  while (plan.selected.size() < needed) {
    // `remaining` stays in ascending id order, so the first maximum wins ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < remaining.size(); ++i) {
      if (adjusted[i] > adjusted[best]) best = i;
    }
    plan.selected.push_back(remaining[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    adjusted.erase(adjusted.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return plan;
}

void GeneticParams::validate() const {
  if (population_size < 1) throw ConfigError("scheduler.genetic.population_size: must be >= 1");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("scheduler.genetic.mutation_rate: must lie in [0, 1]");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw ConfigError("scheduler.genetic.crossover_rate: must lie in [0, 1]");
  }
  if (crossover_rate > 0.0 && population_size < 2) {
    throw ConfigError(
        "scheduler.genetic.population_size: must be >= 2 when crossover is enabled");
  }
  if (tournament_size < 1) throw ConfigError("scheduler.genetic.tournament_size: must be >= 1");
}

double subset_fitness(const JobSpec& job, std::span<const DeviceProfile> fleet,
                      std::span<const DeviceId> subset,
                      const ResourceWeights& resource_weights) {
  std::vector<DeviceId> ordered(subset.begin(), subset.end());
  std::sort(ordered.begin(), ordered.end());
  double sum = 0.0;
  for (DeviceId k : ordered) sum += resource_alignment(fleet[k], job, resource_weights);
  return sum;
}

namespace {

// Sorted indices into the candidate pool.
using Genome = std::vector<std::uint32_t>;

struct Scored {
  Genome genes;
  double fitness = 0.0;
};

bool fitter(const Scored& a, const Scored& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.genes < b.genes;
}

class GeneticSearch {
 public:
  GeneticSearch(std::vector<double> alignment, std::size_t plan_size,
                const GeneticParams& params)
      : alignment_(std::move(alignment)),
        plan_size_(plan_size),
        params_(params),
        rng_(params.seed) {}

  Scored run(std::vector<double>& best_trace) {
    std::vector<Scored> population = initial_population();
    Scored best = *std::min_element(population.begin(), population.end(), fitter);
    best_trace.push_back(best.fitness);

    for (std::uint32_t g = 0; g < params_.generations; ++g) {
      std::vector<Scored> next;
      next.reserve(params_.population_size);
      next.push_back(best);
      while (next.size() < params_.population_size) {
        const Scored& a = tournament(population);
        Genome child = a.genes;
        if (params_.crossover_rate > 0.0 && coin(params_.crossover_rate)) {
          child = crossover(a.genes, tournament(population).genes);
        }
        mutate(child);
        next.push_back(score(std::move(child)));
      }
      population = std::move(next);
      for (const Scored& s : population) {
        if (fitter(s, best)) best = s;
      }
      best_trace.push_back(best.fitness);
    }
    return best;
  }

 private:
  Scored score(Genome genes) const {
    std::sort(genes.begin(), genes.end());
    double sum = 0.0;
    for (std::uint32_t i : genes) sum += alignment_[i];
    return {std::move(genes), sum};
  }

  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  std::vector<Scored> initial_population() {
    std::vector<std::uint32_t> order(alignment_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return alignment_[a] > alignment_[b];
    });
    std::vector<Scored> population;
    population.reserve(params_.population_size);
    population.push_back(score(Genome(order.begin(), order.begin() + plan_size_)));

    std::vector<std::uint32_t> all(alignment_.size());
    std::iota(all.begin(), all.end(), 0u);
    while (population.size() < params_.population_size) {
      Genome g;
      std::sample(all.begin(), all.end(), std::back_inserter(g), plan_size_, rng_);
      population.push_back(score(std::move(g)));
    }
    return population;
  }

  const Scored& tournament(const std::vector<Scored>& population) {
    std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
    const Scored* winner = &population[pick(rng_)];
    for (std::uint32_t i = 1; i < params_.tournament_size; ++i) {
      const Scored* other = &population[pick(rng_)];
      if (fitter(*other, *winner)) winner = other;
    }
    return *winner;
  }

  // Child draws plan_size genes from the union of both parents, so it stays a
  // valid subset without repair.
  Genome crossover(const Genome& a, const Genome& b) {
    Genome merged;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    if (merged.size() == plan_size_) return merged;
    Genome child;
    std::sample(merged.begin(), merged.end(), std::back_inserter(child), plan_size_, rng_);
    return child;
  }

  // Swaps a gene for a pool member outside the subset.
  void mutate(Genome& genes) {
    if (params_.mutation_rate <= 0.0 || genes.size() >= alignment_.size()) return;
    std::vector<char> member(alignment_.size(), 0);
    for (std::uint32_t i : genes) member[i] = 1;
    std::uniform_int_distribution<std::uint32_t> pick(
        0, static_cast<std::uint32_t>(alignment_.size() - 1));
    for (std::uint32_t& gene : genes) {
      if (!coin(params_.mutation_rate)) continue;
      std::uint32_t replacement = pick(rng_);
      while (member[replacement]) replacement = pick(rng_);
      member[gene] = 0;
      member[replacement] = 1;
      gene = replacement;
    }
  }

  std::vector<double> alignment_;
  std::size_t plan_size_;
  GeneticParams params_;
  Rng rng_;
};

}  // namespace

GeneticOutcome genetic_search(const JobSpec& job, std::span<const DeviceProfile> fleet,
                              const OccupiedSet& occupied, const GeneticParams& params,
                              std::uint32_t round, const ResourceWeights& resource_weights) {
  params.validate();
  const std::size_t needed = devices_per_round(job, fleet.size());
  const std::vector<DeviceId> pool = candidate_pool(job, fleet, occupied);
  require_pool(job, pool.size(), needed);

  GeneticOutcome out;
  out.plan = SchedulingPlan{job.id, round, {}};
  if (pool.size() == needed) {
    out.plan.selected = pool;
    out.fitness = subset_fitness(job, fleet, pool, resource_weights);
    out.best_fitness.push_back(out.fitness);
    return out;
  }

  std::vector<double> alignment;
  alignment.reserve(pool.size());
  for (DeviceId k : pool) alignment.push_back(resource_alignment(fleet[k], job, resource_weights));

  GeneticSearch search(std::move(alignment), needed, params);
  const Scored best = search.run(out.best_fitness);
  out.fitness = best.fitness;
  for (std::uint32_t i : best.genes) out.plan.selected.push_back(pool[i]);
  return out;
}

SchedulingPlan genetic_select(const JobSpec& job, std::span<const DeviceProfile> fleet,
                              const OccupiedSet& occupied, const GeneticParams& params,
                              std::uint32_t round, const ResourceWeights& resource_weights) {
  return genetic_search(job, fleet, occupied, params, round, resource_weights).plan;
}

std::vector<JobId> sequential_plan(std::span<const JobSpec> jobs) {
  if (jobs.empty()) throw std::invalid_argument("sequential_plan: no jobs");
  std::vector<JobId> order;
  order.reserve(jobs.size());
  for (const JobSpec& j : jobs) order.push_back(j.id);
  return order;
}

}  // namespace fedact
