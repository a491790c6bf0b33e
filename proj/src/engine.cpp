#include "fedact/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace fedact {

std::string_view scheduler_name(SchedulerKind kind) noexcept {
  switch (kind) {
    case SchedulerKind::kFedAct: return "fedact";
    case SchedulerKind::kRandom: return "random";
    case SchedulerKind::kGreedy: return "greedy";
    case SchedulerKind::kGenetic: return "genetic";
    case SchedulerKind::kSequential: return "sequential";
  }
  return "?";
}

SchedulerKind parse_scheduler(std::string_view name) {
  for (SchedulerKind k : all_schedulers()) {
    if (scheduler_name(k) == name) return k;
  }
  throw ConfigError("scheduler.name: unknown scheduler `" + std::string(name) + "`");
}

std::vector<SchedulerKind> all_schedulers() {
  return {SchedulerKind::kFedAct, SchedulerKind::kRandom, SchedulerKind::kGreedy,
          SchedulerKind::kGenetic, SchedulerKind::kSequential};
}

void SimulationConfig::validate() const {
  if (fleet.empty()) throw ConfigError("fleet: no devices configured");
  if (jobs.empty()) throw ConfigError("jobs: at least one job is required");
  std::set<std::string> names;
  for (std::size_t m = 0; m < jobs.size(); ++m) {
    const JobSpec& j = jobs[m];
    const std::string f = "jobs[" + std::to_string(m) + "]";
    if (j.id != m) throw ConfigError(f + ".id: must equal its position");
    if (j.name.empty()) throw ConfigError(f + ".name: must not be empty");
    if (!names.insert(j.name).second) throw ConfigError(f + ".name: duplicate `" + j.name + "`");
    if (!j.demand.all_finite_nonnegative()) {
      throw ConfigError(f + ".demand: components must be finite and >= 0");
    }
    if (!(j.fraction > 0.0 && j.fraction <= 1.0)) {
      throw ConfigError(f + ".fraction_Cm: must lie in (0, 1]");
    }
    if (j.max_rounds < 1) throw ConfigError(f + ".max_rounds_Rm: must be >= 1");
    if (!(j.target_loss >= 0.0) || !std::isfinite(j.target_loss)) {
      throw ConfigError(f + ".target_loss_lm: must be finite and >= 0");
    }
    if (j.target_accuracy && !(*j.target_accuracy >= 0.0 && *j.target_accuracy <= 1.0)) {
      throw ConfigError(f + ".target_accuracy: must lie in [0, 1]");
    }
    if (j.local_epochs < 1) throw ConfigError(f + ".local_epochs_tau: must be >= 1");
    if (j.batch_size < 1) throw ConfigError(f + ".batch_size: must be >= 1");
  }
  workload.validate();
}

double execution_floor(const DeviceProfile& device, const JobSpec& job) {
  return static_cast<double>(job.local_epochs) * device.alpha *
         static_cast<double>(device.data_size(job.id));
}

double sample_execution_time(const DeviceProfile& device, const JobSpec& job, Rng& rng) {
  const std::size_t samples = device.data_size(job.id);
  if (samples == 0) {
    throw std::invalid_argument("device " + std::to_string(device.id) +
                                " holds no data for job " + std::to_string(job.id));
  }
  const double work = static_cast<double>(job.local_epochs) * static_cast<double>(samples);
  std::exponential_distribution<double> tail(device.mu / work);
  return work * device.alpha + tail(rng);
}

RoundRecord run_round(const JobSpec& job, const SchedulingPlan& plan,
                      std::span<const DeviceProfile> fleet, const StreamFactory& streams,
                      JobWorkload& workload, double start_time) {
  if (plan.selected.empty()) throw std::invalid_argument("run_round: empty plan");
  const std::uint64_t key = hash_name(job.name);
  RoundRecord rec;
  rec.job = job.id;
  rec.round = plan.round + 1;
  rec.selected = plan.selected;
  rec.start_time = start_time;
  for (DeviceId k : plan.selected) {
    Rng rng = streams.stream(StreamTag::kExecTime, key, plan.round, k);
    rec.round_duration = std::max(rec.round_duration, sample_execution_time(fleet[k], job, rng));
  }
  const Evaluation eval = workload.train_round(plan.selected, plan.round);
  rec.global_loss = eval.loss;
  rec.global_accuracy = eval.accuracy;
  rec.cumulative_time = start_time + rec.round_duration;
  return rec;
}

bool SimResult::ok() const noexcept {
  return std::all_of(jobs.begin(), jobs.end(),
                     [](const JobResult& j) { return j.status == "ok"; });
}

namespace {

enum class JobState { kIdle, kRequesting, kStarved, kRunning, kDone };

const char* state_name(JobState s) {
  switch (s) {
    case JobState::kIdle: return "idle";
    case JobState::kRequesting: return "requesting";
    case JobState::kStarved: return "starved";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
  }
  return "?";
}

class Simulation {
 public:
  Simulation(const SimulationConfig& config, const SchedulerSettings& scheduler,
             std::uint64_t seed, const SimulationHooks& hooks)
      : config_(config), scheduler_(scheduler), streams_(seed), hooks_(hooks) {
    config_.validate();
    scheduler_.fedact.weights.validate();
    scheduler_.fedact.resource_weights.validate();
    scheduler_.genetic.validate();
    if (!(scheduler_.greedy_lambda >= 0.0)) throw ConfigError("scheduler.lambda: must be >= 0");

    fleet_ = generate_fleet(config_.fleet, seed);
    const std::size_t num_devices = fleet_.size();
    const std::size_t num_jobs = config_.jobs.size();
    for (DeviceProfile& d : fleet_) d.data_sizes.assign(num_jobs, 0);

    for (const JobSpec& job : config_.jobs) {
      workloads_.push_back(JobWorkload::create(config_.workload, job, num_devices, streams_));
      for (DeviceProfile& d : fleet_) d.data_sizes[job.id] = workloads_.back()->shard_size(d.id);
    }
    for (const JobSpec& job : config_.jobs) {
      const std::size_t needed = devices_per_round(job, num_devices);
      const std::size_t usable = candidate_pool(job, fleet_, OccupiedSet(num_devices)).size();
      if (usable < needed) {
        throw ConfigError("jobs[" + std::to_string(job.id) + "].demand: only " +
                          std::to_string(usable) + " device(s) can serve the job, " +
                          std::to_string(needed) + " needed per round");
      }
    }

    ledger_ = ParticipationLedger(num_devices, num_jobs);
    occupied_ = OccupiedSet(num_devices);
    owner_.assign(num_devices, kNoOwner);
    states_.assign(num_jobs, JobState::kIdle);
    pending_.resize(num_jobs);
    results_.resize(num_jobs);
    for (const JobSpec& job : config_.jobs) {
      results_[job.id].job = job.id;
      results_[job.id].name = job.name;
    }
  }

  SimResult run() {
    if (scheduler_.kind == SchedulerKind::kSequential) {
      order_ = sequential_plan(config_.jobs);
      request(order_.front(), 0.0);
    } else {
      for (const JobSpec& job : config_.jobs) request(job.id, 0.0);
    }

    while (!queue_.empty()) {
      const SimEvent ev = queue_.top();
      queue_.pop();
      ++events_;
      if (hooks_.on_event) hooks_.on_event(ev);
      switch (ev.kind) {
        case EventKind::kScheduleRetry: on_request(ev.job, ev.time); break;
        case EventKind::kRoundComplete: on_round_complete(ev.job, ev.time); break;
        case EventKind::kJobDone: on_job_done(ev.job, ev.time); break;
      }
    }

    for (std::size_t m = 0; m < states_.size(); ++m) {
      if (states_[m] != JobState::kDone) {
        throw SimulationError("event queue drained with unfinished jobs\n" + dump(0.0));
      }
    }

    SimResult out;
    out.jobs = std::move(results_);
    double total = 0.0;
    for (JobResult& j : out.jobs) {
      const JobSpec& spec = config_.jobs[j.job];
      if (!j.rounds.empty()) {
        j.final_loss = j.rounds.back().global_loss;
        j.final_accuracy = j.rounds.back().global_accuracy;
      } else {
        const Evaluation e = workloads_[j.job]->current();
        j.final_loss = e.loss;
        j.final_accuracy = e.accuracy;
      }
      if (spec.target_accuracy) {
        for (const RoundRecord& r : j.rounds) {
          if (r.global_accuracy >= *spec.target_accuracy) {
            j.time_to_target = r.cumulative_time;
            break;
          }
        }
      }
      total += j.jct;
    }
    out.average_jct = total / static_cast<double>(out.jobs.size());
    out.events_processed = events_;
    out.ledger = std::move(ledger_);
    out.fleet = std::move(fleet_);
    return out;
  }

 private:
  static constexpr std::uint32_t kNoOwner = ~std::uint32_t{0};

  void push(double time, JobId job, EventKind kind) { queue_.push({time, job, kind}); }

  void request(JobId job, double time) {
    states_[job] = JobState::kRequesting;
    push(time, job, EventKind::kScheduleRetry);
  }

  SchedulingPlan select(const JobSpec& job, std::uint32_t round) {
    const std::uint64_t key = hash_name(job.name);
    switch (scheduler_.kind) {
      case SchedulerKind::kFedAct:
        return fedact_select(job, fleet_, occupied_, ledger_, round, scheduler_.fedact);
      case SchedulerKind::kRandom:
      case SchedulerKind::kSequential: {
        Rng rng = streams_.stream(StreamTag::kSelect, key, round);
        return random_select(job, fleet_, occupied_, rng, round);
      }
      case SchedulerKind::kGreedy:
        return greedy_select(job, fleet_, occupied_, ledger_, scheduler_.greedy_lambda, round,
                             scheduler_.fedact.resource_weights);
      case SchedulerKind::kGenetic: {
        GeneticParams params = scheduler_.genetic;
        params.seed = streams_.derive(StreamTag::kGenetic, key, round, scheduler_.genetic.seed);
        return genetic_select(job, fleet_, occupied_, params, round,
                              scheduler_.fedact.resource_weights);
      }
    }
    throw std::logic_error("unhandled scheduler kind");
  }

  void on_request(JobId m, double time) {
    if (states_[m] != JobState::kRequesting) return;
    const JobSpec& job = config_.jobs[m];
    const std::size_t needed = devices_per_round(job, fleet_.size());
    if (candidate_pool(job, fleet_, occupied_).size() < needed) {
      states_[m] = JobState::kStarved;
      if (running_ == 0) throw SimulationError("deadlock: every job is starved\n" + dump(time));
      return;
    }

    const SchedulingPlan plan = select(job, ledger_.rounds_started(m));
    for (DeviceId k : plan.selected) {
      if (owner_[k] != kNoOwner) {
        throw std::logic_error("device " + std::to_string(k) + " assigned to job " +
                               std::to_string(m) + " while in flight for job " +
                               std::to_string(owner_[k]));
      }
      occupied_.insert(k);
      owner_[k] = m;
    }
    ledger_.record(plan);
    if (hooks_.on_plan) hooks_.on_plan(time, plan);

    try {
      pending_[m] = run_round(job, plan, fleet_, streams_, *workloads_[m], time);
    } catch (const WorkloadDivergence& e) {
      release(plan.selected);
      results_[m].status = std::string("failed: ") + e.what();
      finish(m, time);
      return;
    }
    states_[m] = JobState::kRunning;
    ++running_;
    push(pending_[m].cumulative_time, m, EventKind::kRoundComplete);
  }

  void on_round_complete(JobId m, double time) {
    const JobSpec& job = config_.jobs[m];
    RoundRecord rec = std::move(pending_[m]);
    release(rec.selected);
    --running_;
    if (hooks_.on_round_complete) hooks_.on_round_complete(time, rec);
    const bool converged = rec.global_loss <= job.target_loss;
    const bool capped = rec.round >= job.max_rounds;
    results_[m].rounds.push_back(std::move(rec));

    if (converged || capped) {
      finish(m, time);
    } else {
      request(m, time);
    }
    for (std::size_t w = 0; w < states_.size(); ++w) {
      if (states_[w] == JobState::kStarved) request(static_cast<JobId>(w), time);
    }
  }

  void on_job_done(JobId m, double time) {
    results_[m].jct = time;
    if (scheduler_.kind != SchedulerKind::kSequential) return;
    const auto it = std::find(order_.begin(), order_.end(), m);
    if (it != order_.end() && std::next(it) != order_.end()) request(*std::next(it), time);
  }

  void finish(JobId m, double time) {
    states_[m] = JobState::kDone;
    push(time, m, EventKind::kJobDone);
  }

  void release(const std::vector<DeviceId>& devices) {
    for (DeviceId k : devices) {
      occupied_.erase(k);
      owner_[k] = kNoOwner;
    }
  }

  std::string dump(double time) const {
    std::ostringstream os;
    os << "time=" << time << " occupied=" << occupied_.size() << '/' << fleet_.size() << '\n';
    for (std::size_t m = 0; m < states_.size(); ++m) {
      os << "  job " << m << " (" << config_.jobs[m].name << "): " << state_name(states_[m])
         << ", rounds started " << ledger_.rounds_started(static_cast<JobId>(m))
         << ", eligible free "
         << candidate_pool(config_.jobs[m], fleet_, occupied_).size() << '/'
         << devices_per_round(config_.jobs[m], fleet_.size()) << '\n';
    }
    return os.str();
  }

  const SimulationConfig& config_;
  SchedulerSettings scheduler_;
  StreamFactory streams_;
  const SimulationHooks& hooks_;

  std::vector<DeviceProfile> fleet_;
  std::vector<std::unique_ptr<JobWorkload>> workloads_;
  ParticipationLedger ledger_;
  OccupiedSet occupied_;
  std::vector<std::uint32_t> owner_;
  std::vector<JobState> states_;
  std::vector<RoundRecord> pending_;
  std::vector<JobResult> results_;
  std::vector<JobId> order_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> queue_;
  std::size_t running_ = 0;
  std::uint64_t events_ = 0;
};

}  // namespace

SimResult run_simulation(const SimulationConfig& config, const SchedulerSettings& scheduler,
                         std::uint64_t seed, const SimulationHooks& hooks) {
  return Simulation(config, scheduler, seed, hooks).run();
}

MetricsSummary compute_metrics(std::span<const std::vector<RoundRecord>> histories,
                               std::span<const std::optional<double>> accuracy_targets) {
  if (histories.empty()) throw std::invalid_argument("compute_metrics: no histories");
  if (accuracy_targets.size() != histories.size()) {
    throw std::invalid_argument("compute_metrics: one target per history required");
  }
  MetricsSummary out;
  double total = 0.0;
  for (std::size_t m = 0; m < histories.size(); ++m) {
    const auto& h = histories[m];
    if (h.empty()) throw std::invalid_argument("compute_metrics: empty history");
    JobMetrics jm;
    jm.jct = h.back().cumulative_time;
    jm.final_accuracy = h.back().global_accuracy;
    if (accuracy_targets[m]) {
      for (const RoundRecord& r : h) {
        if (r.global_accuracy >= *accuracy_targets[m]) {
          jm.time_to_target = r.cumulative_time;
          break;
        }
      }
    }
    total += jm.jct;
    out.jobs.push_back(jm);
  }
  out.average_jct = total / static_cast<double>(out.jobs.size());
  return out;
}

}  // namespace fedact
