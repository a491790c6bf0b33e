#include "fedact/experiment.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

namespace fedact {

std::vector<Replication> run_experiment(const ExperimentConfig& config) {
  std::vector<Replication> reps;
  for (SchedulerKind kind : config.schedulers) {
    for (std::uint64_t seed : config.seeds) {
      Replication& r = reps.emplace_back();
      r.scheduler = kind;
      r.seed = seed;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < reps.size(); i = next++) {
      Replication& rep = reps[i];
      SchedulerSettings settings = config.scheduler;
      settings.kind = rep.scheduler;
      try {
        rep.result = run_simulation(config.simulation, settings, rep.seed);
        for (const JobResult& job : rep.result->jobs) {
          if (job.status != "ok") {
            spdlog::warn("{} seed {} job {}: {}", scheduler_name(rep.scheduler), rep.seed,
                         job.name, job.status);
          }
        }
      } catch (const std::exception& e) {
        rep.error = e.what();
        spdlog::error("{} seed {}: {}", scheduler_name(rep.scheduler), rep.seed, rep.error);
      }
    }
  };

  std::size_t threads = config.threads != 0 ? config.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, reps.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return reps;
}

std::vector<SchedulerReport> summarize(const std::vector<Replication>& replications) {
  std::map<std::string_view, std::pair<SchedulerReport, std::vector<double>>> by_name;
  for (const Replication& rep : replications) {
    auto& [report, values] = by_name[scheduler_name(rep.scheduler)];
    report.scheduler = rep.scheduler;
    ++report.runs;
    if (rep.ok()) {
      values.push_back(rep.result->average_jct);
    } else {
      ++report.failures;
    }
  }
  std::vector<SchedulerReport> out;
  for (auto& [name, entry] : by_name) {
    auto& [report, values] = entry;
    if (!values.empty()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      report.mean_average_jct = sum / static_cast<double>(values.size());
      double sq = 0.0;
      for (double v : values) sq += (v - report.mean_average_jct) * (v - report.mean_average_jct);
      report.stddev_average_jct =
          values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    }
    out.push_back(report);
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", value);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write `" + path.string() + "`");
  return out;
}

}  // namespace

void write_results(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const std::vector<Replication>& replications) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create `" + dir.string() + "`: " + ec.message());

  std::vector<const Replication*> order;
  for (const Replication& r : replications) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const Replication* a, const Replication* b) {
    const auto na = scheduler_name(a->scheduler);
    const auto nb = scheduler_name(b->scheduler);
    if (na != nb) return na < nb;
    return a->seed < b->seed;
  });

  auto rounds = open_output(dir / "rounds.csv");
  rounds << "scheduler,seed,job_id,round,selected_count,round_duration_s,cumulative_time_s,"
            "loss,accuracy\n";
  auto summary = open_output(dir / "summary.csv");
  summary << "scheduler,seed,job_id,jct_s,time_to_target_s_or_NA,final_accuracy,status\n";

  for (const Replication* rep : order) {
    const std::string prefix =
        std::string(scheduler_name(rep->scheduler)) + "," + std::to_string(rep->seed) + ",";
    if (!rep->result) {
      for (const JobSpec& job : config.simulation.jobs) {
        summary << prefix << job.id << ",NA,NA,NA," << csv_field("failed: " + rep->error)
                << "\n";
      }
      continue;
    }
    std::vector<const JobResult*> jobs;
    for (const JobResult& j : rep->result->jobs) jobs.push_back(&j);
    std::sort(jobs.begin(), jobs.end(),
              [](const JobResult* a, const JobResult* b) { return a->job < b->job; });
    for (const JobResult* job : jobs) {
      for (const RoundRecord& r : job->rounds) {
        rounds << prefix << job->job << "," << r.round << "," << r.selected.size() << ","
               << format_number(r.round_duration) << "," << format_number(r.cumulative_time)
               << "," << format_number(r.global_loss) << ","
               << format_number(r.global_accuracy) << "\n";
      }
      summary << prefix << job->job << "," << format_number(job->jct) << ","
              << (job->time_to_target ? format_number(*job->time_to_target) : "NA") << ","
              << format_number(job->final_accuracy) << "," << csv_field(job->status) << "\n";
    }
  }

  auto report = open_output(dir / "report.txt");
  report << "scheduler     runs  failed  avg JCT mean (s)  stddev (s)\n";
  for (const SchedulerReport& s : summarize(replications)) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %5zu %7zu %17s %11s\n",
                  std::string(scheduler_name(s.scheduler)).c_str(), s.runs, s.failures,
                  s.failures == s.runs ? "NA" : format_number(s.mean_average_jct).c_str(),
                  s.failures == s.runs ? "NA" : format_number(s.stddev_average_jct).c_str());
    report << line;
  }
  if (!rounds || !summary || !report) {
    throw std::runtime_error("write error in `" + dir.string() + "`");
  }
}

}  // namespace fedact
