#include "fedact/config.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace fedact {
namespace {

using nlohmann::json;

std::string show(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string show(const Range& r) { return "[" + show(r.min) + ", " + show(r.max) + "]"; }

// Reads one JSON object, rejecting keys it was not told about and recording
// every default it falls back to.
class Section {
 public:
  Section(const json& node, std::string path, std::vector<std::string>& defaults)
      : node_(node), path_(std::move(path)), defaults_(defaults) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : node_.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("unknown key `" + field(key) + "`");
      }
    }
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return node_.contains(key); }
  const json& at(std::string_view key) const { return node_.at(key); }

  double number(std::string_view key, double fallback) const {
    if (!has(key)) {
      note(key, show(fallback));
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key) + ": must be finite");
    return d;
  }

  std::uint64_t integer(std::string_view key, std::uint64_t fallback,
                        std::uint64_t max = std::numeric_limits<std::uint32_t>::max()) const {
    if (!has(key)) {
      note(key, std::to_string(fallback));
      return fallback;
    }
    return as_integer(at(key), field(key), max);
  }

  std::string text(std::string_view key, const std::string& fallback) const {
    if (!has(key)) {
      note(key, fallback);
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  Range range(std::string_view key, const Range& fallback) const {
    if (!has(key)) {
      note(key, show(fallback));
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(field(key) + ": expected [min, max]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  static std::uint64_t as_integer(const json& v, const std::string& where, std::uint64_t max) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > max) throw ConfigError(where + ": value too large");
      return u;
    }
    const auto i = v.get<std::int64_t>();
    if (i < 0) throw ConfigError(where + ": must be >= 0");
    if (static_cast<std::uint64_t>(i) > max) throw ConfigError(where + ": value too large");
    return static_cast<std::uint64_t>(i);
  }

  void note(std::string_view key, const std::string& value) const {
    defaults_.push_back(field(key) + " = " + value);
  }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& defaults_;
};

const json& empty_object() {
  static const json kEmpty = json::object();
  return kEmpty;
}

FleetRanges read_ranges(const Section& s, const FleetRanges& base) {
  FleetRanges r;
  r.compute = s.range("compute", base.compute);
  r.memory = s.range("memory", base.memory);
  r.bandwidth = s.range("bandwidth", base.bandwidth);
  r.alpha = s.range("alpha", base.alpha);
  r.mu = s.range("mu", base.mu);
  r.background_load = s.number("background_load", base.background_load);
  return r;
}

void read_fleet(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("fleet")) throw ConfigError("fleet: section is required");
  Section s(root.at("fleet"), "fleet", cfg.applied_defaults);
  s.allow({"num_devices", "compute", "memory", "bandwidth", "alpha", "mu", "background_load",
           "clusters"});
  const FleetRanges base = read_ranges(s, FleetRanges{});
  validate_ranges(base, "fleet");

  std::vector<FleetCluster> clusters;
  if (s.has("clusters")) {
    const json& list = s.at("clusters");
    if (!list.is_array() || list.empty()) {
      throw ConfigError("fleet.clusters: expected a non-empty array");
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "fleet.clusters[" + std::to_string(i) + "]";
      Section c(list[i], path, cfg.applied_defaults);
      c.allow({"count", "compute", "memory", "bandwidth", "alpha", "mu", "background_load"});
      if (!c.has("count")) throw ConfigError(path + ".count: required");
      FleetCluster fc;
      fc.count = Section::as_integer(c.at("count"), path + ".count", 1u << 20);
      if (fc.count == 0) throw ConfigError(path + ".count: must be >= 1");
      fc.ranges = read_ranges(c, base);
      validate_ranges(fc.ranges, path);
      total += fc.count;
      clusters.push_back(fc);
    }
    if (s.has("num_devices") &&
        Section::as_integer(s.at("num_devices"), "fleet.num_devices", 1u << 20) != total) {
      throw ConfigError("fleet.num_devices: does not match the sum of fleet.clusters[].count");
    }
  } else {
    if (!s.has("num_devices")) throw ConfigError("fleet.num_devices: required");
    const auto k = Section::as_integer(s.at("num_devices"), "fleet.num_devices", 1u << 20);
    if (k == 0) throw ConfigError("fleet.num_devices: must be >= 1");
    clusters.push_back({static_cast<std::size_t>(k), base});
  }
  cfg.simulation.fleet = std::move(clusters);
}

void read_jobs(const json& root, ExperimentConfig& cfg) {
  if (!root.contains("jobs")) throw ConfigError("jobs: section is required");
  const json& list = root.at("jobs");
  if (!list.is_array() || list.empty()) throw ConfigError("jobs: expected a non-empty array");

  double max_capacity[ResourceVector::kDimensions] = {0.0, 0.0, 0.0};
  for (const FleetCluster& c : cfg.simulation.fleet) {
    max_capacity[0] = std::max(max_capacity[0], c.ranges.compute.max);
    max_capacity[1] = std::max(max_capacity[1], c.ranges.memory.max);
    max_capacity[2] = std::max(max_capacity[2], c.ranges.bandwidth.max);
  }

  for (std::size_t m = 0; m < list.size(); ++m) {
    const std::string path = "jobs[" + std::to_string(m) + "]";
    Section s(list[m], path, cfg.applied_defaults);
    s.allow({"name", "demand", "fraction_Cm", "max_rounds_Rm", "target_loss_lm",
             "target_accuracy", "local_epochs_tau", "batch_size"});
    JobSpec job;
    job.id = static_cast<JobId>(m);
    job.name = s.text("name", "job" + std::to_string(m));

    Section d(s.has("demand") ? s.at("demand") : empty_object(), path + ".demand",
              cfg.applied_defaults);
    d.allow({"compute", "memory", "bandwidth"});
    job.demand = {d.number("compute", 0.0), d.number("memory", 0.0),
                  d.number("bandwidth", 0.0)};
    for (std::size_t j = 0; j < ResourceVector::kDimensions; ++j) {
      if (job.demand[j] > max_capacity[j]) {
        throw ConfigError(path + ".demand." + resource_name(j) +
                          ": exceeds the largest capacity in the fleet");
      }
    }

    job.fraction = s.number("fraction_Cm", 0.1);
    job.max_rounds = static_cast<std::uint32_t>(s.integer("max_rounds_Rm", 50));
    job.target_loss = s.number("target_loss_lm", 0.0);
    job.target_accuracy = s.number("target_accuracy", 0.8);
    job.local_epochs = static_cast<std::uint32_t>(s.integer("local_epochs_tau", 5));
    job.batch_size = static_cast<std::uint32_t>(s.integer("batch_size", 10));
    cfg.simulation.jobs.push_back(std::move(job));
  }
}

void read_scheduler(const json& root, ExperimentConfig& cfg) {
  Section s(root.contains("scheduler") ? root.at("scheduler") : empty_object(), "scheduler",
            cfg.applied_defaults);
  s.allow({"name", "alpha", "beta", "lambda", "fairness", "resource_weights", "genetic"});
  SchedulerSettings& out = cfg.scheduler;
  cfg.schedulers = parse_scheduler_list(s.text("name", "fedact"));
  out.kind = cfg.schedulers.front();
  out.fedact.weights.alpha = s.number("alpha", 0.7);
  out.fedact.weights.beta = s.number("beta", 0.3);
  out.fedact.weights.validate();
  out.greedy_lambda = s.number("lambda", 0.3);
  if (out.greedy_lambda < 0.0) throw ConfigError("scheduler.lambda: must be >= 0");

  const std::string fairness = s.text("fairness", "over_participation");
  if (fairness == "over_participation") {
    out.fedact.fairness = FairnessForm::kOverParticipation;
  } else if (fairness == "symmetric") {
    out.fedact.fairness = FairnessForm::kSymmetric;
  } else {
    throw ConfigError("scheduler.fairness: expected `over_participation` or `symmetric`");
  }

  if (s.has("resource_weights")) {
    const json& w = s.at("resource_weights");
    if (!w.is_array() || w.size() != ResourceVector::kDimensions) {
      throw ConfigError("scheduler.resource_weights: expected three numbers");
    }
    for (std::size_t j = 0; j < ResourceVector::kDimensions; ++j) {
      if (!w[j].is_number()) throw ConfigError("scheduler.resource_weights: expected numbers");
      out.fedact.resource_weights.w[j] = w[j].get<double>();
    }
  } else {
    s.note("resource_weights", "[1/3, 1/3, 1/3]");
  }
  out.fedact.resource_weights.validate();

  Section g(s.has("genetic") ? s.at("genetic") : empty_object(), "scheduler.genetic",
            cfg.applied_defaults);
  g.allow({"population_size", "generations", "mutation_rate", "crossover_rate",
           "tournament_size", "seed"});
  out.genetic.population_size = static_cast<std::uint32_t>(g.integer("population_size", 20));
  out.genetic.generations = static_cast<std::uint32_t>(g.integer("generations", 30));
  out.genetic.mutation_rate = g.number("mutation_rate", 0.1);
  out.genetic.crossover_rate = g.number("crossover_rate", 0.8);
  out.genetic.tournament_size = static_cast<std::uint32_t>(g.integer("tournament_size", 3));
  out.genetic.seed = g.integer("seed", 0, std::numeric_limits<std::uint64_t>::max());
  out.genetic.validate();
}

void read_workload(const json& root, ExperimentConfig& cfg) {
  Section s(root.contains("workload") ? root.at("workload") : empty_object(), "workload",
            cfg.applied_defaults);
  s.allow({"mode", "num_samples", "dim", "classes", "cluster_spread", "class_separation",
           "learning_rate", "partition", "holdout", "surrogate_decay", "surrogate_floor"});
  WorkloadParams& w = cfg.simulation.workload;
  const std::string mode = s.text("mode", "real");
  if (mode == "real") {
    w.mode = WorkloadMode::kReal;
  } else if (mode == "surrogate") {
    w.mode = WorkloadMode::kSurrogate;
  } else {
    throw ConfigError("workload.mode: expected `real` or `surrogate`");
  }
  w.data.num_samples = s.integer("num_samples", 5000, 1u << 26);
  w.data.dim = s.integer("dim", 16, 1u << 16);
  w.data.classes = s.integer("classes", 10, 1u << 16);
  w.data.cluster_spread = s.number("cluster_spread", 1.0);
  w.data.class_separation = s.number("class_separation", 1.0);
  w.learning_rate = s.number("learning_rate", 0.05);
  const std::string part = s.text("partition", "iid");
  if (part == "iid") {
    w.partition = PartitionMode::kIid;
  } else if (part == "non_iid") {
    w.partition = PartitionMode::kNonIid;
  } else {
    throw ConfigError("workload.partition: expected `iid` or `non_iid`");
  }
  w.holdout = s.number("holdout", 0.2);
  w.surrogate_decay = s.number("surrogate_decay", 0.3);
  w.surrogate_floor = s.number("surrogate_floor", 0.1);
  w.validate();
}

void read_run(const json& root, ExperimentConfig& cfg) {
  Section s(root.contains("run") ? root.at("run") : empty_object(), "run", cfg.applied_defaults);
  s.allow({"seeds", "output", "threads"});
  if (s.has("seeds")) {
    const json& v = s.at("seeds");
    if (!v.is_array() || v.empty()) throw ConfigError("run.seeds: expected a non-empty array");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      cfg.seeds.push_back(Section::as_integer(v[i], "run.seeds[" + std::to_string(i) + "]",
                                              std::numeric_limits<std::uint64_t>::max()));
    }
  } else {
    s.note("seeds", "[1]");
  }
  cfg.output_dir = s.text("output", "results");
  cfg.threads = static_cast<unsigned>(s.integer("threads", 0, 1024));
}

}  // namespace

std::vector<SchedulerKind> parse_scheduler_list(std::string_view name) {
  if (name == "all") return all_schedulers();
  return {parse_scheduler(name)};
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw ConfigError("--seeds: `" + std::string(item) + "` is not a non-negative integer");
    }
    seeds.push_back(value);
    pos = comma + 1;
  }
  return seeds;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  ExperimentConfig cfg;
  Section top(root, "", cfg.applied_defaults);
  top.allow({"fleet", "jobs", "scheduler", "workload", "run"});
  read_fleet(root, cfg);
  read_jobs(root, cfg);
  read_scheduler(root, cfg);
  read_workload(root, cfg);
  read_run(root, cfg);
  cfg.simulation.validate();

  for (const std::string& d : cfg.applied_defaults) spdlog::info("default applied: {}", d);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open `" + path.string() + "`");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace fedact
