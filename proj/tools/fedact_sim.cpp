// Command-line driver: runs a scenario file under one or more schedulers and
// writes rounds.csv, summary.csv and report.txt.

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>

#include "fedact/config.hpp"
#include "fedact/experiment.hpp"
#include "fedact/kernels.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-job federated learning scheduling simulator"};
  std::string config_path;
  std::string scheduler;
  std::string seeds;
  std::string out_dir;
  std::string workload;
  std::string simd;
  unsigned threads = 0;
  bool quiet = false;
  bool verbose = false;

  app.add_option("-c,--config", config_path, "Scenario file (JSON)")->required();
  app.add_option("-s,--scheduler", scheduler,
                 "fedact, random, greedy, genetic, sequential or all");
  app.add_option("--seeds", seeds, "Comma-separated seeds, e.g. 1,2,3");
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("--workload", workload, "real or surrogate")
      ->check(CLI::IsMember({"real", "surrogate"}));
  app.add_option("--threads", threads, "Worker threads (0: all cores)");
  app.add_option("--simd", simd, "Kernel backend: scalar, avx2, neon or auto")
      ->check(CLI::IsMember({"scalar", "avx2", "neon", "auto"}));
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(quiet ? spdlog::level::warn
                          : verbose ? spdlog::level::debug : spdlog::level::info);

  fedact::ExperimentConfig config;
  try {
    config = fedact::parse_config(config_path);
    if (!scheduler.empty()) {
      config.schedulers = fedact::parse_scheduler_list(scheduler);
      config.scheduler.kind = config.schedulers.front();
    }
    if (!seeds.empty()) config.seeds = fedact::parse_seed_list(seeds);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!workload.empty()) {
      config.simulation.workload.mode =
          workload == "real" ? fedact::WorkloadMode::kReal : fedact::WorkloadMode::kSurrogate;
    }
    if (app.count("--threads") != 0) config.threads = threads;
    if (!simd.empty() && simd != "auto") {
      const auto backend = fedact::kernels::parse_backend(simd);
      if (!fedact::kernels::backend_available(backend)) {
        throw fedact::ConfigError("--simd: `" + simd + "` is not available on this CPU");
      }
      fedact::kernels::use_backend(backend);
    }
  } catch (const fedact::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  spdlog::info("kernels: {}", fedact::kernels::active().name);

  const auto replications = fedact::run_experiment(config);

  try {
    fedact::write_results(config.output_dir, config, replications);
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }

  for (const auto& s : fedact::summarize(replications)) {
    std::cout << fedact::scheduler_name(s.scheduler) << ": average JCT "
              << fedact::format_number(s.mean_average_jct) << " s (sd "
              << fedact::format_number(s.stddev_average_jct) << ", " << s.runs - s.failures
              << "/" << s.runs << " runs ok)\n";
  }
  std::cout << "results written to " << config.output_dir << "\n";

  for (const auto& r : replications) {
    if (!r.ok()) return kExitRunFailed;
  }
  return kExitOk;
}
