// sonarfusion: sonar mapping with region Bayes networks and grid baselines.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sonarfusion/error.hpp"
#include "sonarfusion/pipeline.hpp"
#include "sonarfusion/scenario.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace sonarfusion;

  CLI::App app{"Sonar occupancy mapping: region Bayes network, Elfes and Dempster-Shafer grids"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and build an occupancy map");
  std::string scenario_path, model_arg, out_dir, inference_arg = "auto", stats_path;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<double> thresholds;
  bool dump_regions = false, dump_network = false;
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--model", model_arg, "bayes | elfes | ds")->required();
  run->add_option("--out", out_dir, "Output directory for PGM images and dumps")->required();
  run->add_option("--inference", inference_arg, "exact | sampling | auto");
  run->add_option("--samples", samples, "Likelihood-weighting sample count");
  run->add_option("--seed", seed, "Sampling seed");
  run->add_option("--threads", threads, "Sampling worker threads");
  run->add_option("--threshold", thresholds, "Threshold map level (repeatable)")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--stats", stats_path, "Write key=value run statistics here");
  run->add_flag("--dump-regions", dump_regions, "Write regions.txt");
  run->add_flag("--dump-network", dump_network, "Write network.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto model = parse_model(model_arg);
  if (!model) {
    std::cerr << "error: unknown model \"" << model_arg << "\" (expected bayes, elfes or ds)\n";
    return kExitUsage;
  }
  PipelineOptions options;
  if (inference_arg == "exact") {
    options.inference.strategy = Strategy::Exact;
  } else if (inference_arg == "sampling") {
    options.inference.strategy = Strategy::Sampling;
  } else if (inference_arg == "auto") {
    options.inference.strategy = Strategy::Auto;
  } else {
    std::cerr << "error: unknown inference strategy \"" << inference_arg << "\"\n";
    return kExitUsage;
  }
  if (samples < 1) {
    std::cerr << "error: --samples must be at least 1\n";
    return kExitUsage;
  }
  options.inference.samples = samples;
  options.inference.seed = seed;
  options.inference.threads = threads;
  if (!thresholds.empty()) {
    options.thresholds = thresholds;
  }
  options.dump_regions = dump_regions;
  options.dump_network = dump_network;

  try {
    const ScenarioWorld world = load_scenario_file(scenario_path);
    const PipelineResult result = run_pipeline(world, *model, options);
    write_outputs(result, *model, out_dir);
    const std::string stats = result.stats.to_key_values();
    if (!stats_path.empty()) {
      std::ofstream out(stats_path);
      if (!(out << stats)) {
        throw Error("cannot write " + stats_path);
      }
    }
    std::cout << stats;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
