#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sonarfusion/baselines.hpp"
#include "sonarfusion/inference.hpp"
#include "sonarfusion/occupancy_map.hpp"
#include "sonarfusion/world.hpp"

namespace sonarfusion {

enum class Model { Bayes, Elfes, DempsterShafer };

/// "bayes", "elfes" or "ds"; nullopt otherwise.
std::optional<Model> parse_model(std::string_view name);
const char* model_name(Model m);

struct PipelineOptions {
  InferenceOptions inference;
  std::vector<double> thresholds = {0.25, 0.35};
  bool dump_regions = false;
  bool dump_network = false;
};

struct RunStats {
  std::size_t readings = 0;
  std::size_t regions_total = 0;     // label classes counting robot-body cells
  std::size_t regions_nonempty = 0;  // regions that enter the network
  std::size_t support_arcs = 0;
  std::string method;
  double evidence_prob = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;

  std::string to_key_values() const;
};

struct NamedMap {
  std::string name;
  OccupancyMap map;
};

struct PipelineResult {
  std::vector<NamedMap> maps;
  RunStats stats;
  std::vector<SonarReading> readings;
  std::string trace;         // inference key=value lines (bayes only)
  std::string region_dump;   // filled when requested
  std::string network_dump;  // filled when requested
};

PipelineResult run_pipeline(const ScenarioWorld& world, Model model, const PipelineOptions& options);

/// Writes <model>_<name>.pgm for every map, plus regions.txt / network.txt /
/// trace.txt when present. Creates `dir` if needed.
void write_outputs(const PipelineResult& result, Model model, const std::filesystem::path& dir);

}  // namespace sonarfusion
