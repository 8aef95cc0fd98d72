#include "sonarfusion/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "sonarfusion/error.hpp"
#include "sonarfusion/network.hpp"
#include "sonarfusion/partition.hpp"

namespace sonarfusion {

std::optional<Model> parse_model(std::string_view name) {
  if (name == "bayes") {
    return Model::Bayes;
  }
  if (name == "elfes") {
    return Model::Elfes;
  }
  if (name == "ds") {
    return Model::DempsterShafer;
  }
  return std::nullopt;
}

const char* model_name(Model m) {
  switch (m) {
    case Model::Bayes:
      return "bayes";
    case Model::Elfes:
      return "elfes";
    case Model::DempsterShafer:
      return "ds";
  }
  return "?";
}

std::string RunStats::to_key_values() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "readings=%zu\nregions_total=%zu\nregions_nonempty=%zu\nsupport_arcs=%zu\n"
                "method=%s\nevidence_prob=%.17g\nwall_ms=%.3f\n",
                readings, regions_total, regions_nonempty, support_arcs, method.c_str(),
                evidence_prob, wall_ms);
  return buf;
}

namespace {

std::string threshold_name(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "threshold_%.2f", t);
  return buf;
}

}  // namespace

PipelineResult run_pipeline(const ScenarioWorld& world, Model model, const PipelineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PipelineResult result;
  result.readings = run_firings(world);
  result.stats.readings = result.readings.size();
  const std::vector<char> traversed = traversed_cells(world.grid, world.path, world.robot_radius);

  switch (model) {
    case Model::Bayes: {
      if (result.readings.empty()) {
        throw ModelError("bayes pipeline needs at least one firing");
      }
      const RegionPartition partition =
          build_partition(world.grid, result.readings, world.sensor, world.prior, traversed);
      partition.check_invariants();
      const BayesNetwork net = build_network(partition);
      net.check_invariants();
      const Posterior post = infer(net, Evidence::all_observed(net), options.inference);

      result.stats.regions_nonempty = partition.regions().size();
      result.stats.regions_total =
          build_partition(world.grid, result.readings, world.sensor, world.prior, {})
              .regions()
              .size();
      result.stats.support_arcs = net.support_arcs();
      result.stats.method = method_name(post.method);
      result.stats.evidence_prob = post.evidence_probability;
      result.trace = post.trace();

      OccupancyMap display = grid_posterior(partition, post, world.prior.p_min);
      for (double t : options.thresholds) {
        result.maps.push_back({threshold_name(t), threshold_map(display, t)});
      }
      result.maps.insert(result.maps.begin(),
                         {"overlay", overlay_arcs(display, world.grid, result.readings, world.sensor)});
      result.maps.insert(result.maps.begin(), {"posterior", std::move(display)});
      if (options.dump_regions) {
        result.region_dump = partition.dump();
      }
      if (options.dump_network) {
        result.network_dump = net.dump();
      }
      break;
    }
    case Model::Elfes: {
      ElfesParams params;
      params.initial = world.prior.p_min;
      OccupancyMap map = elfes_map(world.grid, result.readings, world.sensor, params, traversed);
      result.maps.push_back({"overlay", overlay_arcs(map, world.grid, result.readings, world.sensor)});
      result.maps.insert(result.maps.begin(), {"map", std::move(map)});
      result.stats.method = "elfes";
      break;
    }
    case Model::DempsterShafer: {
      ElfesParams params;
      DsResult ds = ds_map(world.grid, result.readings, world.sensor,
                           DsObservationModel::mirroring(params), traversed);
      result.maps.push_back({"overlay", overlay_arcs(ds.map, world.grid, result.readings, world.sensor)});
      result.maps.insert(result.maps.begin(), {"map", std::move(ds.map)});
      result.stats.method = "ds";
      break;
    }
  }
  result.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_outputs(const PipelineResult& result, Model model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& bytes) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
      throw Error("cannot write " + (dir / name).string());
    }
  };
  for (const NamedMap& m : result.maps) {
    write(std::string(model_name(model)) + "_" + m.name + ".pgm", render_pgm(m.map));
  }
  if (!result.region_dump.empty()) {
    write("regions.txt", result.region_dump);
  }
  if (!result.network_dump.empty()) {
    write("network.txt", result.network_dump);
  }
  if (!result.trace.empty()) {
    write("trace.txt", result.trace);
  }
}

}  // namespace sonarfusion
