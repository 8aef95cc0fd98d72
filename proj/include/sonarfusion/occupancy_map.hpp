#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sonarfusion/inference.hpp"
#include "sonarfusion/partition.hpp"
#include "sonarfusion/world.hpp"

namespace sonarfusion {

/// Per-cell occupancy probability, row-major with row 0 at the lowest y.
struct OccupancyMap {
  int width = 0;
  int height = 0;
  std::vector<double> cells;

  OccupancyMap() = default;
  OccupancyMap(int w, int h, double fill) : width(w), height(h), cells(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int cell) { return cells[static_cast<std::size_t>(cell)]; }
  double at(int cell) const { return cells[static_cast<std::size_t>(cell)]; }
};

/// Display value p_min * posterior / prior for every cell of a region, capped
/// at 1. Traversed cells get 0, untouched cells p_min. Throws ModelError when
/// a region has zero prior or no posterior.
OccupancyMap grid_posterior(const RegionPartition& partition, const Posterior& posterior,
                            double p_min);

/// 1 where p >= t, else 0.
OccupancyMap threshold_map(const OccupancyMap& map, double t);

/// Copy of `map` with every detection-arc cell of `readings` set to 1.
OccupancyMap overlay_arcs(const OccupancyMap& map, const Grid& grid,
                          std::span<const SonarReading> readings, const SensorParams& sensor);

/// Binary PGM, maxval 255, pixel = floor(255 * (1 - p) + 0.5), top row = highest y.
std::string render_pgm(const OccupancyMap& map);

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // file order (top row first)
};

/// Reads an 8-bit binary PGM. Throws Error on malformed input.
PgmImage parse_pgm(std::string_view bytes);

}  // namespace sonarfusion
