#include "sonarfusion/occupancy_map.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sonarfusion/error.hpp"

namespace sonarfusion {

OccupancyMap grid_posterior(const RegionPartition& partition, const Posterior& posterior,
                            double p_min) {
  const Grid& grid = partition.grid();
  OccupancyMap map(grid.width, grid.height, p_min);
  const auto traversed = partition.traversed();
  for (const Region& region : partition.regions()) {
    if (!(region.prior_occupied > 0.0)) {
      throw ModelError("grid_posterior: region " + std::to_string(region.id) + " has zero prior");
    }
    auto it = posterior.occupied.find(region.id);
    if (it == posterior.occupied.end()) {
      throw ModelError("grid_posterior: no posterior for region " + std::to_string(region.id));
    }
    // Display-only scaling; large posterior/prior ratios would exceed 1.
    const double value = std::min(1.0, p_min * it->second / region.prior_occupied);
    for (int cell : region.cells) {
      map.at(cell) = value;
    }
  }
  for (std::size_t c = 0; c < traversed.size(); ++c) {
    if (traversed[c]) {
      map.cells[c] = 0.0;
    }
  }
  return map;
}

OccupancyMap threshold_map(const OccupancyMap& map, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error("threshold must be in [0, 1]");
  }
  OccupancyMap out = map;
  for (double& p : out.cells) {
    p = p >= t ? 1.0 : 0.0;
  }
  return out;
}

OccupancyMap overlay_arcs(const OccupancyMap& map, const Grid& grid,
                          std::span<const SonarReading> readings, const SensorParams& sensor) {
  OccupancyMap out = map;
  for (int cell = 0; cell < grid.cell_count(); ++cell) {
    for (const SonarReading& r : readings) {
      if (label_cell(grid, cell, r, sensor) == Symbol::Arc) {
        out.at(cell) = 1.0;
        break;
      }
    }
  }
  return out;
}

std::string render_pgm(const OccupancyMap& map) {
  std::string out = "P5\n" + std::to_string(map.width) + ' ' + std::to_string(map.height) + "\n255\n";
  out.reserve(out.size() + map.cells.size());
  for (int row = map.height - 1; row >= 0; --row) {
    for (int col = 0; col < map.width; ++col) {
      const double p = std::clamp(map.cells[static_cast<std::size_t>(row) * map.width + col], 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::floor(255.0 * (1.0 - p) + 0.5))));
    }
  }
  return out;
}

PgmImage parse_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') {
          ++pos;
        }
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    const std::size_t begin = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (begin == pos) {
      throw Error("pgm: expected an integer");
    }
    return std::stoi(std::string(bytes.substr(begin, pos - begin)));
  };
  if (bytes.substr(0, 2) != "P5") {
    throw Error("pgm: missing P5 magic");
  }
  pos = 2;
  PgmImage img;
  img.width = read_int();
  img.height = read_int();
  if (read_int() != 255) {
    throw Error("pgm: only maxval 255 is supported");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - pos != n) {
    throw Error("pgm: raster size mismatch");
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

}  // namespace sonarfusion
