#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sonarfusion/prior.hpp"
#include "sonarfusion/world.hpp"

namespace sonarfusion {

/// Where a point falls relative to one reading.
enum class Symbol : std::uint8_t {
  Exterior = 0,  // outside the cone, or beyond the arc
  Sector = 1,    // inside the cone, closer than r - epsilon
  Arc = 2,       // inside the cone, within epsilon of r
};

char symbol_char(Symbol s);

/// One symbol per reading, indexed by the reading's slot in the partition.
using CellLabel = std::vector<Symbol>;

Symbol label_point(Vec2 point, const SonarReading& reading, const SensorParams& sensor);

inline Symbol label_cell(const Grid& grid, int cell, const SonarReading& reading,
                         const SensorParams& sensor) {
  return label_point(grid.center(cell), reading, sensor);
}

struct Region {
  int id = 0;
  CellLabel label;
  std::vector<int> cells;  // ascending cell indices
  double area = 0.0;
  double prior_occupied = 0.0;
};

/// Grid cells grouped into classes of identical label vectors. Cells outside
/// every cone and cells covered by the robot body belong to no region.
class RegionPartition {
 public:
  static constexpr int kNoRegion = -1;

  RegionPartition() = default;

  const Grid& grid() const { return grid_; }
  const SensorParams& sensor() const { return sensor_; }
  const PriorParams& prior() const { return prior_; }
  std::span<const SonarReading> readings() const { return readings_; }
  std::span<const Region> regions() const { return regions_; }
  std::span<const char> traversed() const { return traversed_; }

  /// Region index (into regions()) for a cell, or kNoRegion.
  int region_index_of_cell(int cell) const { return cell_region_[static_cast<std::size_t>(cell)]; }
  const Region& region_by_id(int id) const;
  /// Slot of the reading with the given id; throws if absent.
  std::size_t reading_slot(int reading_id) const;

  /// Indices of regions labeled A or S for the reading in `slot`.
  std::vector<std::size_t> regions_for_reading(std::size_t slot) const;

  /// "A0.S1.E2"-style label using reading ids.
  std::string label_string(const Region& region) const;

  /// Regions pairwise disjoint, union plus traversed equals covered cells,
  /// labels consistent with geometry. Throws ModelError on violation.
  void check_invariants() const;

  /// One region per line: id, label, cell count, area, prior.
  std::string dump() const;

 private:
  friend RegionPartition build_partition(const Grid&, std::span<const SonarReading>,
                                         const SensorParams&, const PriorParams&,
                                         std::span<const char>);
  friend RegionPartition add_reading(const RegionPartition&, const SonarReading&);

  void rebuild_index();

  Grid grid_;
  SensorParams sensor_;
  PriorParams prior_;
  std::vector<SonarReading> readings_;
  std::vector<Region> regions_;  // ascending id
  std::vector<int> cell_region_;
  std::vector<char> traversed_;
  int next_region_id_ = 0;
};

/// Labels every non-traversed cell against every reading and groups cells by
/// label vector, dropping the all-exterior class. Region ids follow the
/// row-major order of each class's first cell. `traversed` may be empty.
RegionPartition build_partition(const Grid& grid, std::span<const SonarReading> readings,
                                const SensorParams& sensor, const PriorParams& prior,
                                std::span<const char> traversed);

/// Extends the partition with one reading. Regions the new cone does not touch
/// keep their ids; touched regions are regrouped under fresh ids. Throws
/// ModelError on a duplicate reading id.
RegionPartition add_reading(const RegionPartition& partition, const SonarReading& reading);

}  // namespace sonarfusion
