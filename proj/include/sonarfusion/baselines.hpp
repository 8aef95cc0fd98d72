#pragma once

#include <span>
#include <vector>

#include "sonarfusion/occupancy_map.hpp"
#include "sonarfusion/world.hpp"

namespace sonarfusion {

// Independent per-cell update schemes used for comparison.

struct ElfesParams {
  double arc_given_occupied = 0.9;
  double arc_given_free = 0.3;
  double sector_given_occupied = 0.1;
  double sector_given_free = 0.9;
  double initial = 0.3;
};

/// p(r|O) P_old / (p(r|O) P_old + p(r|~O) (1 - P_old)). Throws Error when the
/// denominator vanishes.
double elfes_update(double p_old, double p_obs_given_occ, double p_obs_given_free);

/// Starts every cell at params.initial and applies each reading to the cells
/// in its arc or sector. Traversed cells end at 0; `traversed` may be empty.
OccupancyMap elfes_map(const Grid& grid, std::span<const SonarReading> readings,
                       const SensorParams& sensor, const ElfesParams& params,
                       std::span<const char> traversed);

/// Dempster-Shafer cell: belief occupied, belief free; the rest is unknown.
struct DSCell {
  double h_o = 0.0;
  double h_f = 0.0;

  double h_u() const { return 1.0 - h_o - h_f; }
  bool valid() const;
};

/// Dempster's rule on the {occupied, free} frame. Throws Error("total
/// conflict") when the normalizer is zero.
DSCell ds_update(const DSCell& cell, const DSCell& obs);

enum class DsExport { Occupied, Pignistic };

struct DsObservationModel {
  DSCell arc;
  DSCell sector;
  DsExport exported = DsExport::Occupied;

  /// Consonant masses with the same likelihood ratios as the Elfes model:
  /// arc h_o = 1 - p(r|~O)/p(r|O), sector h_f = 1 - p(r|O)/p(r|~O).
  static DsObservationModel mirroring(const ElfesParams& elfes);
};

struct DsResult {
  std::vector<DSCell> cells;
  OccupancyMap map;  // h_o, or h_o + h_u / 2 for the pignistic export
};

DsResult ds_map(const Grid& grid, std::span<const SonarReading> readings,
                const SensorParams& sensor, const DsObservationModel& model,
                std::span<const char> traversed);

}  // namespace sonarfusion
