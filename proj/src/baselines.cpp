#include "sonarfusion/baselines.hpp"

#include <cmath>
#include <string>

#include "sonarfusion/error.hpp"
#include "sonarfusion/partition.hpp"

namespace sonarfusion {

double elfes_update(double p_old, double p_obs_given_occ, double p_obs_given_free) {
  const double occ = p_obs_given_occ * p_old;
  const double free = p_obs_given_free * (1.0 - p_old);
  if (!(occ + free > 0.0)) {
    throw Error("elfes_update: contradictory deterministic evidence");
  }
  if (occ == 0.0) {
    return 0.0;
  }
  // Same value as occ / (occ + free), but 0.27 / 0.48 comes out as exactly 0.5625.
  return 1.0 / (1.0 + free / occ);
}

OccupancyMap elfes_map(const Grid& grid, std::span<const SonarReading> readings,
                       const SensorParams& sensor, const ElfesParams& params,
                       std::span<const char> traversed) {
  OccupancyMap map(grid.width, grid.height, params.initial);
  for (const SonarReading& r : readings) {
    for (int cell = 0; cell < grid.cell_count(); ++cell) {
      switch (label_cell(grid, cell, r, sensor)) {
        case Symbol::Arc:
          map.at(cell) = elfes_update(map.at(cell), params.arc_given_occupied, params.arc_given_free);
          break;
        case Symbol::Sector:
          map.at(cell) =
              elfes_update(map.at(cell), params.sector_given_occupied, params.sector_given_free);
          break;
        case Symbol::Exterior:
          break;
      }
    }
  }
  for (std::size_t c = 0; c < traversed.size(); ++c) {
    if (traversed[c]) {
      map.cells[c] = 0.0;
    }
  }
  return map;
}

bool DSCell::valid() const {
  constexpr double tol = 1e-12;
  return h_o >= 0.0 && h_f >= 0.0 && h_o + h_f <= 1.0 + tol;
}

DSCell ds_update(const DSCell& cell, const DSCell& obs) {
  if (!cell.valid() || !obs.valid()) {
    throw Error("ds_update: masses must be nonnegative and sum to at most 1");
  }
  const double delta = 1.0 - (cell.h_o * obs.h_f + cell.h_f * obs.h_o);
  if (!(delta > 0.0)) {
    throw Error("ds_update: total conflict");
  }
  const double hu_old = cell.h_u();
  const double hu_obs = obs.h_u();
  DSCell out;
  out.h_f = (cell.h_f * obs.h_f + cell.h_f * hu_obs + hu_old * obs.h_f) / delta;
  out.h_o = (cell.h_o * obs.h_o + cell.h_o * hu_obs + hu_old * obs.h_o) / delta;
  return out;
}

DsObservationModel DsObservationModel::mirroring(const ElfesParams& elfes) {
  DsObservationModel m;
  m.arc = {1.0 - elfes.arc_given_free / elfes.arc_given_occupied, 0.0};
  m.sector = {0.0, 1.0 - elfes.sector_given_occupied / elfes.sector_given_free};
  return m;
}

DsResult ds_map(const Grid& grid, std::span<const SonarReading> readings,
                const SensorParams& sensor, const DsObservationModel& model,
                std::span<const char> traversed) {
  DsResult result;
  result.cells.assign(static_cast<std::size_t>(grid.cell_count()), DSCell{});
  for (const SonarReading& r : readings) {
    for (int cell = 0; cell < grid.cell_count(); ++cell) {
      const Symbol s = label_cell(grid, cell, r, sensor);
      if (s == Symbol::Exterior) {
        continue;
      }
      DSCell& c = result.cells[static_cast<std::size_t>(cell)];
      try {
        c = ds_update(c, s == Symbol::Arc ? model.arc : model.sector);
      } catch (const Error&) {
        throw Error("ds_map: total conflict at cell (" + std::to_string(grid.column(cell)) + ", " +
                    std::to_string(grid.row(cell)) + ") from reading " + std::to_string(r.id));
      }
    }
  }
  result.map = OccupancyMap(grid.width, grid.height, 0.0);
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const DSCell& h = result.cells[c];
    result.map.cells[c] = model.exported == DsExport::Occupied ? h.h_o : h.h_o + h.h_u() / 2.0;
  }
  for (std::size_t c = 0; c < traversed.size(); ++c) {
    if (traversed[c]) {
      result.cells[c] = {0.0, 1.0};
      result.map.cells[c] = 0.0;
    }
  }
  return result;
}

}  // namespace sonarfusion
