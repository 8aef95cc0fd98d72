#include "sonarfusion/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "sonarfusion/error.hpp"

namespace sonarfusion {

void PriorParams::validate() const {
  if (!(p_min > 0.0 && p_min < p_max && p_max < 1.0)) {
    throw ModelError("prior: require 0 < p_min < p_max < 1");
  }
  if (!(k > 0.0)) {
    throw ModelError("prior: k must be positive");
  }
  if (!(c > 0.0)) {
    throw ModelError("prior: c must be positive");
  }
}

double prior_occupancy(double area, const PriorParams& prior) {
  if (!(area > 0.0)) {
    throw ModelError("prior_occupancy: area must be positive");
  }
  // Printed as max(); min() is the only reading that caps at p_max.
  return std::min(prior.p_min + prior.k * area, prior.p_max);
}

double exponential_prior(double area, double c) {
  if (!(area >= 0.0) || !(c > 0.0)) {
    throw ModelError("exponential_prior: require area >= 0 and c > 0");
  }
  return -std::expm1(-c * area);
}

char symbol_char(Symbol s) {
  switch (s) {
    case Symbol::Arc:
      return 'A';
    case Symbol::Sector:
      return 'S';
    case Symbol::Exterior:
      break;
  }
  return 'E';
}

Symbol label_point(Vec2 point, const SonarReading& reading, const SensorParams& sensor) {
  const Vec2 rel = point - reading.pose.position;
  const double d = rel.norm();
  if (d > 0.0) {
    const double off_axis = wrap_degrees(rad_to_deg(std::atan2(rel.y, rel.x)) - reading.bearing_deg);
    if (std::abs(off_axis) > sensor.beam_half_width_deg) {
      return Symbol::Exterior;
    }
  }
  if (d < reading.range - sensor.epsilon) {
    return Symbol::Sector;
  }
  // Max-range readings carry no detection arc.
  if (!reading.is_max_range && d <= reading.range + sensor.epsilon) {
    return Symbol::Arc;
  }
  return Symbol::Exterior;
}

namespace {

bool all_exterior(const CellLabel& label) {
  return std::all_of(label.begin(), label.end(), [](Symbol s) { return s == Symbol::Exterior; });
}

void finish_region(Region& region, const Grid& grid, const PriorParams& prior) {
  region.area = static_cast<double>(region.cells.size()) * grid.cell_size * grid.cell_size;
  region.prior_occupied = prior_occupancy(region.area, prior);
}

}  // namespace

const Region& RegionPartition::region_by_id(int id) const {
  auto it = std::lower_bound(regions_.begin(), regions_.end(), id,
                             [](const Region& r, int v) { return r.id < v; });
  if (it == regions_.end() || it->id != id) {
    throw ModelError("partition: unknown region id " + std::to_string(id));
  }
  return *it;
}

std::size_t RegionPartition::reading_slot(int reading_id) const {
  for (std::size_t i = 0; i < readings_.size(); ++i) {
    if (readings_[i].id == reading_id) {
      return i;
    }
  }
  throw ModelError("partition: unknown reading id " + std::to_string(reading_id));
}

std::vector<std::size_t> RegionPartition::regions_for_reading(std::size_t slot) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    if (regions_[r].label[slot] != Symbol::Exterior) {
      out.push_back(r);
    }
  }
  return out;
}

std::string RegionPartition::label_string(const Region& region) const {
  std::string s;
  for (std::size_t i = 0; i < region.label.size(); ++i) {
    if (i > 0) {
      s += '.';
    }
    s += symbol_char(region.label[i]);
    s += std::to_string(readings_[i].id);
  }
  return s;
}

void RegionPartition::rebuild_index() {
  std::sort(regions_.begin(), regions_.end(),
            [](const Region& a, const Region& b) { return a.id < b.id; });
  cell_region_.assign(static_cast<std::size_t>(grid_.cell_count()), kNoRegion);
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    for (int cell : regions_[r].cells) {
      cell_region_[static_cast<std::size_t>(cell)] = static_cast<int>(r);
    }
  }
}

void RegionPartition::check_invariants() const {
  std::set<CellLabel> labels;
  std::vector<int> owner(static_cast<std::size_t>(grid_.cell_count()), kNoRegion);
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    const Region& region = regions_[r];
    if (region.cells.empty() || !(region.area > 0.0)) {
      throw ModelError("partition: empty region " + std::to_string(region.id));
    }
    if (region.label.size() != readings_.size() || all_exterior(region.label)) {
      throw ModelError("partition: malformed label on region " + std::to_string(region.id));
    }
    if (!labels.insert(region.label).second) {
      throw ModelError("partition: duplicate label class " + label_string(region));
    }
    for (int cell : region.cells) {
      auto& o = owner[static_cast<std::size_t>(cell)];
      if (o != kNoRegion) {
        throw ModelError("partition: overlapping regions at cell " + std::to_string(cell));
      }
      o = static_cast<int>(r);
    }
  }
  for (int cell = 0; cell < grid_.cell_count(); ++cell) {
    const auto c = static_cast<std::size_t>(cell);
    CellLabel label(readings_.size());
    for (std::size_t i = 0; i < readings_.size(); ++i) {
      label[i] = label_cell(grid_, cell, readings_[i], sensor_);
    }
    const bool covered = !all_exterior(label);
    const bool body = !traversed_.empty() && traversed_[c];
    if (body && owner[c] != kNoRegion) {
      throw ModelError("partition: traversed cell assigned to a region");
    }
    if (covered && !body && owner[c] == kNoRegion) {
      throw ModelError("partition: covered cell " + std::to_string(cell) + " has no region");
    }
    if (!covered && owner[c] != kNoRegion) {
      throw ModelError("partition: uncovered cell " + std::to_string(cell) + " in a region");
    }
    if (owner[c] != kNoRegion && regions_[static_cast<std::size_t>(owner[c])].label != label) {
      throw ModelError("partition: cell " + std::to_string(cell) + " disagrees with its region label");
    }
    if (owner[c] != cell_region_[c]) {
      throw ModelError("partition: stale cell index");
    }
  }
}

std::string RegionPartition::dump() const {
  std::string out;
  char buf[128];
  for (const Region& region : regions_) {
    std::snprintf(buf, sizeof buf, " %zu %.6g %.6f\n", region.cells.size(), region.area,
                  region.prior_occupied);
    out += std::to_string(region.id) + ' ' + label_string(region) + buf;
  }
  return out;
}

RegionPartition build_partition(const Grid& grid, std::span<const SonarReading> readings,
                                const SensorParams& sensor, const PriorParams& prior,
                                std::span<const char> traversed) {
  RegionPartition p;
  p.grid_ = grid;
  p.sensor_ = sensor;
  p.prior_ = prior;
  p.readings_.assign(readings.begin(), readings.end());
  p.traversed_.assign(traversed.begin(), traversed.end());
  if (!p.traversed_.empty() && p.traversed_.size() != static_cast<std::size_t>(grid.cell_count())) {
    throw ModelError("build_partition: traversed mask size mismatch");
  }
  {
    std::set<int> ids;
    for (const SonarReading& r : readings) {
      if (!ids.insert(r.id).second) {
        throw ModelError("build_partition: duplicate reading id " + std::to_string(r.id));
      }
    }
  }

  std::map<CellLabel, std::size_t> classes;
  CellLabel label(readings.size());
  for (int cell = 0; cell < grid.cell_count(); ++cell) {
    if (!p.traversed_.empty() && p.traversed_[static_cast<std::size_t>(cell)]) {
      continue;
    }
    for (std::size_t i = 0; i < readings.size(); ++i) {
      label[i] = label_cell(grid, cell, readings[i], sensor);
    }
    if (all_exterior(label)) {
      continue;
    }
    auto [it, inserted] = classes.try_emplace(label, p.regions_.size());
    if (inserted) {
      Region region;
      region.id = p.next_region_id_++;
      region.label = label;
      p.regions_.push_back(std::move(region));
    }
    p.regions_[it->second].cells.push_back(cell);
  }
  for (Region& region : p.regions_) {
    finish_region(region, grid, prior);
  }
  p.rebuild_index();
  return p;
}

RegionPartition add_reading(const RegionPartition& partition, const SonarReading& reading) {
  for (const SonarReading& r : partition.readings_) {
    if (r.id == reading.id) {
      throw ModelError("add_reading: duplicate reading id " + std::to_string(reading.id));
    }
  }
  const Grid& grid = partition.grid_;
  RegionPartition p;
  p.grid_ = grid;
  p.sensor_ = partition.sensor_;
  p.prior_ = partition.prior_;
  p.readings_ = partition.readings_;
  p.readings_.push_back(reading);
  p.traversed_ = partition.traversed_;
  p.next_region_id_ = partition.next_region_id_;

  // Fresh classes keyed by extended label; ids assigned afterwards in
  // row-major order of each class's first cell.
  std::map<CellLabel, Region> fresh;
  auto push_fresh = [&](const CellLabel& base, Symbol s, int cell) {
    CellLabel label = base;
    label.push_back(s);
    Region& region = fresh[label];
    if (region.cells.empty()) {
      region.label = std::move(label);
    }
    region.cells.push_back(cell);
  };

  for (const Region& old : partition.regions_) {
    std::vector<Symbol> symbols(old.cells.size());
    bool touched = false;
    for (std::size_t c = 0; c < old.cells.size(); ++c) {
      symbols[c] = label_cell(grid, old.cells[c], reading, p.sensor_);
      touched = touched || symbols[c] != Symbol::Exterior;
    }
    if (!touched) {
      Region kept = old;
      kept.label.push_back(Symbol::Exterior);
      p.regions_.push_back(std::move(kept));
      continue;
    }
    for (std::size_t c = 0; c < old.cells.size(); ++c) {
      push_fresh(old.label, symbols[c], old.cells[c]);
    }
  }

  const CellLabel exterior(partition.readings_.size(), Symbol::Exterior);
  for (int cell = 0; cell < grid.cell_count(); ++cell) {
    const auto c = static_cast<std::size_t>(cell);
    if (partition.cell_region_[c] != RegionPartition::kNoRegion ||
        (!p.traversed_.empty() && p.traversed_[c])) {
      continue;
    }
    const Symbol s = label_cell(grid, cell, reading, p.sensor_);
    if (s != Symbol::Exterior) {
      push_fresh(exterior, s, cell);
    }
  }

  std::vector<Region> created;
  for (auto& [label, region] : fresh) {
    std::sort(region.cells.begin(), region.cells.end());
    created.push_back(std::move(region));
  }
  std::sort(created.begin(), created.end(),
            [](const Region& a, const Region& b) { return a.cells.front() < b.cells.front(); });
  for (Region& region : created) {
    region.id = p.next_region_id_++;
    finish_region(region, grid, p.prior_);
    p.regions_.push_back(std::move(region));
  }
  p.rebuild_index();
  return p;
}

}  // namespace sonarfusion
