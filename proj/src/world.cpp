#include "sonarfusion/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sonarfusion/error.hpp"

namespace sonarfusion {

namespace {

bool is_open_probability(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

void SensorParams::validate() const {
  if (!(r_min >= 0.0 && r_min < r_max)) {
    throw ModelError("sensor: require 0 <= r_min < r_max");
  }
  if (!(epsilon > 0.0)) {
    throw ModelError("sensor: epsilon must be positive");
  }
  if (!(beam_half_width_deg > 0.0 && beam_half_width_deg < 90.0)) {
    throw ModelError("sensor: beam_half_width_deg must be in (0, 90)");
  }
  if (!is_open_probability(p_true) || !is_open_probability(p_dropout) ||
      !is_open_probability(p_spurious)) {
    throw ModelError("sensor: probabilities must lie in (0, 1)");
  }
  if (!(p_spurious < p_dropout && p_dropout < p_true)) {
    throw ModelError("sensor: require p_spurious < p_dropout < p_true");
  }
}

void ScenarioWorld::validate() const {
  if (grid.width <= 0 || grid.height <= 0) {
    throw ModelError("grid: width and height must be positive");
  }
  if (!(grid.cell_size > 0.0)) {
    throw ModelError("grid: cell_size must be positive");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.a == s.b) {
      throw ModelError("segments[" + std::to_string(i) + "]: endpoints must be distinct");
    }
    if (!(s.critical_angle_deg > 0.0 && s.critical_angle_deg <= 90.0)) {
      throw ModelError("segments[" + std::to_string(i) +
                       "]: critical_angle_deg must be in (0, 90]");
    }
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!grid.contains(path[i].position)) {
      throw ModelError("path[" + std::to_string(i) + "]: position outside grid bounds");
    }
  }
  for (std::size_t i = 0; i < firings.size(); ++i) {
    if (firings[i].pose < 0 || static_cast<std::size_t>(firings[i].pose) >= path.size()) {
      throw ModelError("firings[" + std::to_string(i) + "]: firing pose out of range");
    }
  }
  if (!(robot_radius >= 0.0)) {
    throw ModelError("robot: radius must be nonnegative");
  }
  sensor.validate();
  prior.validate();
}

SonarReading cast_sonar(const ScenarioWorld& world, const Pose& pose, double bearing_deg,
                        int reading_id, Rng& rng) {
  const SensorParams& sensor = world.sensor;
  SonarReading reading;
  reading.id = reading_id;
  reading.pose = pose;
  reading.bearing_deg = wrap_degrees(bearing_deg);

  double nearest = std::numeric_limits<double>::infinity();
  const double step = 2.0 * sensor.beam_half_width_deg / (kBeamRays - 1);
  for (int k = 0; k < kBeamRays; ++k) {
    const Vec2 dir = direction(bearing_deg - sensor.beam_half_width_deg + k * step);
    // Only the first surface along a ray matters: a specular bounce carries
    // the energy away and nothing behind it is interrogated.
    double first = std::numeric_limits<double>::infinity();
    bool detectable = false;
    for (const Segment& seg : world.segments) {
      if (auto hit = intersect_ray_segment(pose.position, dir, seg.a, seg.b)) {
        if (hit->distance < first) {
          first = hit->distance;
          detectable = hit->incidence <= seg.critical_angle_deg;
        }
      }
    }
    if (detectable && first <= sensor.r_max) {
      nearest = std::min(nearest, first);
    }
  }

  if (std::isfinite(nearest)) {
    reading.range = std::clamp(std::round(nearest), sensor.r_min, sensor.r_max);
    reading.provenance = Provenance::Echo;
  } else if (uniform01(rng) < sensor.p_spurious) {
    const auto lo = static_cast<std::int64_t>(std::ceil(sensor.r_min));
    const auto hi = static_cast<std::int64_t>(std::floor(sensor.r_max));
    reading.range = static_cast<double>(uniform_int(rng, lo, hi));
    reading.provenance = Provenance::Spurious;
  } else {
    reading.range = sensor.r_max;
    reading.provenance = Provenance::NoEcho;
  }
  reading.is_max_range = reading.range >= sensor.r_max;
  return reading;
}

std::vector<SonarReading> run_firings(const ScenarioWorld& world) {
  std::vector<SonarReading> readings;
  readings.reserve(world.firings.size());
  for (std::size_t i = 0; i < world.firings.size(); ++i) {
    const Firing& firing = world.firings[i];
    const Pose& pose = world.path.at(static_cast<std::size_t>(firing.pose));
    Rng rng(derive_seed(world.seed, i));
    readings.push_back(cast_sonar(world, pose, pose.heading_deg + firing.bearing_deg,
                                  static_cast<int>(i), rng));
  }
  return readings;
}

std::vector<char> traversed_cells(const Grid& grid, std::span<const Pose> path, double radius) {
  std::vector<char> mask(static_cast<std::size_t>(grid.cell_count()), 0);
  if (radius <= 0.0 || path.empty()) {
    return mask;
  }
  for (int cell = 0; cell < grid.cell_count(); ++cell) {
    const Vec2 c = grid.center(cell);
    bool inside = false;
    if (path.size() == 1) {
      inside = (c - path[0].position).norm() <= radius;
    }
    for (std::size_t i = 1; i < path.size() && !inside; ++i) {
      inside = distance_to_segment(c, path[i - 1].position, path[i].position) <= radius;
    }
    mask[static_cast<std::size_t>(cell)] = inside ? 1 : 0;
  }
  return mask;
}

}  // namespace sonarfusion
