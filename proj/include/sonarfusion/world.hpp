#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sonarfusion/geometry.hpp"
#include "sonarfusion/prior.hpp"
#include "sonarfusion/rng.hpp"

namespace sonarfusion {

/// Wall segment. `critical_angle_deg` is measured from the surface normal;
/// rays arriving at a larger angle are reflected away and return no echo.
struct Segment {
  Vec2 a;
  Vec2 b;
  double critical_angle_deg = 60.0;
};

struct Pose {
  Vec2 position;
  double heading_deg = 0.0;
};

struct SensorParams {
  double r_min = 6.0;
  double r_max = 255.0;
  double epsilon = 1.5;  // half-thickness of the detection arc
  double beam_half_width_deg = 12.5;
  double p_true = 0.9;       // echo observed given an obstacle in the arc, free sector
  double p_dropout = 0.1;    // observed value given an obstacle in the sector
  double p_spurious = 0.05;  // observed value given an empty cone

  void validate() const;
};

enum class Provenance : std::uint8_t {
  Echo,      // nearest detectable surface
  Spurious,  // uniform random range drawn after a dropout
  NoEcho,    // dropout reported as r_max
};

struct SonarReading {
  int id = 0;
  Pose pose;
  double bearing_deg = 0.0;  // absolute
  double range = 0.0;        // integer grid units
  bool is_max_range = false;
  Provenance provenance = Provenance::Echo;
};

/// Cell (i, j) covers [i, i+1) x [j, j+1) scaled by cell_size; its center is
/// the sample point for every membership test.
struct Grid {
  int width = 0;
  int height = 0;
  double cell_size = 1.0;

  int cell_count() const { return width * height; }
  int index(int i, int j) const { return j * width + i; }
  int column(int cell) const { return cell % width; }
  int row(int cell) const { return cell / width; }
  Vec2 center(int cell) const {
    return {(column(cell) + 0.5) * cell_size, (row(cell) + 0.5) * cell_size};
  }
  double extent_x() const { return width * cell_size; }
  double extent_y() const { return height * cell_size; }
  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= extent_x() && p.y <= extent_y();
  }
};

struct Firing {
  int pose = 0;
  double bearing_deg = 0.0;  // relative to the pose heading
};

struct ScenarioWorld {
  Grid grid;
  std::vector<Segment> segments;
  std::vector<Pose> path;
  std::vector<Firing> firings;
  SensorParams sensor;
  PriorParams prior;
  double robot_radius = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Number of rays sampled across the beam (about 1 degree apart for a 25
/// degree beam).
inline constexpr int kBeamRays = 26;

/// Simulates one sonar ping. Pure given the rng state.
SonarReading cast_sonar(const ScenarioWorld& world, const Pose& pose, double bearing_deg,
                        int reading_id, Rng& rng);

/// One reading per firing, in firing order. Firing i draws from its own
/// stream derive_seed(world.seed, i).
std::vector<SonarReading> run_firings(const ScenarioWorld& world);

/// Cells whose centers lie within `radius` of the robot path polyline.
std::vector<char> traversed_cells(const Grid& grid, std::span<const Pose> path, double radius);

}  // namespace sonarfusion
