#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace sonarfusion {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees(double deg);

/// Unit vector pointing at `deg` degrees counterclockwise from +x.
inline Vec2 direction(double deg) {
  const double rad = deg_to_rad(deg);
  return {std::cos(rad), std::sin(rad)};
}

struct RayHit {
  double distance;   // along the ray
  double incidence;  // degrees between the ray and the surface normal, in [0, 90]
};

/// Intersection of the ray origin + t*dir (t > 0, |dir| = 1) with the closed
/// segment [a, b]. Parallel rays never hit.
std::optional<RayHit> intersect_ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b);

/// Euclidean distance from p to the closed segment [a, b].
double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);

}  // namespace sonarfusion
