#include "sonarfusion/geometry.hpp"

#include <algorithm>

namespace sonarfusion {

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) {
    w += 360.0;
  } else if (w > 180.0) {
    w -= 360.0;
  }
  return w;
}

std::optional<RayHit> intersect_ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
  const Vec2 edge = b - a;
  const double denom = cross(dir, edge);
  if (std::abs(denom) < 1e-12) {
    return std::nullopt;
  }
  const Vec2 rel = a - origin;
  const double t = cross(rel, edge) / denom;
  const double s = cross(rel, dir) / denom;
  if (t <= 1e-9 || s < 0.0 || s > 1.0) {
    return std::nullopt;
  }
  const double len = edge.norm();
  const Vec2 normal{-edge.y / len, edge.x / len};
  const double c = std::min(1.0, std::abs(dot(dir, normal)));
  return RayHit{t, rad_to_deg(std::acos(c))};
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 edge = b - a;
  const double len2 = dot(edge, edge);
  double s = len2 > 0.0 ? dot(p - a, edge) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * edge)).norm();
}

}  // namespace sonarfusion
