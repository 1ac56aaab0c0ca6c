#pragma once

// Ray intersection helpers shared by the renderer and the validity checks.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "stpilot/scenesim.hpp"

namespace stpilot::scenesim::detail {

constexpr double kHitEps = 1e-9;
constexpr double kNoHit = std::numeric_limits<double>::infinity();

inline double hit_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r) {
  const Vec3 oc = o - c;
  const double b = oc.dot(d);
  const double cc = oc.squaredNorm() - r * r;
  const double disc = b * b - cc;
  if (disc < 0.0) return kNoHit;
  const double s = std::sqrt(disc);
  if (-b - s > kHitEps) return -b - s;
  if (-b + s > kHitEps) return -b + s;
  return kNoHit;
}

inline double hit_box(const Vec3& o, const Vec3& d, const Vec3& c, const Vec3& half, Vec3* normal) {
  double t_near = -kNoHit;
  double t_far = kNoHit;
  int near_axis = 0;
  int far_axis = 0;
  for (int a = 0; a < 3; ++a) {
    const double lo = c[a] - half[a];
    const double hi = c[a] + half[a];
    if (std::abs(d[a]) < 1e-300) {
      if (o[a] < lo || o[a] > hi) return kNoHit;
      continue;
    }
    double t0 = (lo - o[a]) / d[a];
    double t1 = (hi - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      near_axis = a;
    }
    if (t1 < t_far) {
      t_far = t1;
      far_axis = a;
    }
    if (t_near > t_far) return kNoHit;
  }
  double t = kNoHit;
  int axis = 0;
  if (t_near > kHitEps) {
    t = t_near;
    axis = near_axis;
  } else if (t_far > kHitEps) {
    t = t_far;
    axis = far_axis;
  } else {
    return kNoHit;
  }
  if (normal) {
    *normal = Vec3::Zero();
    (*normal)[axis] = (o[axis] + t * d[axis] < c[axis]) ? -1.0 : 1.0;
  }
  return t;
}

struct Hit {
  double t = kNoHit;
  int primitive = -1;  ///< -1 ground, -2 nothing
  Vec3 normal = Vec3::UnitY();
};

inline Hit trace(const SceneSpec& scene, const std::vector<Vec3>& centers, const Vec3& o, const Vec3& d) {
  Hit best;
  best.primitive = -2;
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    const auto& p = scene.primitives[i];
    Vec3 n;
    double t;
    if (p.shape == Shape::Sphere) {
      t = hit_sphere(o, d, centers[i], p.radius);
      if (t < best.t) n = (o + t * d - centers[i]) / p.radius;
    } else {
      t = hit_box(o, d, centers[i], p.half_extents, &n);
    }
    if (t < best.t) {
      best = {t, static_cast<int>(i), n};
    }
  }
  if (scene.ground_plane && std::abs(d.y()) > 1e-300) {
    const double t = (scene.ground_height - o.y()) / d.y();
    if (t > kHitEps && t < best.t) {
      best = {t, -1, Vec3(0, o.y() > scene.ground_height ? 1.0 : -1.0, 0)};
    }
  }
  return best;
}

}  // namespace stpilot::scenesim::detail
