#include <algorithm>
#include <cmath>

#include "raytrace.hpp"
#include "stpilot/error.hpp"
#include "stpilot/scenesim.hpp"

namespace stpilot::scenesim {
namespace {

constexpr double kGolden = 0.6180339887498949;

/// Minimizes a convex function on [0, 1].
template <class F>
double minimize_unit(F&& f) {
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 64; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f1, f2});
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + u * ab)).norm();
}

/// Signed distance from p to an axis-aligned box centered at the origin.
double box_distance(const Vec3& p, const Vec3& half) {
  const Vec3 q = p.cwiseAbs() - half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

/// Keyframe centers as segments; a single keyframe is a degenerate segment.
std::vector<std::pair<Vec3, Vec3>> center_segments(const Primitive& prim) {
  std::vector<std::pair<Vec3, Vec3>> segs;
  if (prim.path.size() == 1) {
    segs.emplace_back(prim.path[0].center, prim.path[0].center);
  }
  for (std::size_t i = 1; i < prim.path.size(); ++i) {
    segs.emplace_back(prim.path[i - 1].center, prim.path[i].center);
  }
  return segs;
}

double distance_at(const Primitive& prim, const Vec3& p, const Vec3& c0, const Vec3& c1) {
  if (prim.shape == Shape::Sphere) return point_segment_distance(p, c0, c1) - prim.radius;
  return minimize_unit([&](double v) { return box_distance(p - (c0 + v * (c1 - c0)), prim.half_extents); });
}

bool subject_visible(const SceneSpec& scene, const Pose& pose, const Intrinsics& intr, double t) {
  std::vector<Vec3> centers;
  centers.reserve(scene.primitives.size());
  for (const auto& p : scene.primitives) centers.push_back(p.center_at(t));
  const Vec3 target = centers[static_cast<std::size_t>(scene.subject)];
  const Vec3 cam = pose.apply(target);
  if (cam.z() <= 1e-9) return false;
  const double u = intr.focal * cam.x() / cam.z() + 0.5 * intr.width;
  const double v = intr.focal * cam.y() / cam.z() + 0.5 * intr.height;
  if (u < 0.0 || u >= intr.width || v < 0.0 || v >= intr.height) return false;
  const Vec3 origin = pose.camera_center();
  const Vec3 dir = (target - origin).normalized();
  return detail::trace(scene, centers, origin, dir).primitive == scene.subject;
}

}  // namespace

std::optional<int> ValidityReport::first_violation() const {
  if (first_collision_frame && first_hidden_frame) {
    return std::min(*first_collision_frame, *first_hidden_frame);
  }
  return first_collision_frame ? first_collision_frame : first_hidden_frame;
}

double swept_distance(const Primitive& prim, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [c0, c1] : center_segments(prim)) best = std::min(best, distance_at(prim, p, c0, c1));
  return best;
}

double swept_distance(const Primitive& prim, const Vec3& a, const Vec3& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [c0, c1] : center_segments(prim)) {
    best = std::min(best, minimize_unit([&](double u) {
                      return distance_at(prim, a + u * (b - a), c0, c1);
                    }));
  }
  return best;
}

ValidityReport validate_trajectory(const Trajectory& traj, const SceneSpec& scene,
                                   const Intrinsics& intr, const std::vector<double>& times,
                                   const ValidityOptions& opts) {
  validate(scene);
  geometry::check_trajectory(traj);
  ValidityReport report;

  auto clearance = [&](const Vec3& a, const Vec3& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : scene.primitives) best = std::min(best, swept_distance(prim, a, b));
    if (scene.ground_plane) {
      // Height above the plane is linear along the segment.
      best = std::min({best, a.y() - scene.ground_height, b.y() - scene.ground_height});
    }
    return best;
  };

  Vec3 prev = traj.front().camera_center();
  for (std::size_t f = 0; f < traj.size(); ++f) {
    const Vec3 cur = traj[f].camera_center();
    if (clearance(prev, cur) < opts.margin) {
      const int frame = static_cast<int>(f) + 1;
      report.first_collision_frame = frame;
      if (frame == 1) {
        report.collision_free_start = false;
        report.reason = "camera starts within " + std::to_string(opts.margin) + " of scene geometry";
      } else {
        report.reason = "camera path enters scene geometry between frames " +
                        std::to_string(frame - 1) + " and " + std::to_string(frame);
      }
      report.non_intersecting = false;
      break;
    }
    prev = cur;
  }

  for (std::size_t f = 0; f < traj.size() && !report.first_hidden_frame; ++f) {
    for (double t : times) {
      if (!subject_visible(scene, traj[f], intr, t)) {
        report.subject_visible = false;
        report.first_hidden_frame = static_cast<int>(f) + 1;
        if (report.reason.empty()) {
          report.reason = "subject hidden at frame " + std::to_string(f + 1) + ", time " +
                          std::to_string(t);
        }
        break;
      }
    }
  }
  return report;
}

}  // namespace stpilot::scenesim
