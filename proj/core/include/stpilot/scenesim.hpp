#pragma once

// Miniature parametric dynamic scenes, camera path families, a primary-ray
// renderer and the full camera x time grid.
//
// World frame is y-up; the optional ground plane is y = ground_height.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpilot/geometry.hpp"
#include "stpilot/image.hpp"

namespace stpilot::scenesim {

using geometry::Pose;
using geometry::Trajectory;
using geometry::Vec3;

enum class Shape { Sphere, Box };

struct Keyframe {
  double time = 1.0;
  Vec3 center = Vec3::Zero();
};

struct Primitive {
  Shape shape = Shape::Sphere;
  std::vector<Keyframe> path;  ///< sorted by time; linear in between, held outside
  double radius = 1.0;         ///< sphere
  Vec3 half_extents = Vec3::Ones();  ///< box (axis aligned)
  Vec3 albedo = Vec3(0.8, 0.8, 0.8);

  Vec3 center_at(double t) const;
};

struct SceneSpec {
  std::vector<Primitive> primitives;
  int subject = 0;
  int anim_frames = 120;  ///< animation times live in [1, anim_frames]
  bool ground_plane = true;
  double ground_height = 0.0;
  Vec3 ground_albedo = Vec3(0.55, 0.55, 0.5);
  Vec3 light_dir = Vec3(0.4, 1.0, -0.3);  ///< toward the light
  double ambient = 0.25;
  Vec3 background = Vec3(0.55, 0.7, 0.9);

  bool is_static() const;
};

/// Throws Error{InvalidArgument} on a malformed scene.
void validate(const SceneSpec& scene);

struct Intrinsics {
  double focal = 64.0;  ///< pixels
  int width = 64;
  int height = 64;
};

enum class PathFamily { Orbit, Linear, Arc };

struct CameraPathSpec {
  PathFamily family = PathFamily::Orbit;
  int frames = 120;
  Intrinsics intrinsics;
  Vec3 target = Vec3::Zero();  ///< orbit center and look-at point for orbit/arc
  double radius = 6.0;
  double height = 1.5;         ///< orbit camera height above target
  double start_deg = 0.0;
  double span_deg = 90.0;      ///< a span of exactly 360 samples a closed loop
  Vec3 start = Vec3(-4, 1.5, -6);
  Vec3 end = Vec3(4, 1.5, -6);
  Vec3 control = Vec3(0, 3, -8);  ///< arc: quadratic Bezier control point
};

/// World-to-camera pose at `eye` looking at `target`, image y pointing down.
Pose look_at(const Vec3& eye, const Vec3& target);

/// Samples the path family into `frames` poses.
Trajectory make_trajectory(const CameraPathSpec& spec);

/// Render at animation time `t` in [1, scene.anim_frames].
Image render_frame(const SceneSpec& scene, const Pose& pose, double t, const Intrinsics& intr);

/// All (camera, time) renders: rows index cameras, columns index times.
struct Grid {
  Trajectory trajectory;
  std::vector<double> times;
  Intrinsics intrinsics;
  std::vector<Image> cells;  ///< row-major [camera][time]

  int camera_count() const { return static_cast<int>(trajectory.size()); }
  int time_count() const { return static_cast<int>(times.size()); }
  /// 1-based camera and time indices.
  const Image& cell(int camera, int time) const;
};

/// `threads` <= 0 means hardware concurrency.
Grid render_grid(const SceneSpec& scene, const Trajectory& traj, const std::vector<double>& times,
                 const Intrinsics& intr, int threads = 0);

struct ValidityOptions {
  double margin = 0.25;  ///< minimum clearance between camera and any geometry
};

struct ValidityReport {
  bool collision_free_start = true;
  bool non_intersecting = true;
  bool subject_visible = true;
  std::optional<int> first_collision_frame;  ///< 1-based
  std::optional<int> first_hidden_frame;
  std::string reason;

  bool ok() const { return collision_free_start && non_intersecting && subject_visible; }
  /// Earliest frame that failed any check.
  std::optional<int> first_violation() const;
};

/// Checks (1) the first camera position is clear of all geometry, (2) every
/// camera step stays clear of every primitive's swept volume over the whole
/// animation and of the ground, and (3) for every frame and every time in
/// `times` the subject center projects into the image and the ray to it hits
/// the subject before any other geometry.
ValidityReport validate_trajectory(const Trajectory& traj, const SceneSpec& scene,
                                   const Intrinsics& intr, const std::vector<double>& times,
                                   const ValidityOptions& opts = {});

/// Signed clearance from a point to a primitive's volume swept over its whole
/// keyframe path (negative inside).
double swept_distance(const Primitive& prim, const Vec3& p);
/// Minimum clearance from the closed segment [a, b] to the swept volume.
double swept_distance(const Primitive& prim, const Vec3& a, const Vec3& b);

nlohmann::json to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CameraPathSpec& spec);
CameraPathSpec camera_path_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Intrinsics& intr);
Intrinsics intrinsics_from_json(const nlohmann::json& j);

/// SHA-256 of the canonical JSON encoding.
std::string scene_hash(const SceneSpec& scene);

/// Small animated scene used by tests, benchmarks and the CLI demo: a
/// bouncing subject sphere, a sliding box and a static sphere.
SceneSpec demo_scene(int anim_frames = 120);

/// Directory layout: c{i:03}/t{j:03}.png (1-based), trajectory.txt and
/// meta.json with the times, intrinsics, scene hash and per-cell SHA-256.
void write_grid(const std::filesystem::path& dir, const Grid& grid, const std::string& scene_hash);
Grid read_grid(const std::filesystem::path& dir, bool verify_checksums = true);

}  // namespace stpilot::scenesim
