#pragma once

// Camera poses and trajectories.
//
// Poses are world-to-camera extrinsics [R|t] with camera axes x-right,
// y-down, z-forward, so a world point X maps to R*X + t and the camera
// center is -R^T t.
//
// Frame numbers are 1-based throughout the library, matching the values a
// time signal takes.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace stpilot::geometry {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Rigid world-to-camera transform. Construction validates that the rotation
/// is orthonormal with determinant +1 (within 1e-9) and that every entry is
/// finite; an invalid input throws Error{InvalidPose}.
class Pose {
 public:
  Pose();  // identity
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t);
  static Pose from_rotation(const Mat3& r);
  /// Rotation by `degrees` about `axis` (normalized internally).
  static Pose from_axis_angle(const Vec3& axis, double degrees);
  /// Row-major 3x4 [R|t], twelve values.
  static Pose from_row_major(std::span<const double> values);

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Vec3 camera_center() const { return -(rotation_.transpose() * translation_); }
  Vec3 apply(const Vec3& world_point) const { return rotation_ * world_point + translation_; }

  /// Row-major 3x4 [R|t].
  std::array<double, 12> row_major() const;

  /// Exact equality of every entry.
  friend bool operator==(const Pose& a, const Pose& b) {
    return a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

using Trajectory = std::vector<Pose>;

/// Rigid composition a∘b: applies b first, then a. Re-orthonormalizes the
/// result when accumulated drift exceeds 1e-9.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

/// Relative pose taking camera `from` to camera `to`: to ∘ from⁻¹.
Pose relative(const Pose& from, const Pose& to);

/// Re-expresses the trajectory in the camera frame of frame `k` (1-based):
/// out_i = in_i ∘ in_k⁻¹, so out_k is exactly the identity and every relative
/// pose between two frames is preserved.
Trajectory rebase_to_frame(const Trajectory& traj, int k);

/// Applies the same world-frame change to every pose: out_i = in_i ∘ anchor⁻¹.
Trajectory rebase_to_pose(const Trajectory& traj, const Pose& anchor);

/// Geodesic angle between the two rotations, degrees in [0, 180].
double rot_err_deg(const Pose& a, const Pose& b);

/// Euclidean distance between the two camera centers.
double trans_err(const Pose& a, const Pose& b);

/// Scales `traj`'s camera centers about the world origin so that the
/// displacement between its first two centers matches `ref`'s in magnitude.
/// Rotations are unchanged.
Trajectory scale_align(const Trajectory& traj, const Trajectory& ref);

/// Fraction of `errors_deg` strictly below `threshold_deg`.
double rta_at(std::span<const double> errors_deg, double threshold_deg);

/// Projects a 3x3 matrix onto SO(3) via polar decomposition.
Mat3 nearest_rotation(const Mat3& m);

/// Throws Error{InvalidPose} on an empty trajectory.
void check_trajectory(const Trajectory& traj);

}  // namespace stpilot::geometry
