#include "stpilot/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "stpilot/error.hpp"

namespace stpilot::geometry {
namespace {

constexpr double kOrthoTol = 1e-9;
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

double orthonormality_drift(const Mat3& r) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(r.determinant() - 1.0));
}

}  // namespace

Pose::Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  require(rotation_.allFinite() && translation_.allFinite(), ErrorKind::InvalidPose,
          "pose has non-finite entries");
  const double drift = orthonormality_drift(rotation_);
  require(drift <= kOrthoTol, ErrorKind::InvalidPose,
          "rotation is not orthonormal with det +1 (drift " + std::to_string(drift) + ")");
}

Pose Pose::from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }

Pose Pose::from_rotation(const Mat3& r) { return {r, Vec3::Zero()}; }

Pose Pose::from_axis_angle(const Vec3& axis, double degrees) {
  require(axis.allFinite() && axis.norm() > 0.0, ErrorKind::InvalidPose,
          "axis-angle rotation needs a nonzero finite axis");
  const Eigen::AngleAxisd aa(degrees / kRadToDeg, axis.normalized());
  return from_rotation(aa.toRotationMatrix());
}

Pose Pose::from_row_major(std::span<const double> values) {
  require(values.size() == 12, ErrorKind::InvalidPose,
          "a 3x4 pose needs 12 values, got " + std::to_string(values.size()));
  Mat3 r;
  Vec3 t;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r(row, col) = values[row * 4 + col];
    t(row) = values[row * 4 + 3];
  }
  return {r, t};
}

std::array<double, 12> Pose::row_major() const {
  std::array<double, 12> out{};
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) out[row * 4 + col] = rotation_(row, col);
    out[row * 4 + 3] = translation_(row);
  }
  return out;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

Pose compose(const Pose& a, const Pose& b) {
  Mat3 r = a.rotation() * b.rotation();
  const Vec3 t = a.rotation() * b.translation() + a.translation();
  if (r.allFinite() && orthonormality_drift(r) > kOrthoTol) r = nearest_rotation(r);
  return {r, t};
}

Pose invert(const Pose& p) {
  const Mat3 rt = p.rotation().transpose();
  return {rt, -(rt * p.translation())};
}

Pose relative(const Pose& from, const Pose& to) { return compose(to, invert(from)); }

void check_trajectory(const Trajectory& traj) {
  require(!traj.empty(), ErrorKind::InvalidPose, "trajectory is empty");
}

Trajectory rebase_to_pose(const Trajectory& traj, const Pose& anchor) {
  const Pose inv = invert(anchor);
  Trajectory out;
  out.reserve(traj.size());
  for (const auto& p : traj) out.push_back(compose(p, inv));
  return out;
}

Trajectory rebase_to_frame(const Trajectory& traj, int k) {
  check_trajectory(traj);
  require(k >= 1 && k <= static_cast<int>(traj.size()), ErrorKind::OutOfRange,
          "reference frame " + std::to_string(k) + " outside [1, " +
              std::to_string(traj.size()) + "]");
  Trajectory out = rebase_to_pose(traj, traj[k - 1]);
  out[k - 1] = Pose::identity();
  return out;
}

double rot_err_deg(const Pose& a, const Pose& b) {
  const Mat3 m = a.rotation().transpose() * b.rotation();
  // atan2 of (sin, cos) stays accurate near 0 and 180 where acos does not.
  const Vec3 axis_sin(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double s = 0.5 * axis_sin.norm();
  const double c = 0.5 * (m.trace() - 1.0);
  return std::atan2(s, c) * kRadToDeg;
}

double trans_err(const Pose& a, const Pose& b) {
  return (a.camera_center() - b.camera_center()).norm();
}

Trajectory scale_align(const Trajectory& traj, const Trajectory& ref) {
  require(traj.size() >= 2 && ref.size() >= 2, ErrorKind::InvalidArgument,
          "scale alignment needs at least two frames in both trajectories");
  const double step = (traj[1].camera_center() - traj[0].camera_center()).norm();
  const double ref_step = (ref[1].camera_center() - ref[0].camera_center()).norm();
  require(step > 1e-12, ErrorKind::ScaleUndefined,
          "first camera step of the trajectory has zero length");
  require(ref_step > 1e-12, ErrorKind::ScaleUndefined,
          "first camera step of the reference has zero length");
  const double s = ref_step / step;
  // Scaling every center by s about the origin scales t = -R c by s as well.
  Trajectory out;
  out.reserve(traj.size());
  for (const auto& p : traj) out.emplace_back(p.rotation(), s * p.translation());
  return out;
}

double rta_at(std::span<const double> errors_deg, double threshold_deg) {
  require(threshold_deg > 0.0, ErrorKind::InvalidArgument, "RTA threshold must be positive");
  require(!errors_deg.empty(), ErrorKind::UndefinedMetric, "RTA over an empty error list");
  std::size_t below = 0;
  for (double e : errors_deg) {
    if (e < threshold_deg) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(errors_deg.size());
}

}  // namespace stpilot::geometry
