#pragma once

// Shared helpers for the unit and acceptance tests. Oracles here are written
// from first principles and deliberately avoid calling the library code they
// are used to check.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "stpilot/geometry.hpp"
#include "stpilot/rng.hpp"

namespace stpilot::testing {

inline constexpr double kPi = 3.14159265358979323846;

/// Rodrigues' formula: I + sin(a) K + (1 - cos(a)) K^2.
inline Eigen::Matrix3d rodrigues(Eigen::Vector3d axis, double degrees) {
  axis.normalize();
  const double a = degrees * kPi / 180.0;
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(a) * k + (1.0 - std::cos(a)) * k * k;
}

inline Eigen::Matrix3d rot_z(double degrees) {
  const double a = degrees * kPi / 180.0;
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

/// arccos((trace(A^T B) - 1) / 2) in degrees.
inline double angle_between_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

/// 4x4 homogeneous matrix of a pose.
inline Eigen::Matrix4d homogeneous(const geometry::Pose& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = p.rotation();
  m.topRightCorner<3, 1>() = p.translation();
  return m;
}

inline double max_abs_diff(const geometry::Pose& a, const geometry::Pose& b) {
  return (homogeneous(a) - homogeneous(b)).cwiseAbs().maxCoeff();
}

inline geometry::Pose random_pose(Rng& rng, double translation_scale = 5.0) {
  const Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
  const double deg = rng.uniform(0.0, 179.0);
  const Eigen::Vector3d t(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  return {rodrigues(axis, deg), translation_scale * t};
}

inline geometry::Trajectory random_trajectory(Rng& rng, int frames) {
  geometry::Trajectory traj;
  for (int i = 0; i < frames; ++i) traj.push_back(random_pose(rng));
  return traj;
}

/// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "stpilot-test-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace stpilot::testing
