#pragma once

// Retiming fidelity (PSNR/SSIM against grid ground truth) and camera accuracy
// (relative and absolute protocols, first-frame metrics).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpilot/geometry.hpp"
#include "stpilot/image.hpp"
#include "stpilot/scenesim.hpp"
#include "stpilot/timewarp.hpp"

namespace stpilot::evalh {

using geometry::Pose;
using geometry::Trajectory;

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kMaxValue = 255.0;
inline constexpr int kSsimWindow = 8;

/// 10 log10(MAX^2 / MSE) over all samples, capped at 99 dB.
double psnr(const ImageF& a, const ImageF& b, double max_value = kMaxValue);
double psnr(const Image& a, const Image& b);

/// Mean SSIM over every 8x8 window (stride 1) and channel, with
/// C1 = (0.01 MAX)^2 and C2 = (0.03 MAX)^2.
double ssim(const ImageF& a, const ImageF& b, double max_value = kMaxValue);
double ssim(const Image& a, const Image& b);

enum class Category { Direction, Speed, Bullet, Other };
std::string_view to_string(Category c);

/// Table bucket for a time signal: freeze -> Bullet; identity, reverse and
/// zigzag -> Direction; slow_segment and accelerate -> Speed; freeform -> Other.
Category categorize(const timewarp::TimeSignal& signal);

struct FrameScore {
  double psnr = 0.0;
  double ssim = 0.0;
};

struct RetimeResult {
  std::string label;
  Category category = Category::Other;
  std::vector<FrameScore> frames;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
};

/// Scores generated frame f against grid cell (cam_path[f], time_path[f]).
/// The category is taken from the time path's values.
RetimeResult eval_retime(const FrameSequence& generated, const scenesim::Grid& grid,
                         std::span<const int> cam_path, std::span<const int> time_path,
                         std::string label = {});

enum class Protocol { Relative, Absolute };
std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

struct PoseResult {
  Protocol protocol = Protocol::Relative;
  std::vector<double> rot_errors;    ///< per frame, degrees
  std::vector<double> trans_errors;  ///< per frame
  double mean_rot = 0.0;             ///< RelRot or AbsRot (mean over frames)
  double mean_trans = 0.0;           ///< RelTrans or AbsTrans (mean over frames)
  double first_frame_rot = 0.0;      ///< rot_err_deg at frame 1 before any alignment
};

/// Relative protocol: both trajectories are re-expressed in the target's
/// first-frame camera, the generated one is scale-aligned to the target, and
/// poses are compared frame by frame.
///
/// Absolute protocol: `first_frame_relpose` maps generated world coordinates
/// to target world coordinates; the generated trajectory is moved by it,
/// scale-aligned, and compared without rebasing. Missing relpose throws
/// Error{InvalidArgument}.
PoseResult eval_pose(const Trajectory& generated, const Trajectory& target, Protocol protocol,
                     const std::optional<Pose>& first_frame_relpose = std::nullopt);

/// Fraction of items whose first-frame rotation error is strictly below the
/// threshold.
double rta(std::span<const PoseResult> items, double threshold_deg);

struct CategoryMean {
  Category category;
  int items = 0;
  double psnr = 0.0;
  double ssim = 0.0;
};

/// Report mirroring the retiming and camera-accuracy tables. LPIPS and the
/// VBench dimensions require pretrained networks and are left as labeled
/// null slots.
struct EvalReport {
  std::vector<RetimeResult> retime;
  std::vector<PoseResult> pose;

  std::vector<CategoryMean> category_means() const;
  nlohmann::json to_json() const;
  std::string to_table() const;
};

}  // namespace stpilot::evalh
