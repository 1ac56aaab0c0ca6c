#include "stpilot/griddata.hpp"

#include <algorithm>
#include <cmath>

#include "stpilot/error.hpp"

namespace stpilot::griddata {
namespace {

int grid_horizon(const scenesim::Grid& grid) {
  const double max_t = *std::max_element(grid.times.begin(), grid.times.end());
  return std::max(grid.time_count(), static_cast<int>(std::ceil(max_t)));
}

void check_clip(const Clip& clip, const char* role) {
  require(!clip.frames.empty(), ErrorKind::ShapeMismatch, std::string(role) + " clip is empty");
  require(clip.cameras.size() == clip.frames.size() && clip.times.size() == clip.frames.size(),
          ErrorKind::ShapeMismatch,
          std::string(role) + " clip has " + std::to_string(clip.frames.size()) + " frames, " +
              std::to_string(clip.cameras.size()) + " cameras and " +
              std::to_string(clip.times.size()) + " times");
}

Clip rebased(const Clip& clip, const geometry::Pose& anchor) {
  return {clip.frames, geometry::rebase_to_pose(clip.cameras, anchor), clip.times};
}

}  // namespace

void check_pair(const PairSample& pair) {
  check_clip(pair.source, "source");
  check_clip(pair.target, "target");
  require(pair.target.size() == pair.source.size(), ErrorKind::ShapeMismatch,
          "source and target lengths differ");
  if (pair.previous) {
    check_clip(*pair.previous, "previous");
    require(pair.previous->size() == pair.source.size(), ErrorKind::ShapeMismatch,
            "previous and source lengths differ");
  }
  require(pair.reference_frame >= 1 && pair.reference_frame <= static_cast<int>(pair.source.size()),
          ErrorKind::OutOfRange, "reference frame outside the source clip");
}

Clip sample_diagonal_source(const scenesim::Grid& grid, int start, int frames) {
  require(frames >= 1, ErrorKind::InvalidArgument, "clip length must be >= 1");
  const int last = start + frames - 1;
  require(start >= 1 && last <= grid.camera_count() && last <= grid.time_count(),
          ErrorKind::OutOfRange,
          "diagonal window [" + std::to_string(start) + ", " + std::to_string(last) +
              "] does not fit a " + std::to_string(grid.camera_count()) + "x" +
              std::to_string(grid.time_count()) + " grid");
  std::vector<int> path(static_cast<std::size_t>(frames));
  for (int i = 0; i < frames; ++i) path[static_cast<std::size_t>(i)] = start + i;
  return sample_target(grid, path, path);
}

Clip sample_target(const scenesim::Grid& grid, std::span<const int> cam_path,
                   std::span<const int> time_path) {
  require(!cam_path.empty(), ErrorKind::InvalidArgument, "camera path is empty");
  require(cam_path.size() == time_path.size(), ErrorKind::ShapeMismatch,
          "camera path has " + std::to_string(cam_path.size()) + " entries, time path " +
              std::to_string(time_path.size()));
  Clip clip;
  std::vector<double> times;
  for (std::size_t f = 0; f < cam_path.size(); ++f) {
    clip.frames.push_back(grid.cell(cam_path[f], time_path[f]));
    clip.cameras.push_back(grid.trajectory[static_cast<std::size_t>(cam_path[f] - 1)]);
    times.push_back(grid.times[static_cast<std::size_t>(time_path[f] - 1)]);
  }
  clip.times = TimeSignal(std::move(times), grid_horizon(grid));
  return clip;
}

PairSample make_pair(const Clip& source, const Clip& target, int reference_frame) {
  check_clip(source, "source");
  require(reference_frame >= 1 && reference_frame <= static_cast<int>(source.size()),
          ErrorKind::OutOfRange,
          "reference frame " + std::to_string(reference_frame) + " outside the source clip");
  const geometry::Pose anchor = source.cameras[static_cast<std::size_t>(reference_frame - 1)];
  PairSample pair;
  pair.source = rebased(source, anchor);
  pair.target = rebased(target, anchor);
  pair.reference_frame = reference_frame;
  check_pair(pair);
  return pair;
}

PairSample make_warped_pair(const Clip& source, const Clip& target, const timewarp::WarpSpec& warp,
                            int reference_frame) {
  check_clip(source, "source");
  check_clip(target, "target");
  require(source.size() == target.size(), ErrorKind::ShapeMismatch,
          "source has " + std::to_string(source.size()) + " frames, target " +
              std::to_string(target.size()));
  require(warp.frames == static_cast<int>(target.size()), ErrorKind::ShapeMismatch,
          "warp is defined for " + std::to_string(warp.frames) + " frames, videos have " +
              std::to_string(target.size()));
  const auto forward = TimeSignal::forward(static_cast<int>(source.size()));
  require(source.times.values().size() == forward.size() &&
              std::equal(source.times.values().begin(), source.times.values().end(),
                         forward.values().begin()) &&
              std::equal(target.times.values().begin(), target.times.values().end(),
                         forward.values().begin()),
          ErrorKind::InvalidArgument, "warped pairs need synchronized videos with times 1..F");

  const TimeSignal tau = timewarp::eval_warp(warp);
  Clip warped;
  warped.frames = timewarp::apply_warp_frames(target.frames, tau);
  warped.cameras = timewarp::apply_warp_frames(target.cameras, tau);
  warped.times = tau;

  PairSample pair = make_pair(source, warped, reference_frame);
  pair.warp = warp;
  pair.seed = warp.seed;
  return pair;
}

PairSample make_memory_pair(const scenesim::Grid& grid, const Clip& source,
                            const SegmentSpec& segment1, const SegmentSpec& segment2,
                            int reference_frame) {
  const Clip previous = sample_target(grid, segment1.cam_path, segment1.time_path);
  const Clip target = sample_target(grid, segment2.cam_path, segment2.time_path);
  PairSample pair = make_pair(source, target, reference_frame);
  pair.previous = rebased(previous, source.cameras[static_cast<std::size_t>(reference_frame - 1)]);
  pair.spec = {{"segment1", {{"cam_path", segment1.cam_path}, {"time_path", segment1.time_path}}},
               {"segment2", {{"cam_path", segment2.cam_path}, {"time_path", segment2.time_path}}}};
  check_pair(pair);
  return pair;
}

}  // namespace stpilot::griddata
