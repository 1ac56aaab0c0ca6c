#pragma once

// Splits a long camera/time trajectory into fixed-length autoregressive
// segments that share exactly one boundary frame with their neighbours.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpilot/geometry.hpp"
#include "stpilot/timewarp.hpp"

namespace stpilot::arplan {

using geometry::Pose;
using geometry::Trajectory;
using timewarp::TimeSignal;

/// Which pose a segment's local cameras are expressed relative to.
enum class Reference {
  SourceFrame,  ///< global frame 1 (the original source's first frame)
  PreviousEnd,  ///< the segment's own first frame, i.e. the previous segment's last
};

std::string_view to_string(Reference r);
Reference parse_reference(std::string_view name);

struct Segment {
  int index = 1;  ///< 1-based
  int first = 1;  ///< global window, inclusive; may extend past the input length
  int last = 1;
  int held_frames = 0;  ///< trailing frames that repeat the final input pose/time
  Trajectory cameras;   ///< local: global_f = cameras_f ∘ anchor
  TimeSignal times{{1.0}, 1};
  Pose anchor;
  std::optional<int> previous;  ///< segment conditioned on besides the source

  bool operator==(const Segment&) const = default;
};

struct SegmentPlan {
  int length = 0;          ///< L, frames in the input
  int segment_frames = 0;  ///< F_seg
  Reference reference = Reference::PreviousEnd;
  std::vector<Segment> segments;

  /// Covered length after padding: (N-1)(F_seg-1) + F_seg.
  int padded_length() const;
  bool operator==(const SegmentPlan&) const = default;
};

/// max(1, ceil((L-1)/(F_seg-1))).
int segment_count(int length, int segment_frames);

/// Throws Error{InvalidArgument} when L < F_seg or F_seg < 2, and
/// Error{ShapeMismatch} when the camera and time lengths differ.
SegmentPlan plan_segments(const Trajectory& cameras, const TimeSignal& times, int segment_frames,
                          Reference reference = Reference::PreviousEnd);

/// Input signals extended to the padded length by holding the final entry.
Trajectory padded_cameras(const Trajectory& cameras, int padded_length);
TimeSignal padded_times(const TimeSignal& times, int padded_length);

struct ContinuityViolation {
  int segment = 0;  ///< the later segment of the failing boundary
  int frame = 0;    ///< global frame number
  double rot_err_deg = 0.0;
  double trans_err = 0.0;
  std::string what;
};

struct ContinuityReport {
  std::vector<ContinuityViolation> violations;

  bool ok() const { return violations.empty(); }
  std::optional<ContinuityViolation> first() const;
};

inline constexpr double kContinuityTolerance = 1e-9;

/// Checks window tiling and, at every shared boundary frame, that both
/// segments reconstruct the same global pose (within 1e-9) as the global
/// input and carry exactly the same time.
ContinuityReport check_continuity(const SegmentPlan& plan, const Trajectory& cameras,
                                  const TimeSignal& times);

/// Concatenates the segments' global poses/times, dropping each duplicated
/// boundary frame. Length is plan.padded_length().
Trajectory stitch_cameras(const SegmentPlan& plan);
TimeSignal stitch_times(const SegmentPlan& plan);

/// Segment `i` (1-based) re-expressed relative to the chosen reference.
Trajectory rebase_segment(const SegmentPlan& plan, int i, Reference reference);

nlohmann::json to_json(const SegmentPlan& plan);

/// plan.json plus segment_NNN.txt trajectory files.
void write_plan(const std::filesystem::path& dir, const SegmentPlan& plan);
SegmentPlan read_plan(const std::filesystem::path& dir);

}  // namespace stpilot::arplan
