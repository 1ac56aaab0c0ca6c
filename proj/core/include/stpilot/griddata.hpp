#pragma once

// Source/target pair sampling from a rendered camera x time grid, and the
// on-disk dataset format.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpilot/geometry.hpp"
#include "stpilot/image.hpp"
#include "stpilot/scenesim.hpp"
#include "stpilot/timewarp.hpp"

namespace stpilot::griddata {

using geometry::Trajectory;
using timewarp::TimeSignal;

/// A video with its per-frame cameras and animation times.
struct Clip {
  FrameSequence frames;
  Trajectory cameras;
  TimeSignal times{{1.0}, 1};

  std::size_t size() const { return frames.size(); }
  bool operator==(const Clip&) const = default;
};

struct PairSample {
  std::string id;
  Clip source;
  Clip target;
  std::optional<Clip> previous;
  /// Source frame (1-based) whose camera is the identity after rebasing.
  int reference_frame = 1;
  std::optional<timewarp::WarpSpec> warp;
  std::uint64_t seed = 0;
  /// Free-form description of how the sample was drawn (paths, options).
  nlohmann::json spec = nlohmann::json::object();

  bool operator==(const PairSample&) const = default;
};

/// Throws Error{ShapeMismatch} unless every clip has equal frame, camera and
/// time counts.
void check_pair(const PairSample& pair);

/// Diagonal cells (start, start) ... (start+F-1, start+F-1). Times are the
/// grid's time values on those columns.
Clip sample_diagonal_source(const scenesim::Grid& grid, int start, int frames);

/// Frame f is grid cell (cam_path[f], time_path[f]); 1-based indices. Paths
/// may repeat or go backwards.
Clip sample_target(const scenesim::Grid& grid, std::span<const int> cam_path,
                   std::span<const int> time_path);

/// Builds a pair with every trajectory re-expressed relative to the source
/// camera at `reference_frame`.
PairSample make_pair(const Clip& source, const Clip& target, int reference_frame = 1);

/// Temporally warps a synchronized (source, target) multi-view pair. Both
/// clips must share the forward time signal 1..F. Target frame f and its
/// camera become the original target's frame round(tau(f)); target times
/// become tau exactly.
PairSample make_warped_pair(const Clip& source, const Clip& target, const timewarp::WarpSpec& warp,
                            int reference_frame = 1);

struct SegmentSpec {
  std::vector<int> cam_path;
  std::vector<int> time_path;
};

/// Two-source conditioning sample: `previous` is segment 1, `target` is
/// segment 2, and all cameras are relative to the source reference frame.
PairSample make_memory_pair(const scenesim::Grid& grid, const Clip& source,
                            const SegmentSpec& segment1, const SegmentSpec& segment2,
                            int reference_frame = 1);

/// Layout: manifest.json plus samples/{id}/{source,target,previous}/fNNN.png
/// and samples/{id}/pair.json. The manifest lists every file's SHA-256.
void write_dataset(const std::vector<PairSample>& samples, const std::filesystem::path& dir);
/// Verifies every checksum; a mismatch throws Error{Checksum} naming the file.
std::vector<PairSample> read_dataset(const std::filesystem::path& dir);

}  // namespace stpilot::griddata
