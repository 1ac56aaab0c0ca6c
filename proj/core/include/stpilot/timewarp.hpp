#pragma once

// Temporal warping: functions tau mapping output frame f in [1, F] to an
// animation time in [1, F], and their application to frame sequences.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpilot/error.hpp"

namespace stpilot::timewarp {

/// Per-frame animation timestamps in source-frame units. Every value lies in
/// [1, horizon], where horizon is the frame count of the source material.
class TimeSignal {
 public:
  TimeSignal(std::vector<double> values, int horizon);

  /// 1, 2, ..., frames.
  static TimeSignal forward(int frames);

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  int horizon() const noexcept { return horizon_; }

  bool operator==(const TimeSignal&) const = default;

 private:
  std::vector<double> values_;
  int horizon_;
};

enum class WarpKind { Identity, Reverse, Accelerate, Freeze, SlowSegment, Zigzag };

inline constexpr WarpKind kAllWarpKinds[] = {WarpKind::Identity,   WarpKind::Reverse,
                                             WarpKind::Accelerate, WarpKind::Freeze,
                                             WarpKind::SlowSegment, WarpKind::Zigzag};

std::string_view to_string(WarpKind kind);
WarpKind parse_warp_kind(std::string_view name);

struct Identity {
  bool operator==(const Identity&) const = default;
};
struct Reverse {
  bool operator==(const Reverse&) const = default;
};
/// tau(f) = min(1 + factor*(f-1), F); saturates at F instead of wrapping.
struct Accelerate {
  double factor = 2.0;
  bool operator==(const Accelerate&) const = default;
};
struct Freeze {
  double at = 1.0;
  bool operator==(const Freeze&) const = default;
};
/// Normal speed up to `start`, `factor` speed over output frames
/// [start, end], then normal speed again from wherever the slow part ended.
struct SlowSegment {
  int start = 1;
  int end = 2;
  double factor = 0.5;
  bool operator==(const SlowSegment&) const = default;
};
/// Triangle wave starting at 1: rises for period/2 frames, falls back for
/// period/2 frames, repeats. Values are clamped to F.
struct Zigzag {
  int period = 8;
  bool operator==(const Zigzag&) const = default;
};

using WarpParams = std::variant<Identity, Reverse, Accelerate, Freeze, SlowSegment, Zigzag>;

WarpKind kind_of(const WarpParams& params);

struct WarpSpec {
  WarpParams params;
  int frames = 1;
  std::uint64_t seed = 0;

  WarpKind kind() const { return kind_of(params); }
  bool operator==(const WarpSpec&) const = default;
};

/// Parameter ranges used by sample_warp.
struct WarpRanges {
  double accelerate_min = 1.25;
  double accelerate_max = 3.0;
  double slow_min = 0.25;
  double slow_max = 0.8;
  int zigzag_period_min = 8;
  int zigzag_period_max = 40;
};

/// Throws Error{InvalidArgument} when a parameter is outside its range.
void validate(const WarpSpec& spec);

/// t_trg = tau(t_src) with t_src = 1..F.
TimeSignal eval_warp(const WarpSpec& spec);

/// Draws a valid spec from `families` (order-insensitive), deterministically
/// from `seed`.
WarpSpec sample_warp(std::uint64_t seed, int frames, std::span<const WarpKind> families,
                     const WarpRanges& ranges = {});

struct Classification {
  std::optional<WarpParams> params;  ///< empty for freeform signals

  bool freeform() const noexcept { return !params.has_value(); }
  std::string label() const;
};

/// Recovers the canonical warp that produced `signal`, comparing within 1e-9.
Classification classify_signal(const TimeSignal& signal);

/// 1-based nearest source frame for a real timestamp (half rounds up).
inline int nearest_frame(double t) { return static_cast<int>(std::floor(t + 0.5)); }

/// Output frame f is input frame round(signal[f]). The signal must have one
/// entry per input frame and stay within [1, frames.size()].
template <class Frame>
std::vector<Frame> apply_warp_frames(std::span<const Frame> frames, const TimeSignal& signal) {
  require(signal.size() == frames.size(), ErrorKind::ShapeMismatch,
          "warp signal has " + std::to_string(signal.size()) + " entries for " +
              std::to_string(frames.size()) + " frames");
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (double t : signal.values()) {
    const int src = nearest_frame(t);
    require(src >= 1 && src <= static_cast<int>(frames.size()), ErrorKind::OutOfRange,
            "warp time " + std::to_string(t) + " outside the frame range");
    out.push_back(frames[static_cast<std::size_t>(src - 1)]);
  }
  return out;
}

template <class Frame>
std::vector<Frame> apply_warp_frames(const std::vector<Frame>& frames, const TimeSignal& signal) {
  return apply_warp_frames(std::span<const Frame>(frames), signal);
}

nlohmann::json to_json(const WarpSpec& spec);
WarpSpec warp_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WarpRanges& ranges);
WarpRanges warp_ranges_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TimeSignal& signal);
/// Accepts a bare array (horizon = max(length, ceil(max value))) or an object
/// {"values": [...], "horizon": N}.
TimeSignal time_signal_from_json(const nlohmann::json& j);

}  // namespace stpilot::timewarp
