#include "stpilot/arplan.hpp"

#include <cstdio>
#include <fstream>

#include "stpilot/error.hpp"
#include "stpilot/trajectory_io.hpp"

namespace stpilot::arplan {
namespace fs = std::filesystem;
namespace {

std::string segment_file(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "segment_%03d.txt", index);
  return buf;
}

Trajectory to_global(const Segment& s) { return geometry::rebase_to_pose(s.cameras, geometry::invert(s.anchor)); }

}  // namespace

std::string_view to_string(Reference r) {
  return r == Reference::SourceFrame ? "source-frame" : "previous-end";
}

Reference parse_reference(std::string_view name) {
  if (name == "source-frame") return Reference::SourceFrame;
  if (name == "previous-end") return Reference::PreviousEnd;
  fail(ErrorKind::InvalidArgument,
       "unknown reference '" + std::string(name) + "' (expected source-frame or previous-end)");
}

int SegmentPlan::padded_length() const {
  const int n = static_cast<int>(segments.size());
  return n == 0 ? 0 : (n - 1) * (segment_frames - 1) + segment_frames;
}

int segment_count(int length, int segment_frames) {
  require(segment_frames >= 2, ErrorKind::InvalidArgument, "segments need at least 2 frames");
  require(length >= 1, ErrorKind::InvalidArgument, "length must be >= 1");
  const int step = segment_frames - 1;
  return std::max(1, (length - 1 + step - 1) / step);
}

Trajectory padded_cameras(const Trajectory& cameras, int padded_length) {
  geometry::check_trajectory(cameras);
  Trajectory out = cameras;
  out.resize(std::max<std::size_t>(cameras.size(), static_cast<std::size_t>(padded_length)), cameras.back());
  return out;
}

TimeSignal padded_times(const TimeSignal& times, int padded_length) {
  std::vector<double> v(times.values().begin(), times.values().end());
  v.resize(std::max<std::size_t>(v.size(), static_cast<std::size_t>(padded_length)), v.back());
  return {std::move(v), times.horizon()};
}

SegmentPlan plan_segments(const Trajectory& cameras, const TimeSignal& times, int segment_frames,
                          Reference reference) {
  require(segment_frames >= 2, ErrorKind::InvalidArgument, "segments need at least 2 frames");
  geometry::check_trajectory(cameras);
  require(cameras.size() == times.size(), ErrorKind::ShapeMismatch,
          "trajectory has " + std::to_string(cameras.size()) + " poses, time signal " +
              std::to_string(times.size()) + " values");
  const int length = static_cast<int>(cameras.size());
  require(length >= segment_frames, ErrorKind::InvalidArgument,
          "trajectory length " + std::to_string(length) + " is shorter than the segment length " +
              std::to_string(segment_frames));

  SegmentPlan plan;
  plan.length = length;
  plan.segment_frames = segment_frames;
  plan.reference = reference;
  const int n = segment_count(length, segment_frames);
  const int padded = (n - 1) * (segment_frames - 1) + segment_frames;
  const Trajectory cams = padded_cameras(cameras, padded);
  const TimeSignal ts = padded_times(times, padded);

  for (int i = 1; i <= n; ++i) {
    Segment s;
    s.index = i;
    s.first = (i - 1) * (segment_frames - 1) + 1;
    s.last = s.first + segment_frames - 1;
    s.held_frames = std::max(0, s.last - length);
    const auto begin = static_cast<std::size_t>(s.first - 1);
    const auto end = static_cast<std::size_t>(s.last);
    const Trajectory slice(cams.begin() + static_cast<std::ptrdiff_t>(begin),
                           cams.begin() + static_cast<std::ptrdiff_t>(end));
    s.anchor = reference == Reference::SourceFrame ? cams.front() : slice.front();
    s.cameras = geometry::rebase_to_pose(slice, s.anchor);
    if (reference == Reference::PreviousEnd || i == 1) s.cameras.front() = Pose::identity();
    s.times = TimeSignal(std::vector<double>(ts.values().begin() + static_cast<std::ptrdiff_t>(begin),
                                             ts.values().begin() + static_cast<std::ptrdiff_t>(end)),
                         ts.horizon());
    if (i > 1) s.previous = i - 1;
    plan.segments.push_back(std::move(s));
  }
  return plan;
}

std::optional<ContinuityViolation> ContinuityReport::first() const {
  if (violations.empty()) return std::nullopt;
  return violations.front();
}

ContinuityReport check_continuity(const SegmentPlan& plan, const Trajectory& cameras,
                                  const TimeSignal& times) {
  ContinuityReport report;
  const int padded = plan.padded_length();
  const Trajectory cams = padded_cameras(cameras, padded);
  const TimeSignal ts = padded_times(times, padded);

  auto add = [&](int segment, int frame, double rot, double trans, std::string what) {
    report.violations.push_back({segment, frame, rot, trans, std::move(what)});
  };

  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const Segment& cur = plan.segments[k];
    const int expected_first = static_cast<int>(k) * (plan.segment_frames - 1) + 1;
    if (cur.first != expected_first || cur.last - cur.first + 1 != plan.segment_frames ||
        static_cast<int>(cur.cameras.size()) != plan.segment_frames ||
        static_cast<int>(cur.times.size()) != plan.segment_frames) {
      add(cur.index, cur.first, 0.0, 0.0, "segment window does not tile the trajectory");
      continue;
    }
    if (k == 0) {
      if (cur.previous) add(cur.index, cur.first, 0.0, 0.0, "first segment has a previous reference");
      continue;
    }
    const Segment& prev = plan.segments[k - 1];
    if (cur.previous != prev.index) {
      add(cur.index, cur.first, 0.0, 0.0, "segment does not reference its predecessor");
    }
    const Pose end_prev = geometry::compose(prev.cameras.back(), prev.anchor);
    const Pose start_cur = geometry::compose(cur.cameras.front(), cur.anchor);
    const Pose& global = cams[static_cast<std::size_t>(cur.first - 1)];
    const double rot = std::max(geometry::rot_err_deg(end_prev, start_cur),
                                geometry::rot_err_deg(start_cur, global));
    const double trans = std::max(geometry::trans_err(end_prev, start_cur),
                                  geometry::trans_err(start_cur, global));
    if (rot > kContinuityTolerance || trans > kContinuityTolerance) {
      add(cur.index, cur.first, rot, trans, "boundary pose mismatch");
    }
    const double t_global = ts[static_cast<std::size_t>(cur.first - 1)];
    if (prev.times[prev.times.size() - 1] != cur.times[0] || cur.times[0] != t_global) {
      add(cur.index, cur.first, rot, trans, "boundary time mismatch");
    }
  }
  return report;
}

Trajectory stitch_cameras(const SegmentPlan& plan) {
  Trajectory out;
  for (const auto& s : plan.segments) {
    const Trajectory g = to_global(s);
    out.insert(out.end(), g.begin() + (out.empty() ? 0 : 1), g.end());
  }
  return out;
}

TimeSignal stitch_times(const SegmentPlan& plan) {
  require(!plan.segments.empty(), ErrorKind::InvalidArgument, "plan has no segments");
  std::vector<double> out;
  for (const auto& s : plan.segments) {
    out.insert(out.end(), s.times.values().begin() + (out.empty() ? 0 : 1), s.times.values().end());
  }
  return {std::move(out), plan.segments.front().times.horizon()};
}

Trajectory rebase_segment(const SegmentPlan& plan, int i, Reference reference) {
  require(i >= 1 && i <= static_cast<int>(plan.segments.size()), ErrorKind::OutOfRange,
          "segment " + std::to_string(i) + " outside 1.." + std::to_string(plan.segments.size()));
  const Segment& s = plan.segments[static_cast<std::size_t>(i - 1)];
  if (reference == Reference::PreviousEnd) return geometry::rebase_to_frame(s.cameras, 1);
  // Global frame 1 in this segment's local convention.
  const Segment& first = plan.segments.front();
  const Pose source = geometry::compose(first.cameras.front(), first.anchor);
  return geometry::rebase_to_pose(to_global(s), source);
}

nlohmann::json to_json(const SegmentPlan& plan) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : plan.segments) {
    segs.push_back({{"index", s.index},
                    {"window", {s.first, s.last}},
                    {"held_frames", s.held_frames},
                    {"trajectory", segment_file(s.index)},
                    {"anchor", s.anchor.row_major()},
                    {"times", timewarp::to_json(s.times)},
                    {"conditioning",
                     {{"source", "source"},
                      {"previous", s.previous ? nlohmann::json(*s.previous) : nlohmann::json()}}}});
  }
  return {{"format", "stpilot-ar-plan"},
          {"version", 1},
          {"length", plan.length},
          {"segment_frames", plan.segment_frames},
          {"padded_length", plan.padded_length()},
          {"padding", "hold final pose and time"},
          {"reference", to_string(plan.reference)},
          {"segments", segs}};
}

void write_plan(const fs::path& dir, const SegmentPlan& plan) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& s : plan.segments) geometry::write_trajectory(dir / segment_file(s.index), s.cameras);
  std::ofstream out(dir / "plan.json");
  out << to_json(plan).dump(2) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + (dir / "plan.json").string());
}

SegmentPlan read_plan(const fs::path& dir) {
  const fs::path path = dir / "plan.json";
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "missing " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    require(j.at("format") == "stpilot-ar-plan", ErrorKind::Io, path.string() + " is not a plan");
    SegmentPlan plan;
    plan.length = j.at("length").get<int>();
    plan.segment_frames = j.at("segment_frames").get<int>();
    plan.reference = parse_reference(j.at("reference").get<std::string>());
    for (const auto& js : j.at("segments")) {
      Segment s;
      s.index = js.at("index").get<int>();
      s.first = js.at("window").at(0).get<int>();
      s.last = js.at("window").at(1).get<int>();
      s.held_frames = js.at("held_frames").get<int>();
      s.cameras = geometry::read_trajectory(dir / js.at("trajectory").get<std::string>());
      s.anchor = geometry::Pose::from_row_major(js.at("anchor").get<std::vector<double>>());
      s.times = timewarp::time_signal_from_json(js.at("times"));
      const auto& prev = js.at("conditioning").at("previous");
      if (!prev.is_null()) s.previous = prev.get<int>();
      plan.segments.push_back(std::move(s));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "malformed " + path.string() + ": " + e.what());
  }
}

}  // namespace stpilot::arplan
