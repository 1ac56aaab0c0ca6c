#include "stpilot/scenesim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "stpilot/checksum.hpp"
#include "stpilot/error.hpp"
#include "raytrace.hpp"

namespace stpilot::scenesim {
namespace {

using detail::Hit;
using detail::trace;

constexpr double kPi = 3.14159265358979323846;
std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Vec3 vec_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  require(v.size() == 3, ErrorKind::InvalidArgument, "expected a 3-vector");
  return {v[0], v[1], v[2]};
}

nlohmann::json vec_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Vec3 Primitive::center_at(double t) const {
  if (path.empty()) return Vec3::Zero();
  if (t <= path.front().time) return path.front().center;
  if (t >= path.back().time) return path.back().center;
  const auto it = std::upper_bound(path.begin(), path.end(), t,
                                   [](double v, const Keyframe& k) { return v < k.time; });
  const Keyframe& b = *it;
  const Keyframe& a = *(it - 1);
  const double u = (t - a.time) / (b.time - a.time);
  return a.center + u * (b.center - a.center);
}

bool SceneSpec::is_static() const {
  for (const auto& p : primitives) {
    for (const auto& k : p.path) {
      if (k.center != p.path.front().center) return false;
    }
  }
  return true;
}

void validate(const SceneSpec& scene) {
  require(scene.anim_frames >= 2, ErrorKind::InvalidArgument, "scene needs anim_frames >= 2");
  require(scene.subject >= 0 && scene.subject < static_cast<int>(scene.primitives.size()),
          ErrorKind::InvalidArgument, "subject index does not name a primitive");
  require(scene.light_dir.allFinite() && scene.light_dir.norm() > 0.0, ErrorKind::InvalidArgument,
          "light direction must be nonzero");
  for (const auto& p : scene.primitives) {
    require(!p.path.empty(), ErrorKind::InvalidArgument, "primitive has no keyframes");
    for (std::size_t i = 0; i < p.path.size(); ++i) {
      require(p.path[i].center.allFinite() && std::isfinite(p.path[i].time),
              ErrorKind::InvalidArgument, "keyframe has non-finite values");
      if (i > 0) {
        require(p.path[i].time > p.path[i - 1].time, ErrorKind::InvalidArgument,
                "keyframe times must increase");
      }
    }
    if (p.shape == Shape::Sphere) {
      require(p.radius > 0.0, ErrorKind::InvalidArgument, "sphere radius must be > 0");
    } else {
      require((p.half_extents.array() > 0.0).all(), ErrorKind::InvalidArgument,
              "box extents must be > 0");
    }
  }
}

Pose look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 fwd = target - eye;
  require(fwd.norm() > 1e-12, ErrorKind::InvalidArgument, "camera coincides with its look-at point");
  const Vec3 z = fwd.normalized();
  Vec3 up = Vec3::UnitY();
  if (z.cross(up).norm() < 1e-9) up = Vec3::UnitZ();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  geometry::Mat3 r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  r = geometry::nearest_rotation(r);
  return {r, -(r * eye)};
}

Trajectory make_trajectory(const CameraPathSpec& spec) {
  require(spec.frames >= 2, ErrorKind::InvalidArgument, "camera path needs at least 2 frames");
  require(spec.intrinsics.width >= 8 && spec.intrinsics.height >= 8 && spec.intrinsics.focal > 0,
          ErrorKind::InvalidArgument, "image must be at least 8x8 with positive focal length");
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(spec.frames));
  const double last = spec.frames - 1;
  switch (spec.family) {
    case PathFamily::Orbit: {
      require(spec.radius > 0.0, ErrorKind::InvalidArgument, "orbit radius must be > 0");
      require(spec.span_deg != 0.0, ErrorKind::InvalidArgument, "orbit span is zero");
      const bool closed = std::abs(std::abs(spec.span_deg) - 360.0) < 1e-12;
      const double denom = closed ? spec.frames : last;
      for (int i = 0; i < spec.frames; ++i) {
        const double a = (spec.start_deg + spec.span_deg * i / denom) * kPi / 180.0;
        const Vec3 eye = spec.target + Vec3(spec.radius * std::cos(a), spec.height,
                                            spec.radius * std::sin(a));
        traj.push_back(look_at(eye, spec.target));
      }
      break;
    }
    case PathFamily::Linear: {
      const Vec3 dir = spec.end - spec.start;
      require(dir.norm() > 1e-12, ErrorKind::InvalidArgument, "linear path has zero length");
      for (int i = 0; i < spec.frames; ++i) {
        const Vec3 eye = spec.start + (i / last) * dir;
        traj.push_back(look_at(eye, eye + dir));
      }
      break;
    }
    case PathFamily::Arc: {
      require((spec.end - spec.start).norm() + (spec.control - spec.start).norm() > 1e-12,
              ErrorKind::InvalidArgument, "arc path has zero length");
      for (int i = 0; i < spec.frames; ++i) {
        const double u = i / last;
        const Vec3 eye = (1 - u) * (1 - u) * spec.start + 2 * u * (1 - u) * spec.control +
                         u * u * spec.end;
        traj.push_back(look_at(eye, spec.target));
      }
      break;
    }
  }
  return traj;
}

Image render_frame(const SceneSpec& scene, const Pose& pose, double t, const Intrinsics& intr) {
  require(std::isfinite(t) && t >= 1.0 && t <= scene.anim_frames, ErrorKind::OutOfRange,
          "animation time " + std::to_string(t) + " outside [1, " +
              std::to_string(scene.anim_frames) + "]");
  require(intr.width > 0 && intr.height > 0 && intr.focal > 0, ErrorKind::InvalidArgument,
          "bad intrinsics");
  std::vector<Vec3> centers;
  centers.reserve(scene.primitives.size());
  for (const auto& p : scene.primitives) centers.push_back(p.center_at(t));

  const Vec3 light = scene.light_dir.normalized();
  const geometry::Mat3 rt = pose.rotation().transpose();
  const Vec3 origin = pose.camera_center();
  const double cx = 0.5 * intr.width;
  const double cy = 0.5 * intr.height;

  Image img(intr.width, intr.height);
  for (int y = 0; y < intr.height; ++y) {
    for (int x = 0; x < intr.width; ++x) {
      const Vec3 dir_cam((x + 0.5 - cx) / intr.focal, (y + 0.5 - cy) / intr.focal, 1.0);
      const Vec3 dir = (rt * dir_cam).normalized();
      const Hit hit = trace(scene, centers, origin, dir);
      Vec3 color = scene.background;
      if (hit.primitive != -2) {
        Vec3 albedo;
        if (hit.primitive == -1) {
          const Vec3 p = origin + hit.t * dir;
          const bool odd = (static_cast<long>(std::floor(p.x())) + static_cast<long>(std::floor(p.z()))) & 1;
          albedo = scene.ground_albedo * (odd ? 0.6 : 1.0);
        } else {
          albedo = scene.primitives[static_cast<std::size_t>(hit.primitive)].albedo;
        }
        const double lambert = std::max(0.0, hit.normal.dot(light));
        color = albedo * (scene.ambient + (1.0 - scene.ambient) * lambert);
      }
      std::uint8_t* px = img.at(x, y);
      px[0] = quantize(color.x());
      px[1] = quantize(color.y());
      px[2] = quantize(color.z());
    }
  }
  return img;
}

const Image& Grid::cell(int camera, int time) const {
  require(camera >= 1 && camera <= camera_count() && time >= 1 && time <= time_count(),
          ErrorKind::OutOfRange,
          "grid cell (" + std::to_string(camera) + ", " + std::to_string(time) + ") outside " +
              std::to_string(camera_count()) + "x" + std::to_string(time_count()));
  return cells[static_cast<std::size_t>(camera - 1) * times.size() + static_cast<std::size_t>(time - 1)];
}

Grid render_grid(const SceneSpec& scene, const Trajectory& traj, const std::vector<double>& times,
                 const Intrinsics& intr, int threads) {
  validate(scene);
  geometry::check_trajectory(traj);
  require(!times.empty(), ErrorKind::InvalidArgument, "grid needs at least one time");
  for (double t : times) {
    require(t >= 1.0 && t <= scene.anim_frames, ErrorKind::OutOfRange,
            "grid time " + std::to_string(t) + " outside the animation range");
  }
  Grid grid{traj, times, intr, std::vector<Image>(traj.size() * times.size())};

  const std::size_t total = grid.cells.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      grid.cells[i] = render_frame(scene, traj[i / times.size()], times[i % times.size()], intr);
    }
  };
  int n = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), total));
  std::vector<std::jthread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();  // join before the grid is moved out
  return grid;
}

// ---- JSON -------------------------------------------------------------------

nlohmann::json to_json(const SceneSpec& scene) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& p : scene.primitives) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& k : p.path) path.push_back({{"t", k.time}, {"center", vec_to_json(k.center)}});
    nlohmann::json jp{{"shape", p.shape == Shape::Sphere ? "sphere" : "box"},
                      {"albedo", vec_to_json(p.albedo)},
                      {"path", path}};
    if (p.shape == Shape::Sphere) {
      jp["radius"] = p.radius;
    } else {
      jp["half_extents"] = vec_to_json(p.half_extents);
    }
    prims.push_back(jp);
  }
  return {{"primitives", prims},
          {"subject", scene.subject},
          {"anim_frames", scene.anim_frames},
          {"ground_plane", scene.ground_plane},
          {"ground_height", scene.ground_height},
          {"ground_albedo", vec_to_json(scene.ground_albedo)},
          {"light_dir", vec_to_json(scene.light_dir)},
          {"ambient", scene.ambient},
          {"background", vec_to_json(scene.background)}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  try {
    SceneSpec s;
    for (const auto& jp : j.at("primitives")) {
      Primitive p;
      const auto shape = jp.at("shape").get<std::string>();
      require(shape == "sphere" || shape == "box", ErrorKind::InvalidArgument,
              "unknown primitive shape '" + shape + "'");
      p.shape = shape == "sphere" ? Shape::Sphere : Shape::Box;
      if (p.shape == Shape::Sphere) {
        p.radius = jp.at("radius").get<double>();
      } else {
        p.half_extents = vec_from_json(jp.at("half_extents"));
      }
      if (jp.contains("albedo")) p.albedo = vec_from_json(jp.at("albedo"));
      if (jp.contains("path")) {
        for (const auto& k : jp.at("path")) p.path.push_back({k.at("t").get<double>(), vec_from_json(k.at("center"))});
      } else {
        p.path.push_back({1.0, vec_from_json(jp.at("center"))});
      }
      s.primitives.push_back(std::move(p));
    }
    s.subject = j.value("subject", 0);
    s.anim_frames = j.value("anim_frames", s.anim_frames);
    s.ground_plane = j.value("ground_plane", s.ground_plane);
    s.ground_height = j.value("ground_height", s.ground_height);
    if (j.contains("ground_albedo")) s.ground_albedo = vec_from_json(j.at("ground_albedo"));
    if (j.contains("light_dir")) s.light_dir = vec_from_json(j.at("light_dir"));
    s.ambient = j.value("ambient", s.ambient);
    if (j.contains("background")) s.background = vec_from_json(j.at("background"));
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad scene JSON: ") + e.what());
  }
}

nlohmann::json to_json(const Intrinsics& intr) {
  return {{"focal", intr.focal}, {"width", intr.width}, {"height", intr.height}};
}

Intrinsics intrinsics_from_json(const nlohmann::json& j) {
  Intrinsics intr;
  intr.focal = j.value("focal", intr.focal);
  intr.width = j.value("width", intr.width);
  intr.height = j.value("height", intr.height);
  return intr;
}

nlohmann::json to_json(const CameraPathSpec& spec) {
  const char* family = spec.family == PathFamily::Orbit    ? "orbit"
                       : spec.family == PathFamily::Linear ? "linear"
                                                           : "arc";
  return {{"family", family},
          {"frames", spec.frames},
          {"intrinsics", to_json(spec.intrinsics)},
          {"target", vec_to_json(spec.target)},
          {"radius", spec.radius},
          {"height", spec.height},
          {"start_deg", spec.start_deg},
          {"span_deg", spec.span_deg},
          {"start", vec_to_json(spec.start)},
          {"end", vec_to_json(spec.end)},
          {"control", vec_to_json(spec.control)}};
}

CameraPathSpec camera_path_from_json(const nlohmann::json& j) {
  try {
    CameraPathSpec s;
    const auto family = j.value("family", std::string("orbit"));
    if (family == "orbit") {
      s.family = PathFamily::Orbit;
    } else if (family == "linear") {
      s.family = PathFamily::Linear;
    } else if (family == "arc") {
      s.family = PathFamily::Arc;
    } else {
      fail(ErrorKind::InvalidArgument, "unknown camera path family '" + family + "'");
    }
    s.frames = j.value("frames", s.frames);
    if (j.contains("intrinsics")) s.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    if (j.contains("target")) s.target = vec_from_json(j.at("target"));
    s.radius = j.value("radius", s.radius);
    s.height = j.value("height", s.height);
    s.start_deg = j.value("start_deg", s.start_deg);
    s.span_deg = j.value("span_deg", s.span_deg);
    if (j.contains("start")) s.start = vec_from_json(j.at("start"));
    if (j.contains("end")) s.end = vec_from_json(j.at("end"));
    if (j.contains("control")) s.control = vec_from_json(j.at("control"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad camera path JSON: ") + e.what());
  }
}

std::string scene_hash(const SceneSpec& scene) { return sha256_hex(to_json(scene).dump()); }

SceneSpec demo_scene(int anim_frames) {
  require(anim_frames >= 2, ErrorKind::InvalidArgument, "demo scene needs anim_frames >= 2");
  const double f = anim_frames;
  SceneSpec s;
  s.anim_frames = anim_frames;

  Primitive subject;
  subject.radius = 1.0;
  subject.albedo = Vec3(0.9, 0.35, 0.2);
  subject.path = {{1.0, Vec3(-1.5, 1.0, 0.0)},
                  {1.0 + 0.25 * (f - 1), Vec3(0.0, 2.0, 0.5)},
                  {1.0 + 0.5 * (f - 1), Vec3(1.5, 1.0, 0.0)},
                  {1.0 + 0.75 * (f - 1), Vec3(0.0, 1.5, -0.5)},
                  {f, Vec3(-1.5, 1.0, 0.0)}};

  Primitive crate;
  crate.shape = Shape::Box;
  crate.half_extents = Vec3(0.6, 0.6, 0.6);
  crate.albedo = Vec3(0.25, 0.5, 0.85);
  crate.path = {{1.0, Vec3(-3.0, 0.6, -4.0)}, {f, Vec3(3.0, 0.6, -4.0)}};

  Primitive post;
  post.radius = 0.8;
  post.albedo = Vec3(0.3, 0.8, 0.35);
  post.path = {{1.0, Vec3(-3.0, 0.8, -2.5)}};

  s.primitives = {subject, crate, post};
  s.subject = 0;
  return s;
}

}  // namespace stpilot::scenesim
