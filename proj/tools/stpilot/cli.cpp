#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "stpilot/arplan.hpp"
#include "stpilot/error.hpp"
#include "stpilot/evalh.hpp"
#include "stpilot/gradcheck.hpp"
#include "stpilot/griddata.hpp"
#include "stpilot/rng.hpp"
#include "stpilot/scenesim.hpp"
#include "stpilot/timewarp.hpp"
#include "stpilot/trajectory_io.hpp"

namespace stpilot::cli {
namespace fs = std::filesystem;
namespace {

/// A problem with the command line itself (maps to exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "unreadable JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
}

std::vector<int> int_list(const nlohmann::json& j, const std::string& what) {
  try {
    return j.get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::InvalidArgument, what + " must be an array of integers");
  }
}

/// round(a + (b - a) (f - 1) / (F - 1)) for f = 1..F.
std::vector<int> linear_path(int a, int b, int frames) {
  std::vector<int> out(static_cast<std::size_t>(frames), a);
  if (frames == 1) return out;
  for (int f = 0; f < frames; ++f) {
    const double v = a + static_cast<double>(b - a) * f / (frames - 1);
    out[static_cast<std::size_t>(f)] = timewarp::nearest_frame(v);
  }
  return out;
}

std::string config_string(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

/// Fills options that were not given on the command line from the config
/// object, so flags always win over the file.
void apply_config(const nlohmann::json& cfg, const std::vector<CLI::Option*>& options) {
  for (CLI::Option* opt : options) {
    const std::string& name = opt->get_single_name();
    if (name.empty() || opt->count() > 0 || !cfg.contains(name)) continue;
    const auto& v = cfg.at(name);
    if (v.is_array()) {
      std::vector<std::string> items;
      for (const auto& e : v) items.push_back(config_string(e));
      opt->add_result(items);
    } else {
      opt->add_result(config_string(v));
    }
    opt->run_callback();
  }
}

nlohmann::json resolved_config(const std::string& command, const std::vector<CLI::Option*>& options) {
  nlohmann::json j{{"command", command}};
  for (const CLI::Option* opt : options) {
    const std::string& name = opt->get_single_name();
    if (name.empty() || name == "config" || name == "help") continue;
    const auto& res = opt->results();
    if (!res.empty()) {
      j[name] = opt->get_expected_max() > 1 ? nlohmann::json(res) : nlohmann::json(res.back());
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void require_set(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError("missing required option --" + flag);
}

// ---- render-grid ------------------------------------------------------------

struct RenderGridArgs {
  std::string scene;
  std::string campath;
  std::string out;
  int frames = 0;
  int times = 0;
  int width = 0;
  int height = 0;
  double focal = 0.0;
  bool force = false;
};

scenesim::CameraPathSpec default_camera_path() {
  scenesim::CameraPathSpec spec;
  spec.family = scenesim::PathFamily::Orbit;
  spec.target = geometry::Vec3(0.0, 1.0, 0.0);
  spec.radius = 7.0;
  spec.height = 2.0;
  spec.span_deg = 90.0;
  return spec;
}

int cmd_render_grid(const RenderGridArgs& a, int threads, const nlohmann::json& config,
                    std::ostream& out, std::ostream& err) {
  require_set(a.out, "out");
  scenesim::CameraPathSpec path =
      a.campath.empty() ? default_camera_path() : scenesim::camera_path_from_json(read_json(a.campath));
  if (a.frames > 0) path.frames = a.frames;
  if (a.width > 0) path.intrinsics.width = a.width;
  if (a.height > 0) path.intrinsics.height = a.height;
  if (a.focal > 0.0) path.intrinsics.focal = a.focal;
  const int time_count = a.times > 0 ? a.times : path.frames;
  const scenesim::SceneSpec scene = a.scene.empty() ? scenesim::demo_scene(std::max(2, time_count))
                                                    : scenesim::scene_from_json(read_json(a.scene));
  require(time_count <= scene.anim_frames, ErrorKind::OutOfRange,
          std::to_string(time_count) + " grid times exceed the scene's " +
              std::to_string(scene.anim_frames) + " animation frames");

  const geometry::Trajectory traj = scenesim::make_trajectory(path);
  std::vector<double> times(static_cast<std::size_t>(time_count));
  for (int j = 0; j < time_count; ++j) times[static_cast<std::size_t>(j)] = j + 1;

  const auto report = scenesim::validate_trajectory(traj, scene, path.intrinsics, times);
  if (!report.ok()) {
    err << "invalid trajectory: first violating frame " << report.first_violation().value_or(0)
        << " (" << report.reason << ")\n";
    if (!a.force) return kValidation;
    err << "continuing because of --force\n";
  }

  const auto start = std::chrono::steady_clock::now();
  const scenesim::Grid grid = scenesim::render_grid(scene, traj, times, path.intrinsics, threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(a.out);
  scenesim::write_grid(dir, grid, scenesim::scene_hash(scene));
  write_json(dir / "scene.json", scenesim::to_json(scene));
  write_json(dir / "campath.json", scenesim::to_json(path));
  write_json(dir / "resolved_config.json", config);

  const auto meta = read_json(dir / "meta.json");
  out << "cells: " << grid.cells.size() << " (" << grid.camera_count() << " cameras x "
      << grid.time_count() << " times)\n";
  out << "render time: " << seconds << " s\n";
  out << "manifest: " << meta.at("manifest_sha256").get<std::string>() << '\n';
  return kOk;
}

// ---- sample-pairs -------------------------------------------------------------

struct SamplePairsArgs {
  std::string grid;
  std::string out;
  int n = 10;
  int frames = 0;
  std::vector<std::string> families;
  double memory_ratio = 0.0;
  int reference_frame = 1;
};

int cmd_sample_pairs(const SamplePairsArgs& a, std::uint64_t seed, const nlohmann::json& config,
                     std::ostream& out) {
  require_set(a.grid, "grid");
  require_set(a.out, "out");
  if (a.n < 0) throw UsageError("--n must be >= 0");
  if (a.memory_ratio < 0.0 || a.memory_ratio > 1.0) throw UsageError("--memory-ratio must be in [0, 1]");
  require(fs::exists(fs::path(a.grid) / "meta.json"), ErrorKind::Io, "no grid at " + a.grid);
  const scenesim::Grid grid = scenesim::read_grid(a.grid);

  const int size = std::min(grid.camera_count(), grid.time_count());
  const int frames = a.frames > 0 ? a.frames : size;
  require(frames >= 2 && frames <= size, ErrorKind::OutOfRange,
          "pair length " + std::to_string(frames) + " does not fit a grid of size " + std::to_string(size));
  for (int j = 0; j < frames; ++j) {
    require(grid.times[static_cast<std::size_t>(j)] == j + 1, ErrorKind::InvalidArgument,
            "pair sampling needs grid times 1, 2, 3, ...");
  }

  std::vector<timewarp::WarpKind> families;
  for (const auto& name : a.families) families.push_back(timewarp::parse_warp_kind(name));
  if (families.empty()) families.assign(std::begin(timewarp::kAllWarpKinds), std::end(timewarp::kAllWarpKinds));

  const griddata::Clip source = griddata::sample_diagonal_source(grid, 1, frames);
  std::vector<griddata::PairSample> samples;
  for (int i = 0; i < a.n; ++i) {
    const std::uint64_t item_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    Rng rng(item_seed);
    const bool memory = rng.uniform() < a.memory_ratio;
    const int path_kind = static_cast<int>(rng.integer(0, 2));
    const int k = static_cast<int>(rng.integer(1, frames));
    const char* kind_name = path_kind == 0 ? "fixed" : path_kind == 1 ? "forward" : "reverse";
    const int cam_from = path_kind == 0 ? k : path_kind == 1 ? 1 : frames;
    const int cam_to = path_kind == 0 ? k : path_kind == 1 ? frames : 1;

    griddata::PairSample pair;
    if (memory) {
      const int split = static_cast<int>(rng.integer(2, frames - 1 > 2 ? frames - 1 : 2));
      const int cam_split = timewarp::nearest_frame(cam_from + (cam_to - cam_from) * (split - 1.0) / (frames - 1));
      griddata::SegmentSpec s1{linear_path(cam_from, cam_split, frames), linear_path(1, split, frames)};
      griddata::SegmentSpec s2{linear_path(cam_split, cam_to, frames), linear_path(split, frames, frames)};
      pair = griddata::make_memory_pair(grid, source, s1, s2, a.reference_frame);
      pair.spec["kind"] = "memory";
      pair.spec["time_split"] = split;
    } else {
      const auto cam_path = linear_path(cam_from, cam_to, frames);
      const auto time_path = linear_path(1, frames, frames);
      const griddata::Clip target = griddata::sample_target(grid, cam_path, time_path);
      const auto warp = timewarp::sample_warp(derive_seed(item_seed, 1), frames, families);
      pair = griddata::make_warped_pair(source, target, warp, a.reference_frame);
      pair.spec["kind"] = "warped";
      pair.spec["cam_path"] = cam_path;
    }
    pair.spec["camera"] = kind_name;
    pair.spec["camera_from"] = cam_from;
    pair.spec["camera_to"] = cam_to;
    pair.seed = item_seed;
    char id[32];
    std::snprintf(id, sizeof id, "s%06d", i);
    pair.id = id;
    samples.push_back(std::move(pair));
  }

  griddata::write_dataset(samples, a.out);
  write_json(fs::path(a.out) / "resolved_config.json", config);
  out << "samples: " << samples.size() << " (F=" << frames << ")\n";
  return kOk;
}

// ---- plan-ar / check-plan -----------------------------------------------------

timewarp::TimeSignal load_times(const std::string& path, std::size_t length) {
  if (path.empty()) return timewarp::TimeSignal::forward(static_cast<int>(length));
  return timewarp::time_signal_from_json(read_json(path));
}

struct PlanArgs {
  std::string cam;
  std::string time;
  std::string out;
  int segment_frames = 81;
  std::string reference = "previous-end";
};

int cmd_plan_ar(const PlanArgs& a, const nlohmann::json& config, std::ostream& out, std::ostream& err) {
  require_set(a.cam, "cam");
  require_set(a.out, "out");
  const auto cams = geometry::read_trajectory(a.cam);
  const auto times = load_times(a.time, cams.size());
  const auto plan = arplan::plan_segments(cams, times, a.segment_frames, arplan::parse_reference(a.reference));
  const auto report = arplan::check_continuity(plan, cams, times);
  arplan::write_plan(a.out, plan);
  write_json(fs::path(a.out) / "resolved_config.json", config);
  out << "segments: " << plan.segments.size() << " (L=" << plan.length
      << ", padded to " << plan.padded_length() << ")\n";
  if (!report.ok()) {
    const auto v = *report.first();
    err << "continuity violation at frame " << v.frame << " (segment " << v.segment << "): " << v.what << '\n';
    return kValidation;
  }
  return kOk;
}

struct CheckPlanArgs {
  std::string plan;
  std::string cam;
  std::string time;
};

int cmd_check_plan(const CheckPlanArgs& a, std::ostream& out, std::ostream& err) {
  require_set(a.plan, "plan");
  require_set(a.cam, "cam");
  const auto plan = arplan::read_plan(a.plan);
  const auto cams = geometry::read_trajectory(a.cam);
  const auto times = load_times(a.time, cams.size());
  const auto report = arplan::check_continuity(plan, cams, times);
  if (!report.ok()) {
    for (const auto& v : report.violations) {
      err << "violation at frame " << v.frame << " (segment " << v.segment << "): " << v.what
          << " rot " << v.rot_err_deg << " deg, trans " << v.trans_err << '\n';
    }
    return kValidation;
  }
  const auto stitched = arplan::stitch_cameras(plan);
  const auto global = arplan::padded_cameras(cams, plan.padded_length());
  double worst = 0.0;
  for (std::size_t f = 0; f < stitched.size() && f < global.size(); ++f) {
    const auto rel = geometry::relative(global[f], stitched[f]);
    worst = std::max({worst, geometry::rot_err_deg(rel, geometry::Pose()),
                      rel.translation().norm()});
  }
  if (stitched.size() != global.size() || worst > arplan::kContinuityTolerance) {
    err << "stitched plan does not reconstruct the trajectory (max error " << worst << ")\n";
    return kValidation;
  }
  out << "plan ok: " << plan.segments.size() << " segments, " << report.violations.size()
      << " violations\n";
  return kOk;
}

// ---- eval ---------------------------------------------------------------------

struct EvalPoseArgs {
  std::vector<std::string> generated;
  std::vector<std::string> target;
  std::vector<std::string> relpose;
  std::string protocol;
  std::string out;
};

int write_report(const evalh::EvalReport& report, const std::string& out_dir,
                 const nlohmann::json& config, std::ostream& out) {
  const std::string table = report.to_table();
  out << table;
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    write_json(dir / "report.json", report.to_json());
    write_text(dir / "table.txt", table);
    write_json(dir / "resolved_config.json", config);
  }
  return kOk;
}

int cmd_eval_pose(const EvalPoseArgs& a, const nlohmann::json& config, std::ostream& out) {
  if (a.protocol.empty()) throw UsageError("eval pose needs --protocol relative|absolute");
  if (a.generated.empty()) throw UsageError("eval pose needs at least one --generated trajectory");
  if (a.generated.size() != a.target.size()) {
    throw UsageError("--generated and --target must be given the same number of times");
  }
  const auto protocol = evalh::parse_protocol(a.protocol);
  if (protocol == evalh::Protocol::Absolute && a.relpose.size() != a.generated.size()) {
    throw UsageError("absolute protocol needs one --relpose per --generated trajectory");
  }
  evalh::EvalReport report;
  for (std::size_t i = 0; i < a.generated.size(); ++i) {
    std::optional<geometry::Pose> rel;
    if (protocol == evalh::Protocol::Absolute) rel = geometry::read_trajectory(a.relpose[i]).front();
    report.pose.push_back(evalh::eval_pose(geometry::read_trajectory(a.generated[i]),
                                           geometry::read_trajectory(a.target[i]), protocol, rel));
  }
  return write_report(report, a.out, config, out);
}

struct EvalRetimeArgs {
  std::string grid;
  std::string items;
  std::string out;
};

/// Items file: [{"label": ..., "generated": dir of fNNN.png, "cam_path": [...],
/// "time_path": [...]}]. A relative "generated" path resolves against the
/// items file's directory.
int cmd_eval_retime(const EvalRetimeArgs& a, const nlohmann::json& config, std::ostream& out) {
  require_set(a.grid, "grid");
  require_set(a.items, "items");
  const scenesim::Grid grid = scenesim::read_grid(a.grid);
  const auto items = read_json(a.items);
  require(items.is_array(), ErrorKind::InvalidArgument, "items file must hold a JSON array");
  evalh::EvalReport report;
  for (const auto& item : items) {
    const auto cam_path = int_list(item.at("cam_path"), "cam_path");
    const auto time_path = int_list(item.at("time_path"), "time_path");
    fs::path gen_dir = item.at("generated").get<std::string>();
    if (gen_dir.is_relative()) gen_dir = fs::path(a.items).parent_path() / gen_dir;
    FrameSequence frames;
    for (std::size_t f = 0; f < cam_path.size(); ++f) {
      char name[32];
      std::snprintf(name, sizeof name, "f%03zu.png", f + 1);
      frames.push_back(read_png(gen_dir / name));
    }
    report.retime.push_back(
        evalh::eval_retime(frames, grid, cam_path, time_path, item.value("label", std::string())));
  }
  return write_report(report, a.out, config, out);
}

// ---- gradcheck ------------------------------------------------------------------

struct GradcheckArgs {
  std::vector<std::string> kernels;
  int seeds = 5;
  bool corrupt = false;
  double tolerance = 1e-4;
};

int cmd_gradcheck(const GradcheckArgs& a, std::uint64_t seed, std::ostream& out) {
  if (a.seeds < 1) throw UsageError("--seeds must be >= 1");
  std::vector<embed::GradKernel> kernels;
  for (const auto& k : a.kernels) kernels.push_back(embed::parse_grad_kernel(k));
  if (kernels.empty()) {
    kernels.assign(std::begin(embed::kTrainableKernels), std::end(embed::kTrainableKernels));
  }
  bool all_pass = true;
  for (auto k : kernels) {
    for (int s = 0; s < a.seeds; ++s) {
      const std::uint64_t item_seed = seed + static_cast<std::uint64_t>(s);
      const auto r = embed::grad_check(k, item_seed, a.corrupt);
      const bool pass = r.max_rel_error < a.tolerance;
      all_pass = all_pass && pass;
      out << (pass ? "PASS " : "FAIL ") << embed::to_string(k) << " seed=" << item_seed
          << " max_rel_error=" << r.max_rel_error << " entries=" << r.entries_checked
          << " worst=" << r.worst_entry << '\n';
    }
  }
  out << (all_pass ? "gradcheck passed\n" : "gradcheck FAILED\n");
  return all_pass ? kOk : kValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Camera and time controlled video toolkit: scene grids, pair sampling, "
               "autoregressive planning and evaluation"};
  app.name("stpilot");
  app.require_subcommand(1);

  int threads = 0;
  std::uint64_t seed = 0;
  std::string config_path;
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0 = all cores)")
                          ->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Base random seed")->capture_default_str();
  app.add_option("--config", config_path, "JSON file with option defaults; flags override it");

  RenderGridArgs rg;
  auto* render = app.add_subcommand("render-grid", "Render the full camera x time grid");
  render->add_option("--scene", rg.scene, "Scene JSON (default: built-in demo scene)");
  render->add_option("--campath", rg.campath, "Camera path JSON (default: 90 degree orbit)");
  render->add_option("--out", rg.out, "Output directory");
  render->add_option("--frames", rg.frames, "Camera poses (overrides the path spec)");
  render->add_option("--times", rg.times, "Animation times 1..N (default: --frames)");
  render->add_option("--width", rg.width, "Image width");
  render->add_option("--height", rg.height, "Image height");
  render->add_option("--focal", rg.focal, "Focal length in pixels");
  render->add_flag("--force", rg.force, "Render even if the trajectory fails validation");

  SamplePairsArgs sp;
  auto* sample = app.add_subcommand("sample-pairs", "Sample source/target pairs from a grid");
  sample->add_option("--grid", sp.grid, "Grid directory");
  sample->add_option("--out", sp.out, "Dataset directory");
  sample->add_option("--n", sp.n, "Number of samples")->capture_default_str();
  sample->add_option("--frames", sp.frames, "Frames per clip (default: grid size)");
  sample->add_option("--families", sp.families, "Warp families to draw from (default: all)");
  sample->add_option("--memory-ratio", sp.memory_ratio, "Fraction of two-source memory pairs")
      ->capture_default_str();
  sample->add_option("--reference-frame", sp.reference_frame, "Source frame used as camera origin")
      ->capture_default_str();

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan-ar", "Split a long trajectory into autoregressive segments");
  plan->add_option("--cam", pa.cam, "Trajectory text file");
  plan->add_option("--time", pa.time, "Time signal JSON (default: 1..L)");
  plan->add_option("--out", pa.out, "Plan directory");
  plan->add_option("--segment-frames", pa.segment_frames, "Frames per segment")->capture_default_str();
  plan->add_option("--reference", pa.reference, "source-frame or previous-end")->capture_default_str();

  CheckPlanArgs ca;
  auto* check = app.add_subcommand("check-plan", "Verify a plan against its global trajectory");
  check->add_option("--plan", ca.plan, "Plan directory");
  check->add_option("--cam", ca.cam, "Trajectory text file");
  check->add_option("--time", ca.time, "Time signal JSON (default: 1..L)");

  auto* eval = app.add_subcommand("eval", "Evaluate camera accuracy or retiming fidelity");
  eval->require_subcommand(1);
  EvalPoseArgs ep;
  auto* eval_pose = eval->add_subcommand("pose", "Pose metrics for generated vs target trajectories");
  eval_pose->add_option("--generated", ep.generated, "Generated trajectory (repeatable)");
  eval_pose->add_option("--target", ep.target, "Target trajectory (repeatable)");
  eval_pose->add_option("--relpose", ep.relpose, "First-frame relative pose file (absolute protocol)");
  eval_pose->add_option("--protocol", ep.protocol, "relative or absolute");
  eval_pose->add_option("--out", ep.out, "Report directory");
  EvalRetimeArgs er;
  auto* eval_retime = eval->add_subcommand("retime", "PSNR/SSIM of retimed frames against a grid");
  eval_retime->add_option("--grid", er.grid, "Grid directory");
  eval_retime->add_option("--items", er.items, "Items JSON");
  eval_retime->add_option("--out", er.out, "Report directory");

  GradcheckArgs ga;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference checks of the encoder gradients");
  grad->add_option("--kernels", ga.kernels, "Kernels (default: compress_time embed_camera mlp_compress)");
  grad->add_option("--seeds", ga.seeds, "Number of consecutive seeds")->capture_default_str();
  grad->add_flag("--corrupt", ga.corrupt, "Negate one analytic gradient (negative control)");
  grad->add_option("--tolerance", ga.tolerance, "Maximum relative error")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd == eval) cmd = eval->get_subcommands().front();
    std::vector<CLI::Option*> options = cmd->get_options();
    for (CLI::Option* g : {threads_opt, seed_opt}) options.push_back(g);

    if (!config_path.empty()) {
      const auto cfg = read_json(config_path);
      if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
      apply_config(cfg, options);
    }
    if (threads_opt->count() == 0) {
      if (const char* env = std::getenv("STPILOT_THREADS")) {
        try {
          threads_opt->add_result(std::string(env));
          threads_opt->run_callback();
        } catch (const CLI::Error&) {
          throw UsageError(std::string("STPILOT_THREADS is not a thread count: ") + env);
        }
      }
    }
    const std::string command =
        cmd->get_parent() == eval ? "eval " + cmd->get_name() : cmd->get_name();
    const nlohmann::json config = resolved_config(command, options);

    if (cmd == render) return cmd_render_grid(rg, threads, config, out, err);
    if (cmd == sample) return cmd_sample_pairs(sp, seed, config, out);
    if (cmd == plan) return cmd_plan_ar(pa, config, out, err);
    if (cmd == check) return cmd_check_plan(ca, out, err);
    if (cmd == eval_pose) return cmd_eval_pose(ep, config, out);
    if (cmd == eval_retime) return cmd_eval_retime(er, config, out);
    if (cmd == grad) return cmd_gradcheck(ga, seed, out);
    throw UsageError("unknown command");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return (e.kind() == ErrorKind::Io || e.kind() == ErrorKind::Checksum) ? kIo : kValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kValidation;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("stpilot");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace stpilot::cli
