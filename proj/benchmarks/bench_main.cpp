#include <benchmark/benchmark.h>

#include <numeric>

#include "stpilot/arplan.hpp"
#include "stpilot/embed.hpp"
#include "stpilot/evalh.hpp"
#include "stpilot/scenesim.hpp"

using namespace stpilot;

namespace {

scenesim::CameraPathSpec orbit(int frames, int size) {
  scenesim::CameraPathSpec spec;
  spec.frames = frames;
  spec.intrinsics = {static_cast<double>(size), size, size};
  spec.target = geometry::Vec3(0, 1, 0);
  spec.radius = 7.0;
  spec.height = 2.0;
  spec.span_deg = 90.0;
  return spec;
}

}  // namespace

static void BM_RenderFrame(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto spec = orbit(8, size);
  const auto scene = scenesim::demo_scene(120);
  const auto traj = scenesim::make_trajectory(spec);
  for (auto _ : state) benchmark::DoNotOptimize(scenesim::render_frame(scene, traj[3], 40.0, spec.intrinsics));
  state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_RenderFrame)->Arg(32)->Arg(64)->Arg(128);

static void BM_RenderGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto spec = orbit(n, 64);
  const auto scene = scenesim::demo_scene(n);
  const auto traj = scenesim::make_trajectory(spec);
  std::vector<double> times(static_cast<std::size_t>(n));
  std::iota(times.begin(), times.end(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(scenesim::render_grid(scene, traj, times, spec.intrinsics, 0));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_RenderGrid)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Ssim(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto spec = orbit(8, size);
  const auto scene = scenesim::demo_scene(120);
  const auto traj = scenesim::make_trajectory(spec);
  const auto a = scenesim::render_frame(scene, traj[2], 10.0, spec.intrinsics);
  const auto b = scenesim::render_frame(scene, traj[2], 11.0, spec.intrinsics);
  for (auto _ : state) benchmark::DoNotOptimize(evalh::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256);

static void BM_EmbedTime(benchmark::State& state) {
  embed::EmbedConfig cfg;
  cfg.frames = static_cast<int>(state.range(0));
  const auto enc = embed::make_time_encoder(cfg);
  const auto tau = timewarp::TimeSignal::forward(cfg.frames);
  for (auto _ : state) benchmark::DoNotOptimize(embed::embed_time(tau, enc));
}
BENCHMARK(BM_EmbedTime)->Arg(81)->Arg(120);

static void BM_PlanSegments(benchmark::State& state) {
  const int length = static_cast<int>(state.range(0));
  const auto traj = scenesim::make_trajectory(orbit(length, 64));
  const auto times = timewarp::TimeSignal::forward(length);
  for (auto _ : state) {
    auto plan = arplan::plan_segments(traj, times, 81);
    benchmark::DoNotOptimize(arplan::check_continuity(plan, traj, times));
  }
}
BENCHMARK(BM_PlanSegments)->Arg(161)->Arg(1001);

BENCHMARK_MAIN();
