#include <gtest/gtest.h>

#include <numeric>

#include "stpilot/error.hpp"
#include "stpilot/evalh.hpp"
#include "support.hpp"

namespace stpilot {
namespace {

using namespace evalh;

Image noise_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.integer(0, 255));
  return img;
}

// Direct per-window SSIM, no integral images.
double naive_ssim(const ImageF& a, const ImageF& b) {
  const double c1 = std::pow(0.01 * 255.0, 2);
  const double c2 = std::pow(0.03 * 255.0, 2);
  double total = 0.0;
  int count = 0;
  for (int c = 0; c < a.channels; ++c)
    for (int y0 = 0; y0 + 8 <= a.height; ++y0)
      for (int x0 = 0; x0 + 8 <= a.width; ++x0) {
        double ma = 0, mb = 0;
        for (int y = y0; y < y0 + 8; ++y)
          for (int x = x0; x < x0 + 8; ++x) {
            ma += a.at(x, y, c);
            mb += b.at(x, y, c);
          }
        ma /= 64;
        mb /= 64;
        double va = 0, vb = 0, cov = 0;
        for (int y = y0; y < y0 + 8; ++y)
          for (int x = x0; x < x0 + 8; ++x) {
            const double da = a.at(x, y, c) - ma;
            const double db = b.at(x, y, c) - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
          }
        va /= 64;
        vb /= 64;
        cov /= 64;
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
  return total / count;
}

TEST(Psnr, IdenticalIsCapped) {
  const auto a = noise_image(16, 16, 1);
  EXPECT_EQ(psnr(a, a), kPsnrCap);
}

TEST(Psnr, ConstantOffset) {
  ImageF a(10, 7, 3, 100.0);
  ImageF b(10, 7, 3, 100.0 + 25.5);
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-12);
}

TEST(Psnr, SingleFullRangeFlip) {
  Image a(64, 64);
  Image b = a;
  b.at(10, 20)[1] = 255;
  EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(3.0 * 64 * 64), 1e-12);
}

TEST(Psnr, ShapeMismatch) {
  EXPECT_THROW(psnr(Image(4, 4), Image(4, 5)), Error);
}

TEST(Ssim, IdenticalIsOne) {
  const auto a = noise_image(20, 12, 2);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(Ssim, MatchesNaiveWindows) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ImageF a(noise_image(17, 13, seed));
    ImageF b = a;
    Rng rng(seed + 100);
    for (auto& s : b.samples) s = std::clamp(s + rng.uniform(-40, 40), 0.0, 255.0);
    EXPECT_NEAR(ssim(a, b), naive_ssim(a, b), 1e-9);
  }
}

TEST(Ssim, SymmetricAndInvertedIsNegative) {
  const auto a = noise_image(16, 16, 3);
  const auto b = noise_image(16, 16, 4);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);

  // Checkerboard around mid-gray against its inverse.
  Image c(16, 16);
  Image inv(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int ch = 0; ch < 3; ++ch) {
        c.at(x, y)[ch] = (x + y) % 2 ? 200 : 55;
        inv.at(x, y)[ch] = static_cast<std::uint8_t>(255 - c.at(x, y)[ch]);
      }
  EXPECT_LT(ssim(c, inv), 0.0);
}

TEST(Ssim, RejectsTinyImages) {
  EXPECT_THROW(ssim(Image(7, 20), Image(7, 20)), Error);
}

TEST(Categorize, Buckets) {
  using timewarp::TimeSignal;
  const auto sig = [](timewarp::WarpParams p) { return timewarp::eval_warp({p, 81}); };
  EXPECT_EQ(categorize(sig(timewarp::Freeze{40})), Category::Bullet);
  EXPECT_EQ(categorize(sig(timewarp::Reverse{})), Category::Direction);
  EXPECT_EQ(categorize(sig(timewarp::Identity{})), Category::Direction);
  EXPECT_EQ(categorize(sig(timewarp::Zigzag{10})), Category::Direction);
  EXPECT_EQ(categorize(sig(timewarp::SlowSegment{10, 50, 0.5})), Category::Speed);
  EXPECT_EQ(categorize(sig(timewarp::Accelerate{2.0})), Category::Speed);
  EXPECT_EQ(categorize(TimeSignal({3, 1, 4, 1, 5}, 5)), Category::Other);
}

class Retime : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scenesim::CameraPathSpec spec;
    spec.frames = 10;
    spec.intrinsics = {20.0, 20, 20};
    spec.target = geometry::Vec3(0, 1, 0);
    spec.radius = 7.0;
    std::vector<double> times(10);
    std::iota(times.begin(), times.end(), 1.0);
    grid_ = new scenesim::Grid(scenesim::render_grid(scenesim::demo_scene(10),
                                                     scenesim::make_trajectory(spec), times,
                                                     spec.intrinsics, 2));
  }
  static void TearDownTestSuite() { delete grid_; }
  static FrameSequence lookup(std::span<const int> cams, std::span<const int> times) {
    FrameSequence out;
    for (std::size_t f = 0; f < cams.size(); ++f) out.push_back(grid_->cell(cams[f], times[f]));
    return out;
  }
  static inline scenesim::Grid* grid_ = nullptr;
};

TEST_F(Retime, GroundTruthIsPerfect) {
  const std::vector<int> cams(10, 3);
  const std::vector<int> frozen(10, 4);
  const auto r = eval_retime(lookup(cams, frozen), *grid_, cams, frozen, "freeze");
  EXPECT_EQ(r.category, Category::Bullet);
  ASSERT_EQ(r.frames.size(), 10u);
  for (const auto& f : r.frames) {
    EXPECT_EQ(f.psnr, kPsnrCap);
    EXPECT_NEAR(f.ssim, 1.0, 1e-12);
  }
  EXPECT_EQ(r.label, "freeze");
}

TEST_F(Retime, ReversedFramesScoreLow) {
  std::vector<int> cams(10, 1);
  std::vector<int> fwd(10);
  std::iota(fwd.begin(), fwd.end(), 1);
  std::vector<int> rev(fwd.rbegin(), fwd.rend());
  const auto r = eval_retime(lookup(cams, rev), *grid_, cams, fwd);
  EXPECT_EQ(r.category, Category::Direction);
  EXPECT_LT(r.mean_psnr, 40.0);
  EXPECT_THROW(eval_retime(lookup(cams, rev), *grid_, std::vector<int>(9, 1), fwd), Error);
}

TEST_F(Retime, ReportAggregates) {
  const std::vector<int> cams(10, 2);
  std::vector<int> fwd(10);
  std::iota(fwd.begin(), fwd.end(), 1);
  const std::vector<int> frozen(10, 5);
  EvalReport report;
  report.retime.push_back(eval_retime(lookup(cams, fwd), *grid_, cams, fwd, "forward"));
  report.retime.push_back(eval_retime(lookup(cams, frozen), *grid_, cams, frozen, "freeze"));
  const auto means = report.category_means();
  ASSERT_EQ(means.size(), 2u);
  EXPECT_EQ(means[0].category, Category::Direction);
  EXPECT_EQ(means[1].category, Category::Bullet);
  const auto j = report.to_json();
  EXPECT_TRUE(j.dump().find("lpips") != std::string::npos);
  EXPECT_FALSE(report.to_table().empty());
}

geometry::Trajectory test_trajectory(Rng& rng, int frames) {
  const Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
  geometry::Trajectory traj;
  for (int f = 0; f < frames; ++f) {
    const Eigen::Vector3d c(std::cos(0.2 * f) * 4, 1.0 + 0.1 * f, std::sin(0.2 * f) * 4);
    const Eigen::Matrix3d r = testing::rodrigues(axis, 3.0 * f + 10.0);
    traj.emplace_back(r, -(r * c));
  }
  return traj;
}

TEST(EvalPose, IdenticalTrajectories) {
  Rng rng(1);
  const auto t = test_trajectory(rng, 20);
  for (Protocol p : {Protocol::Relative, Protocol::Absolute}) {
    const auto r = eval_pose(t, t, p, geometry::Pose::identity());
    EXPECT_NEAR(r.mean_rot, 0.0, 1e-6);
    EXPECT_NEAR(r.mean_trans, 0.0, 1e-9);
    EXPECT_NEAR(r.first_frame_rot, 0.0, 1e-6);
    const PoseResult items[] = {r};
    EXPECT_EQ(rta(items, 15.0), 1.0);
  }
}

TEST(EvalPose, RotationPerturbation) {
  Rng rng(2);
  const auto t = test_trajectory(rng, 25);
  const Eigen::Vector3d axis(0.3, -1.0, 0.5);
  for (double theta : {5.0, 10.0, 15.0, 30.0}) {
    const Eigen::Matrix3d q = testing::rodrigues(axis, theta);
    geometry::Trajectory gen;
    for (const auto& p : t) gen.emplace_back(q * p.rotation(), p.translation());
    const auto r = eval_pose(gen, t, Protocol::Relative);
    EXPECT_NEAR(r.mean_rot, theta, 1e-6);
    for (double e : r.rot_errors) EXPECT_NEAR(e, theta, 1e-6);
    EXPECT_NEAR(r.first_frame_rot, theta, 1e-6);
  }
}

TEST(EvalPose, AbsoluteRecoversSimilarity) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = test_trajectory(rng, 12);
    const auto m = testing::random_pose(rng);  // target world -> generated world, after scaling
    const double s = rng.uniform(0.5, 2.0);
    geometry::Trajectory gen;
    for (const auto& p : t) {
      // Generated world point x_g = M (s x_t).
      const Eigen::Matrix3d r = p.rotation() * m.rotation().transpose();
      const Eigen::Vector3d c = m.rotation() * (s * p.camera_center()) + m.translation();
      gen.emplace_back(r, -(r * c));
    }
    const auto r = eval_pose(gen, t, Protocol::Absolute, geometry::invert(m));
    EXPECT_LT(r.mean_rot, 1e-6);
    EXPECT_LT(r.mean_trans, 1e-6);
  }
}

TEST(EvalPose, Errors) {
  Rng rng(4);
  const auto t = test_trajectory(rng, 5);
  EXPECT_THROW(eval_pose(t, t, Protocol::Absolute), Error);
  EXPECT_THROW(eval_pose(t, geometry::Trajectory(t.begin(), t.end() - 1), Protocol::Relative), Error);
  EXPECT_THROW(eval_pose({t[0]}, {t[0]}, Protocol::Relative), Error);
  try {
    rta({}, 15.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedMetric);
  }
  EXPECT_EQ(parse_protocol("absolute"), Protocol::Absolute);
  EXPECT_THROW(parse_protocol("sideways"), Error);
}

TEST(Rta, StrictThreshold) {
  std::vector<PoseResult> items(4);
  items[0].first_frame_rot = 14.999;
  items[1].first_frame_rot = 15.0;
  items[2].first_frame_rot = 29.0;
  items[3].first_frame_rot = 31.0;
  EXPECT_EQ(rta(items, 15.0), 0.25);
  EXPECT_EQ(rta(items, 30.0), 0.75);
}

}  // namespace
}  // namespace stpilot
