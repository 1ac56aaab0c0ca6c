#include "stpilot/evalh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "stpilot/error.hpp"

namespace stpilot::evalh {
namespace {

void check_same_shape(const ImageF& a, const ImageF& b) {
  require(a.width == b.width && a.height == b.height && a.channels == b.channels,
          ErrorKind::ShapeMismatch,
          "image shapes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) + "x" +
              std::to_string(a.channels) + " vs " + std::to_string(b.width) + "x" +
              std::to_string(b.height) + "x" + std::to_string(b.channels));
  require(!a.samples.empty(), ErrorKind::ShapeMismatch, "images are empty");
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Summed-area table with a zero first row and column.
class Integral {
 public:
  Integral(int w, int h) : w_(w + 1), data_(static_cast<std::size_t>(w + 1) * (h + 1), 0.0) {}

  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
  double box(int x, int y, int n) const {
    auto v = [&](int xx, int yy) { return data_[static_cast<std::size_t>(yy) * w_ + xx]; };
    return v(x + n, y + n) - v(x, y + n) - v(x + n, y) + v(x, y);
  }

 private:
  int w_;
  std::vector<double> data_;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace

double psnr(const ImageF& a, const ImageF& b, double max_value) {
  check_same_shape(a, b);
  double sse = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(a.samples.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(max_value * max_value / mse));
}

double psnr(const Image& a, const Image& b) { return psnr(ImageF(a), ImageF(b)); }

double ssim(const ImageF& a, const ImageF& b, double max_value) {
  check_same_shape(a, b);
  const int n = kSsimWindow;
  require(a.width >= n && a.height >= n, ErrorKind::ShapeMismatch,
          "SSIM needs images of at least " + std::to_string(n) + "x" + std::to_string(n));
  const double c1 = (0.01 * max_value) * (0.01 * max_value);
  const double c2 = (0.03 * max_value) * (0.03 * max_value);
  const double count = n * n;

  double total = 0.0;
  const int nx = a.width - n + 1;
  const int ny = a.height - n + 1;
  for (int c = 0; c < a.channels; ++c) {
    Integral sa(a.width, a.height), sb(a.width, a.height), saa(a.width, a.height),
        sbb(a.width, a.height), sab(a.width, a.height);
    for (int y = 0; y < a.height; ++y) {
      for (int x = 0; x < a.width; ++x) {
        const double va = a.at(x, y, c);
        const double vb = b.at(x, y, c);
        auto accumulate = [&](Integral& s, double v) {
          s.at(x + 1, y + 1) = v + s.at(x, y + 1) + s.at(x + 1, y) - s.at(x, y);
        };
        accumulate(sa, va);
        accumulate(sb, vb);
        accumulate(saa, va * va);
        accumulate(sbb, vb * vb);
        accumulate(sab, va * vb);
      }
    }
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const double ma = sa.box(x, y, n) / count;
        const double mb = sb.box(x, y, n) / count;
        const double va = saa.box(x, y, n) / count - ma * ma;
        const double vb = sbb.box(x, y, n) / count - mb * mb;
        const double cov = sab.box(x, y, n) / count - ma * mb;
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      }
    }
  }
  return total / (static_cast<double>(nx) * ny * a.channels);
}

double ssim(const Image& a, const Image& b) { return ssim(ImageF(a), ImageF(b)); }

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Direction: return "Direction";
    case Category::Speed: return "Speed";
    case Category::Bullet: return "Bullet";
    case Category::Other: return "Other";
  }
  return "Other";
}

Category categorize(const timewarp::TimeSignal& signal) {
  const auto cls = timewarp::classify_signal(signal);
  if (cls.freeform()) return Category::Other;
  switch (timewarp::kind_of(*cls.params)) {
    case timewarp::WarpKind::Freeze: return Category::Bullet;
    case timewarp::WarpKind::Identity:
    case timewarp::WarpKind::Reverse:
    case timewarp::WarpKind::Zigzag: return Category::Direction;
    case timewarp::WarpKind::Accelerate:
    case timewarp::WarpKind::SlowSegment: return Category::Speed;
  }
  return Category::Other;
}

RetimeResult eval_retime(const FrameSequence& generated, const scenesim::Grid& grid,
                         std::span<const int> cam_path, std::span<const int> time_path,
                         std::string label) {
  require(!generated.empty(), ErrorKind::ShapeMismatch, "no generated frames");
  require(generated.size() == cam_path.size() && generated.size() == time_path.size(),
          ErrorKind::ShapeMismatch,
          std::to_string(generated.size()) + " generated frames for a " +
              std::to_string(cam_path.size()) + "-camera, " + std::to_string(time_path.size()) +
              "-time path");
  RetimeResult r;
  std::vector<double> times;
  for (std::size_t f = 0; f < generated.size(); ++f) {
    const Image& truth = grid.cell(cam_path[f], time_path[f]);
    const ImageF g(generated[f]);
    const ImageF t(truth);
    r.frames.push_back({psnr(g, t), ssim(g, t)});
    times.push_back(static_cast<double>(time_path[f]));
  }
  const int horizon = std::max(grid.time_count(), *std::max_element(time_path.begin(), time_path.end()));
  const timewarp::TimeSignal signal(times, horizon);
  const auto cls = timewarp::classify_signal(signal);
  r.label = label.empty() ? cls.label() : std::move(label);
  r.category = categorize(signal);
  std::vector<double> p, s;
  for (const auto& fs : r.frames) {
    p.push_back(fs.psnr);
    s.push_back(fs.ssim);
  }
  r.mean_psnr = mean_of(p);
  r.mean_ssim = mean_of(s);
  return r;
}

std::string_view to_string(Protocol p) { return p == Protocol::Relative ? "relative" : "absolute"; }

Protocol parse_protocol(std::string_view name) {
  if (name == "relative") return Protocol::Relative;
  if (name == "absolute") return Protocol::Absolute;
  fail(ErrorKind::InvalidArgument,
       "unknown protocol '" + std::string(name) + "' (expected relative or absolute)");
}

PoseResult eval_pose(const Trajectory& generated, const Trajectory& target, Protocol protocol,
                     const std::optional<Pose>& first_frame_relpose) {
  require(generated.size() == target.size(), ErrorKind::ShapeMismatch,
          "generated trajectory has " + std::to_string(generated.size()) + " poses, target " +
              std::to_string(target.size()));
  require(generated.size() >= 2, ErrorKind::ShapeMismatch, "pose evaluation needs at least 2 frames");

  PoseResult r;
  r.protocol = protocol;
  r.first_frame_rot = geometry::rot_err_deg(generated.front(), target.front());

  Trajectory gen;
  Trajectory tgt;
  if (protocol == Protocol::Relative) {
    gen = geometry::rebase_to_pose(generated, target.front());
    tgt = geometry::rebase_to_pose(target, target.front());
  } else {
    require(first_frame_relpose.has_value(), ErrorKind::InvalidArgument,
            "absolute protocol needs the first-frame relative pose");
    gen = geometry::rebase_to_pose(generated, *first_frame_relpose);
    tgt = target;
  }
  gen = geometry::scale_align(gen, tgt);

  for (std::size_t f = 0; f < gen.size(); ++f) {
    r.rot_errors.push_back(geometry::rot_err_deg(gen[f], tgt[f]));
    r.trans_errors.push_back(geometry::trans_err(gen[f], tgt[f]));
  }
  r.mean_rot = mean_of(r.rot_errors);
  r.mean_trans = mean_of(r.trans_errors);
  return r;
}

double rta(std::span<const PoseResult> items, double threshold_deg) {
  require(!items.empty(), ErrorKind::UndefinedMetric, "RTA over an empty item set");
  std::vector<double> errs;
  for (const auto& it : items) errs.push_back(it.first_frame_rot);
  return geometry::rta_at(errs, threshold_deg);
}

std::vector<CategoryMean> EvalReport::category_means() const {
  std::vector<CategoryMean> out;
  for (Category c : {Category::Direction, Category::Speed, Category::Bullet, Category::Other}) {
    CategoryMean m{c};
    for (const auto& r : retime) {
      if (r.category != c) continue;
      ++m.items;
      m.psnr += r.mean_psnr;
      m.ssim += r.mean_ssim;
    }
    if (m.items == 0) continue;
    m.psnr /= m.items;
    m.ssim /= m.items;
    out.push_back(m);
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (!retime.empty()) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& r : retime) {
      nlohmann::json frames = nlohmann::json::array();
      for (const auto& f : r.frames) frames.push_back({{"psnr", f.psnr}, {"ssim", f.ssim}});
      items.push_back({{"label", r.label},
                       {"category", to_string(r.category)},
                       {"psnr", r.mean_psnr},
                       {"ssim", r.mean_ssim},
                       {"lpips", nullptr},
                       {"frames", frames}});
    }
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& m : category_means()) {
      cats.push_back({{"category", to_string(m.category)},
                      {"items", m.items},
                      {"psnr", m.psnr},
                      {"ssim", m.ssim},
                      {"lpips", nullptr}});
    }
    j["retime"] = {{"statistic", "mean"}, {"psnr_cap_db", kPsnrCap}, {"items", items}, {"categories", cats}};
  }
  if (!pose.empty()) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& p : pose) {
      items.push_back({{"protocol", to_string(p.protocol)},
                       {"rot", p.mean_rot},
                       {"trans", p.mean_trans},
                       {"first_frame_rot", p.first_frame_rot},
                       {"rot_errors", p.rot_errors},
                       {"trans_errors", p.trans_errors}});
    }
    nlohmann::json summary{{"statistic", "mean"}};
    for (Protocol proto : {Protocol::Relative, Protocol::Absolute}) {
      std::vector<double> rot, trans;
      for (const auto& p : pose) {
        if (p.protocol != proto) continue;
        rot.push_back(p.mean_rot);
        trans.push_back(p.mean_trans);
      }
      const std::string prefix = proto == Protocol::Relative ? "Rel" : "Abs";
      summary[prefix + "Rot"] = rot.empty() ? nlohmann::json() : nlohmann::json(mean_of(rot));
      summary[prefix + "Trans"] = trans.empty() ? nlohmann::json() : nlohmann::json(mean_of(trans));
    }
    std::vector<double> first;
    for (const auto& p : pose) first.push_back(p.first_frame_rot);
    summary["FirstFrameRot"] = mean_of(first);
    summary["RTA15"] = rta(pose, 15.0);
    summary["RTA30"] = rta(pose, 30.0);
    j["pose"] = {{"items", items}, {"summary", summary}};
  }
  j["vbench"] = {{"subject_consistency", nullptr}, {"background_consistency", nullptr},
                 {"motion_smoothness", nullptr},   {"dynamic_degree", nullptr},
                 {"aesthetic_quality", nullptr},   {"imaging_quality", nullptr}};
  return j;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[256];
  if (!retime.empty()) {
    std::snprintf(line, sizeof line, "%-28s %-10s %9s %8s %7s\n", "item", "category", "PSNR", "SSIM", "LPIPS");
    out << line;
    for (const auto& r : retime) {
      std::snprintf(line, sizeof line, "%-28s %-10s %9s %8s %7s\n", r.label.c_str(),
                    std::string(to_string(r.category)).c_str(), fmt(r.mean_psnr, 2).c_str(),
                    fmt(r.mean_ssim).c_str(), "-");
      out << line;
    }
    for (const auto& m : category_means()) {
      const std::string name = "mean " + std::string(to_string(m.category));
      std::snprintf(line, sizeof line, "%-28s %-10s %9s %8s %7s\n", name.c_str(),
                    std::string(to_string(m.category)).c_str(), fmt(m.psnr, 2).c_str(),
                    fmt(m.ssim).c_str(), "-");
      out << line;
    }
  }
  if (!pose.empty()) {
    if (!retime.empty()) out << '\n';
    std::snprintf(line, sizeof line, "%-6s %-10s %12s %12s %12s\n", "item", "protocol", "Rot(deg)",
                  "Trans", "FirstRot");
    out << line;
    for (std::size_t i = 0; i < pose.size(); ++i) {
      const auto& p = pose[i];
      std::snprintf(line, sizeof line, "%-6zu %-10s %12s %12s %12s\n", i + 1,
                    std::string(to_string(p.protocol)).c_str(), fmt(p.mean_rot, 6).c_str(),
                    fmt(p.mean_trans, 6).c_str(), fmt(p.first_frame_rot, 6).c_str());
      out << line;
    }
    std::snprintf(line, sizeof line, "RTA15 %s  RTA30 %s  (means over frames)\n",
                  fmt(100.0 * rta(pose, 15.0), 1).c_str(), fmt(100.0 * rta(pose, 30.0), 1).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace stpilot::evalh
