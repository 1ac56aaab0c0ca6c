#include "stpilot/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "stpilot/embed.hpp"
#include "stpilot/error.hpp"
#include "stpilot/rng.hpp"

namespace stpilot::embed {
namespace {

constexpr double kStep = 1e-4;

struct Problem {
  FeatureTensor input;
  FeatureTensor upstream;
  std::function<FeatureTensor(const FeatureTensor&)> forward;
  std::function<FeatureTensor(const FeatureTensor&, const FeatureTensor&)> backward;
  std::function<void(const ParamVisitor&)> visit;
  std::function<void()> zero_grad;
};

FeatureTensor random_tensor(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  FeatureTensor m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kRelErrorFloor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult run(Problem& p, bool corrupt) {
  const auto loss = [&](const FeatureTensor& x) { return (p.forward(x).array() * p.upstream.array()).sum(); };

  p.zero_grad();
  FeatureTensor grad_input = p.backward(p.input, p.upstream);

  // Snapshot analytic parameter gradients.
  std::vector<std::vector<double>> analytic;
  p.visit([&](const std::string&, const std::vector<int>&, std::vector<double>&, std::vector<double>& g) {
    analytic.push_back(g);
  });

  if (corrupt) {
    double best = -1.0;
    double* target = nullptr;
    for (auto& block : analytic) {
      for (auto& g : block) {
        if (std::abs(g) > best) {
          best = std::abs(g);
          target = &g;
        }
      }
    }
    if (target) *target = -*target;
  }

  GradCheckResult result;
  auto record = [&](double a, double n, const std::string& name, std::size_t index) {
    const double e = rel_error(a, n);
    ++result.entries_checked;
    if (e > result.max_rel_error) {
      result.max_rel_error = e;
      result.worst_entry = name + "[" + std::to_string(index) + "]";
    }
  };

  std::size_t block = 0;
  p.visit([&](const std::string& name, const std::vector<int>&, std::vector<double>& value,
              std::vector<double>&) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + kStep;
      const double up = loss(p.input);
      value[i] = saved - kStep;
      const double down = loss(p.input);
      value[i] = saved;
      record(analytic[block][i], (up - down) / (2.0 * kStep), name, i);
    }
    ++block;
  });

  FeatureTensor x = p.input;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + kStep;
    const double up = loss(x);
    x.data()[i] = saved - kStep;
    const double down = loss(x);
    x.data()[i] = saved;
    record(grad_input.data()[i], (up - down) / (2.0 * kStep), "input", static_cast<std::size_t>(i));
  }
  return result;
}

}  // namespace

std::string_view to_string(GradKernel k) {
  switch (k) {
    case GradKernel::CompressTime: return "compress_time";
    case GradKernel::EmbedCamera: return "embed_camera";
    case GradKernel::MlpCompress: return "mlp_compress";
    case GradKernel::Linear: return "linear";
  }
  return "unknown";
}

GradKernel parse_grad_kernel(std::string_view name) {
  for (GradKernel k : {GradKernel::CompressTime, GradKernel::EmbedCamera, GradKernel::MlpCompress,
                       GradKernel::Linear}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::InvalidArgument, "unknown gradient kernel '" + std::string(name) + "'");
}

GradCheckResult grad_check(GradKernel kernel, std::uint64_t seed, bool corrupt) {
  Rng rng(derive_seed(seed, 0x67726164));
  const int frames = static_cast<int>(rng.integer(5, 16));
  const int channels = 2 * static_cast<int>(rng.integer(1, 4));
  const std::uint64_t wseed = rng.next();

  switch (kernel) {
    case GradKernel::CompressTime: {
      ConvStack stack(channels, Activation::Silu, wseed);
      Problem p{random_tensor(frames, channels, rng),
                random_tensor(stack.output_length(frames), channels, rng),
                [&](const FeatureTensor& x) { return stack.forward(x); },
                [&](const FeatureTensor& x, const FeatureTensor& g) { return stack.backward(x, g); },
                [&](const ParamVisitor& fn) { stack.visit("stack", fn); },
                [&] { stack.zero_grad(); }};
      return run(p, corrupt);
    }
    case GradKernel::EmbedCamera: {
      EmbedConfig cfg;
      cfg.frames = frames;
      cfg.channels = channels;
      cfg.seed = wseed;
      CameraEncoder enc = make_camera_encoder(cfg);
      Problem p{random_tensor(frames, 12, rng),
                random_tensor(enc.output_frames(), channels, rng),
                [&](const FeatureTensor& x) { return enc.stack.forward(enc.lift.forward(x)); },
                [&](const FeatureTensor& x, const FeatureTensor& g) {
                  const FeatureTensor lifted = enc.lift.forward(x);
                  return enc.lift.backward(x, enc.stack.backward(lifted, g));
                },
                [&](const ParamVisitor& fn) {
                  enc.lift.visit("lift", fn);
                  enc.stack.visit("stack", fn);
                },
                [&] {
                  enc.lift.zero_grad();
                  enc.stack.zero_grad();
                }};
      return run(p, corrupt);
    }
    case GradKernel::MlpCompress: {
      EmbedConfig cfg;
      cfg.frames = frames;
      cfg.channels = channels;
      cfg.mlp_hidden = static_cast<int>(rng.integer(4, 12));
      cfg.seed = wseed;
      MlpCompressor mlp = make_mlp_compressor(cfg);
      Problem p{random_tensor(frames, channels, rng),
                random_tensor(mlp.output_frames, channels, rng),
                [&](const FeatureTensor& x) { return mlp.forward(x); },
                [&](const FeatureTensor& x, const FeatureTensor& g) { return mlp.backward(x, g); },
                [&](const ParamVisitor& fn) { mlp.visit("mlp", fn); },
                [&] { mlp.zero_grad(); }};
      return run(p, corrupt);
    }
    case GradKernel::Linear: {
      Dense layer(channels, channels);
      layer.init_uniform(wseed);
      Problem p{random_tensor(frames, channels, rng), random_tensor(frames, channels, rng),
                [&](const FeatureTensor& x) { return layer.forward(x); },
                [&](const FeatureTensor& x, const FeatureTensor& g) { return layer.backward(x, g); },
                [&](const ParamVisitor& fn) { layer.visit("linear", fn); },
                [&] { layer.zero_grad(); }};
      return run(p, corrupt);
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown gradient kernel");
}

}  // namespace stpilot::embed
