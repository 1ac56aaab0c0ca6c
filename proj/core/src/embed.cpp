#include "stpilot/embed.hpp"

#include <cmath>

#include "stpilot/error.hpp"
#include "stpilot/rng.hpp"

namespace stpilot::embed {

FeatureTensor sinpe(std::span<const double> times, int dim, double base) {
  require(dim > 0 && dim % 2 == 0, ErrorKind::InvalidArgument,
          "sinusoidal embedding dimension must be even and positive, got " + std::to_string(dim));
  require(base > 1.0, ErrorKind::InvalidArgument, "sinusoidal base must be > 1");
  FeatureTensor e(static_cast<Eigen::Index>(times.size()), dim);
  for (int i = 0; i < dim / 2; ++i) {
    const double freq = std::pow(base, -2.0 * i / dim);
    for (std::size_t f = 0; f < times.size(); ++f) {
      const double phase = times[f] * freq;
      e(static_cast<Eigen::Index>(f), 2 * i) = std::sin(phase);
      e(static_cast<Eigen::Index>(f), 2 * i + 1) = std::cos(phase);
    }
  }
  return e;
}

FeatureTensor sinpe(const timewarp::TimeSignal& signal, int dim, double base) {
  return sinpe(signal.values(), dim, base);
}

FeatureTensor compress_time(const FeatureTensor& e, const ConvStack& stack) {
  require(e.cols() == stack.channels(), ErrorKind::ShapeMismatch,
          "embedding has " + std::to_string(e.cols()) + " channels, stack expects " +
              std::to_string(stack.channels()));
  require(e.allFinite(), ErrorKind::InvalidArgument, "embedding has non-finite entries");
  return stack.forward(e);
}

// ---- MlpCompressor --------------------------------------------------------

FeatureTensor MlpCompressor::forward(const FeatureTensor& e) const {
  require(e.rows() == frames && e.cols() == channels, ErrorKind::ShapeMismatch,
          "MLP compressor expects " + std::to_string(frames) + "x" + std::to_string(channels));
  const FeatureTensor flat = Eigen::Map<const FeatureTensor>(e.data(), 1, e.size());
  FeatureTensor h = fc1.forward(flat);
  h = h.unaryExpr([a = activation](double v) { return activate(a, v); });
  const FeatureTensor y = fc2.forward(h);
  return Eigen::Map<const FeatureTensor>(y.data(), output_frames, channels);
}

FeatureTensor MlpCompressor::backward(const FeatureTensor& e, const FeatureTensor& grad_out) {
  const FeatureTensor flat = Eigen::Map<const FeatureTensor>(e.data(), 1, e.size());
  const FeatureTensor pre = fc1.forward(flat);
  const FeatureTensor post = pre.unaryExpr([a = activation](double v) { return activate(a, v); });
  const FeatureTensor g_flat = Eigen::Map<const FeatureTensor>(grad_out.data(), 1, grad_out.size());
  FeatureTensor g = fc2.backward(post, g_flat);
  for (Eigen::Index c = 0; c < g.cols(); ++c) g(0, c) *= activate_grad(activation, pre(0, c));
  const FeatureTensor gx = fc1.backward(flat, g);
  return Eigen::Map<const FeatureTensor>(gx.data(), frames, channels);
}

void MlpCompressor::zero_grad() {
  fc1.zero_grad();
  fc2.zero_grad();
}

void MlpCompressor::visit(const std::string& prefix, const ParamVisitor& fn) {
  fc1.visit(prefix + ".fc1", fn);
  fc2.visit(prefix + ".fc2", fn);
}

// ---- construction -----------------------------------------------------------

TimeEncoder make_time_encoder(const EmbedConfig& cfg) {
  return {cfg.frames, cfg.sin_base, ConvStack(cfg.channels, cfg.activation, derive_seed(cfg.seed, 10))};
}

CameraEncoder make_camera_encoder(const EmbedConfig& cfg) {
  CameraEncoder enc{cfg.frames, Dense(12, cfg.channels),
                    ConvStack(cfg.channels, cfg.activation, derive_seed(cfg.seed, 21))};
  enc.lift.init_uniform(derive_seed(cfg.seed, 20));
  return enc;
}

MlpCompressor make_mlp_compressor(const EmbedConfig& cfg) {
  MlpCompressor mlp;
  mlp.frames = cfg.frames;
  mlp.channels = cfg.channels;
  mlp.output_frames = compressed_length(cfg.frames);
  mlp.sin_base = cfg.sin_base;
  mlp.activation = cfg.activation;
  mlp.fc1 = Dense(cfg.frames * cfg.channels, cfg.mlp_hidden);
  mlp.fc2 = Dense(cfg.mlp_hidden, mlp.output_frames * cfg.channels);
  mlp.fc1.init_uniform(derive_seed(cfg.seed, 30));
  mlp.fc2.init_uniform(derive_seed(cfg.seed, 31));
  return mlp;
}

// ---- encoders ---------------------------------------------------------------

FeatureTensor embed_time(const timewarp::TimeSignal& signal, const TimeEncoder& enc) {
  require(static_cast<int>(signal.size()) == enc.frames, ErrorKind::ShapeMismatch,
          "time encoder expects " + std::to_string(enc.frames) + " frames, got " +
              std::to_string(signal.size()));
  return compress_time(sinpe(signal, enc.channels(), enc.sin_base), enc.stack);
}

FeatureTensor flatten_trajectory(const geometry::Trajectory& traj) {
  FeatureTensor m(static_cast<Eigen::Index>(traj.size()), 12);
  for (std::size_t f = 0; f < traj.size(); ++f) {
    const auto v = traj[f].row_major();
    for (int c = 0; c < 12; ++c) m(static_cast<Eigen::Index>(f), c) = v[c];
  }
  return m;
}

FeatureTensor embed_camera(const geometry::Trajectory& traj, const CameraEncoder& enc) {
  require(static_cast<int>(traj.size()) == enc.frames, ErrorKind::ShapeMismatch,
          "camera encoder expects " + std::to_string(enc.frames) + " poses, got " +
              std::to_string(traj.size()));
  return compress_time(enc.lift.forward(flatten_trajectory(traj)), enc.stack);
}

std::vector<int> uniform_indices(int frames, int output_frames) {
  require(output_frames >= 1, ErrorKind::InvalidArgument, "output length must be >= 1");
  require(output_frames <= frames, ErrorKind::ShapeMismatch,
          "cannot sample " + std::to_string(output_frames) + " rows from " +
              std::to_string(frames));
  std::vector<int> idx(static_cast<std::size_t>(output_frames));
  if (output_frames == 1) return idx;
  for (int j = 0; j < output_frames; ++j) {
    // Integer rounding of j (F-1) / (F'-1), half up.
    const long num = static_cast<long>(j) * (frames - 1);
    const long den = output_frames - 1;
    idx[j] = static_cast<int>((2 * num + den) / (2 * den));
  }
  return idx;
}

FeatureTensor variant_uniform(const timewarp::TimeSignal& signal, int dim, int output_frames,
                              double base) {
  const auto idx = uniform_indices(static_cast<int>(signal.size()), output_frames);
  std::vector<double> picked;
  picked.reserve(idx.size());
  for (int i : idx) picked.push_back(signal[static_cast<std::size_t>(i)]);
  return sinpe(picked, dim, base);
}

FeatureTensor variant_mlp(const timewarp::TimeSignal& signal, const MlpCompressor& mlp) {
  require(static_cast<int>(signal.size()) == mlp.frames, ErrorKind::ShapeMismatch,
          "MLP compressor expects " + std::to_string(mlp.frames) + " frames, got " +
              std::to_string(signal.size()));
  return mlp.forward(sinpe(signal, mlp.channels, mlp.sin_base));
}

FeatureTensor condition_tokens(const ConditionInputs& in, const ConditioningWeights& w,
                               ConditioningMode mode) {
  const int out_frames = w.camera.output_frames();
  const int d = w.camera.channels();
  require(w.time.output_frames() == out_frames && w.time.channels() == d,
          ErrorKind::ShapeMismatch, "time and camera encoders disagree on output shape");
  for (const FeatureTensor* x : {&in.x_src, &in.x_trg}) {
    require(x->rows() == out_frames && x->cols() == d, ErrorKind::ShapeMismatch,
            "token tensor must be " + std::to_string(out_frames) + "x" + std::to_string(d) +
                ", got " + std::to_string(x->rows()) + "x" + std::to_string(x->cols()));
  }

  FeatureTensor trg = in.x_trg + embed_camera(in.c_trg, w.camera);
  FeatureTensor src = in.x_src;
  if (mode == ConditioningMode::SourceAware) {
    trg += embed_time(in.t_trg, w.time);
    src += embed_camera(in.c_src, w.camera);
    src += embed_time(in.t_src, w.time);
  } else {
    src += embed_camera(in.c_trg, w.camera);
  }

  FeatureTensor out(2 * out_frames, d);
  out.topRows(out_frames) = trg;
  out.bottomRows(out_frames) = src;
  return out;
}

EmbedModel EmbedModel::create(const EmbedConfig& cfg) {
  require(cfg.frames >= 1 && cfg.channels >= 2 && cfg.channels % 2 == 0 && cfg.mlp_hidden >= 1,
          ErrorKind::InvalidArgument, "bad embedding config");
  return {cfg, make_time_encoder(cfg), make_camera_encoder(cfg), make_mlp_compressor(cfg)};
}

void EmbedModel::visit(const ParamVisitor& fn) {
  time.stack.visit("time", fn);
  camera.lift.visit("camera.lift", fn);
  camera.stack.visit("camera", fn);
  mlp.visit("mlp", fn);
}

nlohmann::json to_json(const EmbedConfig& cfg) {
  return {{"frames", cfg.frames},         {"channels", cfg.channels},
          {"sin_base", cfg.sin_base},     {"activation", to_string(cfg.activation)},
          {"mlp_hidden", cfg.mlp_hidden}, {"seed", cfg.seed}};
}

EmbedConfig embed_config_from_json(const nlohmann::json& j) {
  EmbedConfig cfg;
  cfg.frames = j.value("frames", cfg.frames);
  cfg.channels = j.value("channels", cfg.channels);
  cfg.sin_base = j.value("sin_base", cfg.sin_base);
  cfg.activation = parse_activation(j.value("activation", std::string(to_string(cfg.activation))));
  cfg.mlp_hidden = j.value("mlp_hidden", cfg.mlp_hidden);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

}  // namespace stpilot::embed
