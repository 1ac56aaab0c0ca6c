#pragma once

// Conditioning encoders: sinusoidal animation-time embedding, temporal
// compression from F frames to F' latent frames, the camera encoder over
// flattened extrinsics, and the additive conditioning of video tokens.
//
// The spatial token axis is collapsed: each frame carries one channel vector.

#include <cstdint>
#include <filesystem>
#include <span>

#include "stpilot/geometry.hpp"
#include "stpilot/layers.hpp"
#include "stpilot/timewarp.hpp"

namespace stpilot::embed {

struct EmbedConfig {
  int frames = 81;        ///< F, the pixel-frame count the encoders accept
  int channels = 64;      ///< D
  double sin_base = 10000.0;
  Activation activation = Activation::Silu;
  int mlp_hidden = 256;
  std::uint64_t seed = 0;
};

/// Row f is the interleaved encoding of t_f: [sin(t w_0), cos(t w_0),
/// sin(t w_1), ...] with w_i = base^(-2i/dim). `dim` must be even.
FeatureTensor sinpe(std::span<const double> times, int dim, double base = 10000.0);
FeatureTensor sinpe(const timewarp::TimeSignal& signal, int dim, double base = 10000.0);

/// Applies the two-layer stack along the frame axis.
FeatureTensor compress_time(const FeatureTensor& e, const ConvStack& stack);

/// E_ani: sinusoidal embedding followed by learned temporal compression.
struct TimeEncoder {
  int frames = 81;
  double sin_base = 10000.0;
  ConvStack stack;

  int channels() const { return stack.channels(); }
  int output_frames() const { return stack.output_length(frames); }
};

/// E_cam: per-frame linear lift of the 12 extrinsic values to D channels,
/// then the same temporal compression contract as the time encoder.
struct CameraEncoder {
  int frames = 81;
  Dense lift;
  ConvStack stack;

  int channels() const { return lift.out_features; }
  int output_frames() const { return stack.output_length(frames); }
};

/// Ablation variant: flattened F x D embedding, two dense layers to F' x D.
struct MlpCompressor {
  int frames = 81;
  int channels = 64;
  int output_frames = 21;
  double sin_base = 10000.0;
  Activation activation = Activation::Silu;
  Dense fc1;
  Dense fc2;

  FeatureTensor forward(const FeatureTensor& e) const;
  FeatureTensor backward(const FeatureTensor& e, const FeatureTensor& grad_out);
  void zero_grad();
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

TimeEncoder make_time_encoder(const EmbedConfig& cfg);
CameraEncoder make_camera_encoder(const EmbedConfig& cfg);
MlpCompressor make_mlp_compressor(const EmbedConfig& cfg);

FeatureTensor embed_time(const timewarp::TimeSignal& signal, const TimeEncoder& enc);

/// Trajectory as an F x 12 matrix of row-major [R|t] values.
FeatureTensor flatten_trajectory(const geometry::Trajectory& traj);
FeatureTensor embed_camera(const geometry::Trajectory& traj, const CameraEncoder& enc);

/// Uniform-sampling variant: sinpe rows at `output_frames` evenly spaced
/// indices round(j (F-1) / (F'-1)).
FeatureTensor variant_uniform(const timewarp::TimeSignal& signal, int dim, int output_frames,
                              double base = 10000.0);
std::vector<int> uniform_indices(int frames, int output_frames);

FeatureTensor variant_mlp(const timewarp::TimeSignal& signal, const MlpCompressor& mlp);

struct ConditioningWeights {
  TimeEncoder time;
  CameraEncoder camera;
};

enum class ConditioningMode {
  SourceAware,  ///< each half gets its own camera and time terms
  Legacy,       ///< both halves get E_cam(c_trg) and no time term
};

struct ConditionInputs {
  const FeatureTensor& x_src;
  const FeatureTensor& x_trg;
  const geometry::Trajectory& c_src;
  const geometry::Trajectory& c_trg;
  const timewarp::TimeSignal& t_src;
  const timewarp::TimeSignal& t_trg;
};

/// [x'_trg ; x'_src] stacked along the frame axis (2F' x D).
FeatureTensor condition_tokens(const ConditionInputs& in, const ConditioningWeights& w,
                               ConditioningMode mode = ConditioningMode::SourceAware);

/// Every trainable kernel of the conditioning path, for weight files.
struct EmbedModel {
  EmbedConfig config;
  TimeEncoder time;
  CameraEncoder camera;
  MlpCompressor mlp;

  static EmbedModel create(const EmbedConfig& cfg);
  void visit(const ParamVisitor& fn);
};

/// Writes `<stem>.bin` (little-endian float64, concatenated tensors) and
/// `<stem>.json` (config plus name/shape/offset per tensor).
void save_weights(const std::filesystem::path& stem, EmbedModel& model);
EmbedModel load_weights(const std::filesystem::path& stem);

nlohmann::json to_json(const EmbedConfig& cfg);
EmbedConfig embed_config_from_json(const nlohmann::json& j);

}  // namespace stpilot::embed
