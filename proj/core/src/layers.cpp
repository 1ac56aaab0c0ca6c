#include "stpilot/layers.hpp"

#include <algorithm>
#include <cmath>

#include "stpilot/error.hpp"
#include "stpilot/rng.hpp"

namespace stpilot::embed {
namespace {

void fill_uniform(std::vector<double>& v, double bound, Rng& rng) {
  for (auto& x : v) x = rng.uniform(-bound, bound);
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Silu: return "silu";
    case Activation::Tanh: return "tanh";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : {Activation::Identity, Activation::Silu, Activation::Tanh}) {
    if (to_string(a) == name) return a;
  }
  fail(ErrorKind::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Silu: return x / (1.0 + std::exp(-x));
    case Activation::Tanh: return std::tanh(x);
  }
  return x;
}

double activate_grad(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Silu: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 + x * (1.0 - s));
    }
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

// ---- Conv1d ---------------------------------------------------------------

Conv1d::Conv1d(int in, int out, int kernel_size, int stride_, int pad_)
    : in_channels(in), out_channels(out), kernel(kernel_size), stride(stride_), pad(pad_),
      weight(static_cast<std::size_t>(in) * out * kernel_size, 0.0),
      bias(static_cast<std::size_t>(out), 0.0),
      weight_grad(weight.size(), 0.0),
      bias_grad(bias.size(), 0.0) {
  require(in > 0 && out > 0 && kernel_size > 0 && stride_ > 0 && pad_ >= 0,
          ErrorKind::InvalidArgument, "bad Conv1d geometry");
}

int Conv1d::output_length(int input_length) const {
  return (input_length + 2 * pad - kernel) / stride + 1;
}

FeatureTensor Conv1d::forward(const FeatureTensor& x) const {
  require(x.cols() == in_channels, ErrorKind::ShapeMismatch,
          "Conv1d expects " + std::to_string(in_channels) + " channels, got " +
              std::to_string(x.cols()));
  const int len = static_cast<int>(x.rows());
  require(len >= 1, ErrorKind::ShapeMismatch, "Conv1d input has no frames");
  const int out_len = output_length(len);
  FeatureTensor y(out_len, out_channels);
  for (int t = 0; t < out_len; ++t) {
    for (int o = 0; o < out_channels; ++o) {
      double acc = bias[o];
      for (int k = 0; k < kernel; ++k) {
        const int src = std::clamp(t * stride + k - pad, 0, len - 1);
        for (int i = 0; i < in_channels; ++i) acc += w(o, i, k) * x(src, i);
      }
      y(t, o) = acc;
    }
  }
  return y;
}

FeatureTensor Conv1d::backward(const FeatureTensor& x, const FeatureTensor& grad_out) {
  const int len = static_cast<int>(x.rows());
  const int out_len = output_length(len);
  require(grad_out.rows() == out_len && grad_out.cols() == out_channels,
          ErrorKind::ShapeMismatch, "Conv1d upstream gradient has the wrong shape");
  FeatureTensor gx = FeatureTensor::Zero(len, in_channels);
  for (int t = 0; t < out_len; ++t) {
    for (int o = 0; o < out_channels; ++o) {
      const double g = grad_out(t, o);
      bias_grad[o] += g;
      for (int k = 0; k < kernel; ++k) {
        const int src = std::clamp(t * stride + k - pad, 0, len - 1);
        for (int i = 0; i < in_channels; ++i) {
          weight_grad[(o * in_channels + i) * kernel + k] += g * x(src, i);
          gx(src, i) += g * w(o, i, k);
        }
      }
    }
  }
  return gx;
}

void Conv1d::init_uniform(std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel));
  fill_uniform(weight, bound, rng);
  fill_uniform(bias, bound, rng);
}

void Conv1d::zero_grad() {
  std::fill(weight_grad.begin(), weight_grad.end(), 0.0);
  std::fill(bias_grad.begin(), bias_grad.end(), 0.0);
}

void Conv1d::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".weight", {out_channels, in_channels, kernel}, weight, weight_grad);
  fn(prefix + ".bias", {out_channels}, bias, bias_grad);
}

// ---- Dense ----------------------------------------------------------------

Dense::Dense(int in, int out)
    : in_features(in), out_features(out),
      weight(static_cast<std::size_t>(in) * out, 0.0),
      bias(static_cast<std::size_t>(out), 0.0),
      weight_grad(weight.size(), 0.0),
      bias_grad(bias.size(), 0.0) {
  require(in > 0 && out > 0, ErrorKind::InvalidArgument, "bad Dense geometry");
}

FeatureTensor Dense::forward(const FeatureTensor& x) const {
  require(x.cols() == in_features, ErrorKind::ShapeMismatch,
          "Dense expects " + std::to_string(in_features) + " features, got " +
              std::to_string(x.cols()));
  FeatureTensor y(x.rows(), out_features);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int o = 0; o < out_features; ++o) {
      double acc = bias[o];
      const double* wrow = &weight[static_cast<std::size_t>(o) * in_features];
      for (int i = 0; i < in_features; ++i) acc += wrow[i] * x(r, i);
      y(r, o) = acc;
    }
  }
  return y;
}

FeatureTensor Dense::backward(const FeatureTensor& x, const FeatureTensor& grad_out) {
  require(grad_out.rows() == x.rows() && grad_out.cols() == out_features,
          ErrorKind::ShapeMismatch, "Dense upstream gradient has the wrong shape");
  FeatureTensor gx = FeatureTensor::Zero(x.rows(), in_features);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int o = 0; o < out_features; ++o) {
      const double g = grad_out(r, o);
      bias_grad[o] += g;
      const std::size_t base = static_cast<std::size_t>(o) * in_features;
      for (int i = 0; i < in_features; ++i) {
        weight_grad[base + i] += g * x(r, i);
        gx(r, i) += g * weight[base + i];
      }
    }
  }
  return gx;
}

void Dense::init_uniform(std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  fill_uniform(weight, bound, rng);
  fill_uniform(bias, bound, rng);
}

void Dense::zero_grad() {
  std::fill(weight_grad.begin(), weight_grad.end(), 0.0);
  std::fill(bias_grad.begin(), bias_grad.end(), 0.0);
}

void Dense::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".weight", {out_features, in_features}, weight, weight_grad);
  fn(prefix + ".bias", {out_features}, bias, bias_grad);
}

// ---- ConvStack ------------------------------------------------------------

ConvStack::ConvStack(int channels, Activation act, std::uint64_t seed)
    : first(channels, channels), second(channels, channels), activation(act) {
  first.init_uniform(derive_seed(seed, 0));
  second.init_uniform(derive_seed(seed, 1));
}

int ConvStack::output_length(int input_length) const {
  return second.output_length(first.output_length(input_length));
}

FeatureTensor ConvStack::forward(const FeatureTensor& x) const {
  FeatureTensor h = first.forward(x);
  h = h.unaryExpr([a = activation](double v) { return activate(a, v); });
  return second.forward(h);
}

FeatureTensor ConvStack::backward(const FeatureTensor& x, const FeatureTensor& grad_out) {
  const FeatureTensor pre = first.forward(x);
  const FeatureTensor post = pre.unaryExpr([a = activation](double v) { return activate(a, v); });
  FeatureTensor g = second.backward(post, grad_out);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) *= activate_grad(activation, pre(r, c));
  }
  return first.backward(x, g);
}

void ConvStack::zero_grad() {
  first.zero_grad();
  second.zero_grad();
}

void ConvStack::visit(const std::string& prefix, const ParamVisitor& fn) {
  first.visit(prefix + ".conv1", fn);
  second.visit(prefix + ".conv2", fn);
}

int compressed_length(int frames) {
  require(frames >= 1, ErrorKind::InvalidArgument, "frame count must be >= 1");
  const int half = (frames + 1) / 2;
  return (half + 1) / 2;
}

}  // namespace stpilot::embed
