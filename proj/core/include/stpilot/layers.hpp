#pragma once

// Small differentiable building blocks for the conditioning encoders.
//
// Tensors are [frames x channels] row-major matrices. Every layer exposes a
// forward pass and a backward pass that, given the upstream gradient, returns
// the input gradient and accumulates parameter gradients.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace stpilot::embed {

using FeatureTensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { Identity, Silu, Tanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

double activate(Activation a, double x);
double activate_grad(Activation a, double x);

/// Visits a named parameter block, its logical shape, and its gradient buffer
/// of equal size.
using ParamVisitor = std::function<void(const std::string& name, const std::vector<int>& shape,
                                        std::vector<double>& value, std::vector<double>& grad)>;

/// Strided 1-D convolution over the frame axis with edge-replicate padding.
/// Output length is ceil(L / stride) for kernel 3 / stride 2 / pad 1.
struct Conv1d {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  int stride = 2;
  int pad = 1;
  std::vector<double> weight;  ///< [out][in][kernel]
  std::vector<double> bias;    ///< [out]
  std::vector<double> weight_grad;
  std::vector<double> bias_grad;

  Conv1d() = default;
  Conv1d(int in, int out, int kernel = 3, int stride = 2, int pad = 1);

  int output_length(int input_length) const;
  double& w(int o, int i, int k) { return weight[(o * in_channels + i) * kernel + k]; }
  double w(int o, int i, int k) const { return weight[(o * in_channels + i) * kernel + k]; }

  FeatureTensor forward(const FeatureTensor& x) const;
  /// Returns dL/dx; adds dL/dW and dL/db into the grad buffers.
  FeatureTensor backward(const FeatureTensor& x, const FeatureTensor& grad_out);

  void init_uniform(std::uint64_t seed);
  void zero_grad();
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

/// Row-wise affine map y = x W^T + b.
struct Dense {
  int in_features = 0;
  int out_features = 0;
  std::vector<double> weight;  ///< [out][in]
  std::vector<double> bias;
  std::vector<double> weight_grad;
  std::vector<double> bias_grad;

  Dense() = default;
  Dense(int in, int out);

  FeatureTensor forward(const FeatureTensor& x) const;
  FeatureTensor backward(const FeatureTensor& x, const FeatureTensor& grad_out);

  void init_uniform(std::uint64_t seed);
  void zero_grad();
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

/// Two stride-2 convolutions with a pointwise activation between them.
/// 81 frames -> 41 -> 21; 120 -> 60 -> 30.
struct ConvStack {
  Conv1d first;
  Conv1d second;
  Activation activation = Activation::Silu;

  ConvStack() = default;
  ConvStack(int channels, Activation activation, std::uint64_t seed);

  int channels() const { return first.in_channels; }
  int output_length(int input_length) const;

  FeatureTensor forward(const FeatureTensor& x) const;
  FeatureTensor backward(const FeatureTensor& x, const FeatureTensor& grad_out);

  void zero_grad();
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

/// Composed temporal length map of the default stack: ceil(ceil(F/2)/2).
int compressed_length(int frames);

}  // namespace stpilot::embed
