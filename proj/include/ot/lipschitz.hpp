#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ot/core.hpp"

namespace ot {

struct ConvShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  int size() const { return channels * height * width; }
  bool operator==(const ConvShape&) const = default;
};

/// Linear map induced by a 2-D cross-correlation layer with symmetric zero
/// padding. Vectors are channel-major: index = (c*height + y)*width + x.
class ConvOperator {
 public:
  ConvOperator(std::vector<double> kernel, int out_channels, int in_channels, int kernel_h,
               int kernel_w, ConvShape input_shape, int stride, int padding);

  const ConvShape& input_shape() const { return input_; }
  const ConvShape& output_shape() const { return output_; }
  int out_channels() const { return out_channels_; }
  int in_channels() const { return in_channels_; }
  int kernel_h() const { return kernel_h_; }
  int kernel_w() const { return kernel_w_; }
  int stride() const { return stride_; }
  int padding() const { return padding_; }

  double kernel_at(int oc, int ic, int ky, int kx) const {
    return kernel_[((static_cast<std::size_t>(oc) * in_channels_ + ic) * kernel_h_ + ky) *
                       kernel_w_ +
                   kx];
  }

  Vector forward(const Vector& x) const;
  Vector adjoint(const Vector& y) const;

 private:
  std::vector<double> kernel_;
  int out_channels_, in_channels_, kernel_h_, kernel_w_;
  ConvShape input_;
  ConvShape output_;
  int stride_, padding_;
};

/// Persistent power-iteration vector, kept at unit norm.
struct PowerState {
  Vector u;

  static PowerState gaussian(int dim, std::uint64_t seed);
};

/// Power method on W'W: u <- W'Wu normalized, repeated `iters` times;
/// returns (sigma, W/sigma). The state warm-starts subsequent calls.
std::pair<double, Matrix> spectral_norm_matrix(const Matrix& w, int iters, PowerState& state);
std::pair<double, Matrix> spectral_norm_matrix(const Matrix& w, int iters);

/// Power method on the composed map adjoint(forward(.)), estimating the
/// operator norm of the matrix the convolution induces.
double spectral_norm_conv(const ConvOperator& op, int iters, PowerState& state);
double spectral_norm_conv(const ConvOperator& op, int iters);

/// Dense matrix of the convolution (columns are images of basis vectors);
/// guarded to input dimensions <= 4096. Test oracle for the operators above.
Matrix materialize_conv(const ConvOperator& op);

/// Spectral norm of the kernel reshaped to out_channels x (in*kh*kw); the
/// shortcut is generally a wrong estimate of the conv operator norm.
double reshaped_kernel_norm(const ConvOperator& op, int iters);

enum class Activation { LeakyRelu, Relu, Identity };  // leaky slope 0.2

double apply_activation(Activation act, double s);
double activation_slope(Activation act, double s);

struct CriticLayer {
  Matrix weight;
  Vector bias;
  Activation activation = Activation::LeakyRelu;
};

/// Fully connected scalar-output critic with 1-Lipschitz activations.
class MlpCritic {
 public:
  explicit MlpCritic(std::vector<CriticLayer> layers);

  const std::vector<CriticLayer>& layers() const { return layers_; }
  std::vector<CriticLayer>& layers() { return layers_; }
  int input_dim() const { return static_cast<int>(layers_.front().weight.cols()); }
  int depth() const { return static_cast<int>(layers_.size()); }

 private:
  std::vector<CriticLayer> layers_;
};

/// dims = {input, hidden..., 1}; hidden layers use `hidden_act`, the output
/// layer is linear. Weights are seeded normal with 1/sqrt(fan_in) scale.
MlpCritic make_mlp_critic(const std::vector<int>& dims, Activation hidden_act,
                          std::uint64_t seed);

double critic_value(const MlpCritic& net, const Vector& x);

/// f(x) and its exact input gradient by reverse accumulation.
std::pair<double, Vector> critic_value_and_gradient(const MlpCritic& net, const Vector& x);

/// Product of per-layer spectral norms (power method run to convergence).
double lipschitz_upper_bound(const MlpCritic& net);
double lipschitz_upper_bound(const std::vector<ConvOperator>& stack);

/// Mean of lambda (|grad f| - 1)^2 over n_points seeded interpolates
/// alpha * x_row + (1 - alpha) * y_row.
double gradient_penalty(const MlpCritic& net, const SampleBatch& x, const SampleBatch& y,
                        double lambda, int n_points, std::uint64_t seed);

struct AdamParams {
  double lr = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double eps_hat = 1e-8;
};

/// Moment accumulators for one critic (or generator); sized lazily on the
/// first step and bound to that parameter shape afterwards.
struct AdamState {
  AdamParams params;
  long step = 0;
  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;
};

enum class CriticMode { GradientPenalty, SpectralNormLayer, SpectralNormProject };

struct FitOptions {
  double gp_lambda = 1.0;
  int gp_points = 64;
  std::uint64_t seed = 0;
  int power_iters = 1;  // warm-started iterations per training step
};

struct FitResult {
  double estimate = 0.0;              // final mean f(X) - mean f(Y)
  std::vector<double> history;        // same objective per step, before the update
  std::vector<double> layer_sigmas;   // final per-layer norm estimates (sn modes)
};

/// Maximizes mean f(X) - mean f(Y) by Adam under one of three Lipschitz
/// controls: a gradient penalty subtracted from the loss, per-layer spectral
/// normalization inside the forward pass (sigma constant in the backward
/// pass, power vector persisted), or projection of the weights to sigma <= 1
/// after every step.
FitResult fit_critic(MlpCritic& net, const SampleBatch& x, const SampleBatch& y,
                     CriticMode mode, AdamState& adam, int steps,
                     const FitOptions& opts = {});

}  // namespace ot
