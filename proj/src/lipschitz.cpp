#include "ot/lipschitz.hpp"

#include <cmath>

#include "ot/rng.hpp"

namespace ot {
namespace {

constexpr std::uint64_t kDefaultPowerSeed = 0x0770bef5u;

int conv_out_extent(int in, int kernel, int stride, int padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

}  // namespace

ConvOperator::ConvOperator(std::vector<double> kernel, int out_channels, int in_channels,
                           int kernel_h, int kernel_w, ConvShape input_shape, int stride,
                           int padding)
    : kernel_(std::move(kernel)),
      out_channels_(out_channels),
      in_channels_(in_channels),
      kernel_h_(kernel_h),
      kernel_w_(kernel_w),
      input_(input_shape),
      stride_(stride),
      padding_(padding) {
  if (out_channels_ < 1 || in_channels_ < 1 || kernel_h_ < 1 || kernel_w_ < 1)
    throw InvalidArgument("conv: kernel dimensions must be positive");
  if (kernel_.size() != static_cast<std::size_t>(out_channels_) * in_channels_ * kernel_h_ *
                            kernel_w_)
    throw InvalidArgument("conv: kernel buffer does not match the declared dimensions");
  if (input_.channels != in_channels_)
    throw InvalidArgument("conv: input channels do not match the kernel");
  if (stride_ < 1) throw InvalidArgument("conv: stride must be positive");
  if (padding_ < 0) throw InvalidArgument("conv: padding must be nonnegative");

  const int oh = conv_out_extent(input_.height, kernel_h_, stride_, padding_);
  const int ow = conv_out_extent(input_.width, kernel_w_, stride_, padding_);
  if (oh < 1 || ow < 1) throw InvalidArgument("conv: output would be empty");
  output_ = {out_channels_, oh, ow};
}

Vector ConvOperator::forward(const Vector& x) const {
  if (x.size() != input_.size()) throw InvalidArgument("conv forward: input size mismatch");
  Vector out = Vector::Zero(output_.size());
  const int h = input_.height, w = input_.width;
  const int oh = output_.height, ow = output_.width;
  for (int oc = 0; oc < out_channels_; ++oc)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = 0.0;
        for (int ic = 0; ic < in_channels_; ++ic)
          for (int ky = 0; ky < kernel_h_; ++ky) {
            const int iy = oy * stride_ - padding_ + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kernel_w_; ++kx) {
              const int ix = ox * stride_ - padding_ + kx;
              if (ix < 0 || ix >= w) continue;
              acc += kernel_at(oc, ic, ky, kx) * x[(ic * h + iy) * w + ix];
            }
          }
        out[(oc * oh + oy) * ow + ox] = acc;
      }
  return out;
}

Vector ConvOperator::adjoint(const Vector& y) const {
  if (y.size() != output_.size()) throw InvalidArgument("conv adjoint: input size mismatch");
  Vector out = Vector::Zero(input_.size());
  const int h = input_.height, w = input_.width;
  const int oh = output_.height, ow = output_.width;
  for (int oc = 0; oc < out_channels_; ++oc)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const double v = y[(oc * oh + oy) * ow + ox];
        if (v == 0.0) continue;
        for (int ic = 0; ic < in_channels_; ++ic)
          for (int ky = 0; ky < kernel_h_; ++ky) {
            const int iy = oy * stride_ - padding_ + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kernel_w_; ++kx) {
              const int ix = ox * stride_ - padding_ + kx;
              if (ix < 0 || ix >= w) continue;
              out[(ic * h + iy) * w + ix] += kernel_at(oc, ic, ky, kx) * v;
            }
          }
      }
  return out;
}

PowerState PowerState::gaussian(int dim, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector u(dim);
  for (int i = 0; i < dim; ++i) u[i] = rng.next_gaussian();
  const double norm = u.norm();
  if (norm == 0.0) u[0] = 1.0;  // cannot happen with the generator above
  else u /= norm;
  return PowerState{std::move(u)};
}

std::pair<double, Matrix> spectral_norm_matrix(const Matrix& w, int iters,
                                               PowerState& state) {
  if (w.rows() < 1 || w.cols() < 1) throw InvalidArgument("spectral norm of empty matrix");
  if (w.cwiseAbs().maxCoeff() == 0.0) throw DegenerateInput("spectral norm of zero matrix");
  if (state.u.size() != w.cols())
    throw InvalidArgument("power state dimension does not match the matrix");
  if (iters < 1) throw InvalidArgument("power method needs at least one iteration");

  for (int k = 0; k < iters; ++k) {
    Vector next = w.transpose() * (w * state.u);
    const double norm = next.norm();
    if (norm == 0.0)
      throw DegenerateInput("power iteration collapsed into the null space");
    state.u = next / norm;
  }
  const double sigma = (w * state.u).norm();
  return {sigma, Matrix(w / sigma)};
}

std::pair<double, Matrix> spectral_norm_matrix(const Matrix& w, int iters) {
  PowerState state = PowerState::gaussian(static_cast<int>(w.cols()), kDefaultPowerSeed);
  return spectral_norm_matrix(w, iters, state);
}

double spectral_norm_conv(const ConvOperator& op, int iters, PowerState& state) {
  bool all_zero = true;
  for (int oc = 0; oc < op.out_channels() && all_zero; ++oc)
    for (int ic = 0; ic < op.in_channels() && all_zero; ++ic)
      for (int ky = 0; ky < op.kernel_h() && all_zero; ++ky)
        for (int kx = 0; kx < op.kernel_w(); ++kx)
          if (op.kernel_at(oc, ic, ky, kx) != 0.0) {
            all_zero = false;
            break;
          }
  if (all_zero) throw DegenerateInput("spectral norm of zero kernel");
  if (state.u.size() != op.input_shape().size())
    throw InvalidArgument("power state dimension does not match the operator");
  if (iters < 1) throw InvalidArgument("power method needs at least one iteration");

  for (int k = 0; k < iters; ++k) {
    Vector next = op.adjoint(op.forward(state.u));
    const double norm = next.norm();
    if (norm == 0.0)
      throw DegenerateInput("power iteration collapsed into the null space");
    state.u = next / norm;
  }
  return op.forward(state.u).norm();
}

double spectral_norm_conv(const ConvOperator& op, int iters) {
  PowerState state = PowerState::gaussian(op.input_shape().size(), kDefaultPowerSeed);
  return spectral_norm_conv(op, iters, state);
}

Matrix materialize_conv(const ConvOperator& op) {
  const int in_dim = op.input_shape().size();
  const int out_dim = op.output_shape().size();
  if (in_dim > 4096) throw InvalidArgument("materialize_conv: input dimension above guard");
  Matrix dense(out_dim, in_dim);
  Vector basis = Vector::Zero(in_dim);
  for (int j = 0; j < in_dim; ++j) {
    basis[j] = 1.0;
    dense.col(j) = op.forward(basis);
    basis[j] = 0.0;
  }
  return dense;
}

double reshaped_kernel_norm(const ConvOperator& op, int iters) {
  Matrix flat(op.out_channels(), op.in_channels() * op.kernel_h() * op.kernel_w());
  for (int oc = 0; oc < op.out_channels(); ++oc) {
    int col = 0;
    for (int ic = 0; ic < op.in_channels(); ++ic)
      for (int ky = 0; ky < op.kernel_h(); ++ky)
        for (int kx = 0; kx < op.kernel_w(); ++kx) flat(oc, col++) = op.kernel_at(oc, ic, ky, kx);
  }
  return spectral_norm_matrix(flat, iters).first;
}

double apply_activation(Activation act, double s) {
  switch (act) {
    case Activation::LeakyRelu: return s > 0.0 ? s : 0.2 * s;
    case Activation::Relu: return s > 0.0 ? s : 0.0;
    case Activation::Identity: return s;
  }
  return s;
}

double activation_slope(Activation act, double s) {
  switch (act) {
    case Activation::LeakyRelu: return s > 0.0 ? 1.0 : 0.2;
    case Activation::Relu: return s > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

MlpCritic::MlpCritic(std::vector<CriticLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("critic needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const CriticLayer& l = layers_[i];
    if (l.weight.rows() != l.bias.size())
      throw InvalidArgument("critic layer bias does not match the weight rows");
    if (i + 1 < layers_.size() && layers_[i + 1].weight.cols() != l.weight.rows())
      throw InvalidArgument("critic layers do not chain");
  }
  if (layers_.back().weight.rows() != 1)
    throw InvalidArgument("critic output must be scalar");
}

MlpCritic make_mlp_critic(const std::vector<int>& dims, Activation hidden_act,
                          std::uint64_t seed) {
  if (dims.size() < 2) throw InvalidArgument("critic needs input and output dimensions");
  if (dims.back() != 1) throw InvalidArgument("critic output dimension must be 1");
  CounterRng rng(seed);
  std::vector<CriticLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    CriticLayer layer;
    layer.weight.resize(dims[i + 1], dims[i]);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims[i]));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        layer.weight(r, c) = scale * rng.next_gaussian();
    layer.bias = Vector::Zero(dims[i + 1]);
    layer.activation = (i + 2 == dims.size()) ? Activation::Identity : hidden_act;
    layers.push_back(std::move(layer));
  }
  return MlpCritic(std::move(layers));
}

namespace {

struct ForwardTrace {
  std::vector<Vector> pre;   // s_i = W_i z_{i-1} + b_i
  std::vector<Vector> post;  // z_i = act(s_i)
};

// Evaluate with per-layer weight scales (1/sigma under spectral
// normalization; all ones otherwise).
double forward_scaled(const MlpCritic& net, const std::vector<double>& scale, const Vector& x,
                      ForwardTrace* trace) {
  Vector z = x;
  const auto& layers = net.layers();
  if (trace) {
    trace->pre.resize(layers.size());
    trace->post.resize(layers.size());
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Vector s = scale[i] * (layers[i].weight * z) + layers[i].bias;
    z.resize(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k)
      z[k] = apply_activation(layers[i].activation, s[k]);
    if (trace) {
      trace->pre[i] = s;
      trace->post[i] = z;
    }
  }
  return z[0];
}

// Reverse pass producing df/ds_i for every layer; returns the input gradient.
Vector backward_deltas(const MlpCritic& net, const std::vector<double>& scale,
                       const ForwardTrace& trace, std::vector<Vector>* deltas_out) {
  const auto& layers = net.layers();
  const int depth = static_cast<int>(layers.size());
  std::vector<Vector> deltas(depth);

  Vector delta(1);
  delta[0] = activation_slope(layers[depth - 1].activation, trace.pre[depth - 1][0]);
  deltas[depth - 1] = delta;
  for (int i = depth - 2; i >= 0; --i) {
    Vector back = scale[i + 1] * (layers[i + 1].weight.transpose() * deltas[i + 1]);
    deltas[i].resize(back.size());
    for (Eigen::Index k = 0; k < back.size(); ++k)
      deltas[i][k] = activation_slope(layers[i].activation, trace.pre[i][k]) * back[k];
  }
  Vector input_grad = scale[0] * (layers[0].weight.transpose() * deltas[0]);
  if (deltas_out) *deltas_out = std::move(deltas);
  return input_grad;
}

struct ParamGrads {
  std::vector<Matrix> w;
  std::vector<Vector> b;

  explicit ParamGrads(const MlpCritic& net) {
    for (const CriticLayer& l : net.layers()) {
      w.emplace_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
      b.emplace_back(Vector::Zero(l.bias.size()));
    }
  }
};

// Accumulate coeff * d f(x) / d theta. Gradients are taken with respect to
// the raw weights; the scale chain rule is folded in.
void accumulate_value_grads(const MlpCritic& net, const std::vector<double>& scale,
                            const Vector& x, double coeff, ParamGrads& grads) {
  ForwardTrace trace;
  forward_scaled(net, scale, x, &trace);
  std::vector<Vector> deltas;
  backward_deltas(net, scale, trace, &deltas);
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Vector& input = (i == 0) ? x : trace.post[i - 1];
    grads.w[i].noalias() += (coeff * scale[i]) * (deltas[i] * input.transpose());
    grads.b[i] += coeff * deltas[i];
  }
}

// Accumulate coeff * d/dtheta [ lambda (|grad_x f| - 1)^2 ] at x. Piecewise
// linear activations make the activation pattern locally constant, so the
// derivative of the input gradient with respect to the weights reduces to a
// forward tangent sweep plus its adjoint; biases get no contribution.
double accumulate_penalty_grads(const MlpCritic& net, const std::vector<double>& scale,
                                const Vector& x, double lambda, double coeff,
                                ParamGrads& grads) {
  ForwardTrace trace;
  forward_scaled(net, scale, x, &trace);
  std::vector<Vector> deltas;
  Vector v = backward_deltas(net, scale, trace, &deltas);
  const double r = std::max(v.norm(), 1e-12);
  const double penalty = lambda * (r - 1.0) * (r - 1.0);

  const auto& layers = net.layers();
  const int depth = static_cast<int>(layers.size());

  // h(theta) = <grad_x f, w> with w fixed; tangent sweep through the frozen
  // activation slopes.
  Vector w_dir = (2.0 * lambda * (r - 1.0) / r) * v;
  std::vector<Vector> tangents(depth);  // p_i, post-slope
  Vector p = w_dir;
  for (int i = 0; i < depth; ++i) {
    Vector q = scale[i] * (layers[i].weight * p);
    for (Eigen::Index k = 0; k < q.size(); ++k)
      q[k] *= activation_slope(layers[i].activation, trace.pre[i][k]);
    tangents[i] = q;
    p = q;
  }

  // Adjoint of the tangent sweep: dh/dW_i = (D_i gamma_i) p_{i-1}'.
  Vector gamma(1);
  gamma[0] = 1.0;
  for (int i = depth - 1; i >= 0; --i) {
    Vector cot_q(gamma.size());
    for (Eigen::Index k = 0; k < gamma.size(); ++k)
      cot_q[k] = activation_slope(layers[i].activation, trace.pre[i][k]) * gamma[k];
    const Vector& input = (i == 0) ? w_dir : tangents[i - 1];
    grads.w[i].noalias() += (coeff * scale[i]) * (cot_q * input.transpose());
    gamma = scale[i] * (layers[i].weight.transpose() * cot_q);
  }
  return penalty;
}

void adam_step(AdamState& adam, MlpCritic& net, const ParamGrads& ascent) {
  const auto& layers = net.layers();
  if (adam.m_w.empty()) {
    for (const CriticLayer& l : layers) {
      adam.m_w.emplace_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
      adam.v_w.emplace_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
      adam.m_b.emplace_back(Vector::Zero(l.bias.size()));
      adam.v_b.emplace_back(Vector::Zero(l.bias.size()));
    }
  }
  if (adam.m_w.size() != layers.size())
    throw InvalidArgument("adam state does not match the network");

  adam.step += 1;
  const AdamParams& p = adam.params;
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(adam.step));
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (adam.m_w[i].rows() != ascent.w[i].rows() || adam.m_w[i].cols() != ascent.w[i].cols())
      throw InvalidArgument("adam moment shape does not match the gradient");
    adam.m_w[i] = p.beta1 * adam.m_w[i] + (1.0 - p.beta1) * ascent.w[i];
    adam.v_w[i] =
        p.beta2 * adam.v_w[i] + (1.0 - p.beta2) * ascent.w[i].cwiseProduct(ascent.w[i]);
    adam.m_b[i] = p.beta1 * adam.m_b[i] + (1.0 - p.beta1) * ascent.b[i];
    adam.v_b[i] = p.beta2 * adam.v_b[i] + (1.0 - p.beta2) * ascent.b[i].cwiseProduct(ascent.b[i]);

    Matrix& w = net.layers()[i].weight;
    Vector& b = net.layers()[i].bias;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double mhat = adam.m_w[i](r, c) / bc1;
        const double vhat = adam.v_w[i](r, c) / bc2;
        w(r, c) += p.lr * mhat / (std::sqrt(vhat) + p.eps_hat);
      }
      const double mhat = adam.m_b[i][r] / bc1;
      const double vhat = adam.v_b[i][r] / bc2;
      b[r] += p.lr * mhat / (std::sqrt(vhat) + p.eps_hat);
    }
  }
}

double batch_objective(const MlpCritic& net, const std::vector<double>& scale,
                       const SampleBatch& x, const SampleBatch& y) {
  double fx = 0.0, fy = 0.0;
  for (int i = 0; i < x.size(); ++i)
    fx += forward_scaled(net, scale, x.data().row(i).transpose(), nullptr);
  for (int j = 0; j < y.size(); ++j)
    fy += forward_scaled(net, scale, y.data().row(j).transpose(), nullptr);
  return fx / x.size() - fy / y.size();
}

}  // namespace

double critic_value(const MlpCritic& net, const Vector& x) {
  std::vector<double> scale(net.depth(), 1.0);
  return forward_scaled(net, scale, x, nullptr);
}

std::pair<double, Vector> critic_value_and_gradient(const MlpCritic& net, const Vector& x) {
  if (x.size() != net.input_dim())
    throw InvalidArgument("critic input dimension mismatch");
  std::vector<double> scale(net.depth(), 1.0);
  ForwardTrace trace;
  const double value = forward_scaled(net, scale, x, &trace);
  Vector grad = backward_deltas(net, scale, trace, nullptr);
  return {value, std::move(grad)};
}

double lipschitz_upper_bound(const MlpCritic& net) {
  double bound = 1.0;
  for (const CriticLayer& l : net.layers())
    bound *= spectral_norm_matrix(l.weight, 500).first;
  return bound;
}

double lipschitz_upper_bound(const std::vector<ConvOperator>& stack) {
  double bound = 1.0;
  for (const ConvOperator& op : stack) bound *= spectral_norm_conv(op, 500);
  return bound;
}

double gradient_penalty(const MlpCritic& net, const SampleBatch& x, const SampleBatch& y,
                        double lambda, int n_points, std::uint64_t seed) {
  if (x.dim() != y.dim() || x.dim() != net.input_dim())
    throw InvalidArgument("gradient_penalty: dimension mismatch");
  if (n_points < 1) throw InvalidArgument("gradient_penalty: n_points must be positive");

  CounterRng rng(seed);
  double total = 0.0;
  for (int k = 0; k < n_points; ++k) {
    const int i = static_cast<int>(rng.next_u64() % x.size());
    const int j = static_cast<int>(rng.next_u64() % y.size());
    const double alpha = rng.next_double();
    Vector point =
        alpha * x.data().row(i).transpose() + (1.0 - alpha) * y.data().row(j).transpose();
    auto [value, grad] = critic_value_and_gradient(net, point);
    (void)value;
    const double norm = grad.norm();
    total += lambda * (norm - 1.0) * (norm - 1.0);
  }
  return total / n_points;
}

FitResult fit_critic(MlpCritic& net, const SampleBatch& x, const SampleBatch& y,
                     CriticMode mode, AdamState& adam, int steps, const FitOptions& opts) {
  if (x.dim() != y.dim() || x.dim() != net.input_dim())
    throw InvalidArgument("fit_critic: dimension mismatch");
  if (steps < 1) throw InvalidArgument("fit_critic: steps must be positive");

  const int depth = net.depth();
  std::vector<PowerState> power;
  for (int i = 0; i < depth; ++i)
    power.push_back(PowerState::gaussian(static_cast<int>(net.layers()[i].weight.cols()),
                                         opts.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1))));

  FitResult result;
  std::vector<double> scale(depth, 1.0);
  for (int step = 0; step < steps; ++step) {
    if (mode == CriticMode::SpectralNormLayer) {
      for (int i = 0; i < depth; ++i) {
        auto [sigma, normalized] =
            spectral_norm_matrix(net.layers()[i].weight, opts.power_iters, power[i]);
        (void)normalized;
        scale[i] = 1.0 / sigma;
      }
    }

    result.history.push_back(batch_objective(net, scale, x, y));

    ParamGrads grads(net);
    for (int i = 0; i < x.size(); ++i)
      accumulate_value_grads(net, scale, x.data().row(i).transpose(), 1.0 / x.size(), grads);
    for (int j = 0; j < y.size(); ++j)
      accumulate_value_grads(net, scale, y.data().row(j).transpose(), -1.0 / y.size(), grads);

    if (mode == CriticMode::GradientPenalty) {
      CounterRng rng(opts.seed, static_cast<std::uint64_t>(step) + 1);
      for (int k = 0; k < opts.gp_points; ++k) {
        const int i = static_cast<int>(rng.next_u64() % x.size());
        const int j = static_cast<int>(rng.next_u64() % y.size());
        const double alpha = rng.next_double();
        Vector point = alpha * x.data().row(i).transpose() +
                       (1.0 - alpha) * y.data().row(j).transpose();
        accumulate_penalty_grads(net, scale, point, opts.gp_lambda,
                                 -1.0 / opts.gp_points, grads);
      }
    }

    adam_step(adam, net, grads);

    if (mode == CriticMode::SpectralNormProject) {
      // Unconditional division, matching the power-method normalization
      // line: the raw weights live on the sigma = 1 sphere.
      for (int i = 0; i < depth; ++i) {
        auto [sigma, normalized] =
            spectral_norm_matrix(net.layers()[i].weight, opts.power_iters, power[i]);
        (void)normalized;
        net.layers()[i].weight /= sigma;
      }
    }
  }

  if (mode == CriticMode::SpectralNormLayer || mode == CriticMode::SpectralNormProject) {
    for (int i = 0; i < depth; ++i) {
      auto [sigma, normalized] =
          spectral_norm_matrix(net.layers()[i].weight, opts.power_iters, power[i]);
      (void)normalized;
      result.layer_sigmas.push_back(sigma);
      if (mode == CriticMode::SpectralNormLayer) scale[i] = 1.0 / sigma;
    }
  }
  result.estimate = batch_objective(net, scale, x, y);
  return result;
}

}  // namespace ot
