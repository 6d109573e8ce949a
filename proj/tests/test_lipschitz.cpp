#include <doctest.h>

#include "oracles.hpp"
#include "ot/lipschitz.hpp"
#include "ot/rng.hpp"
#include "ot/verification.hpp"

using namespace ot;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix w(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) w(i, j) = rng.next_gaussian();
  return w;
}

ConvOperator averaging_conv(int size, int stride = 1, int padding = 1) {
  std::vector<double> kernel(9, 1.0 / 9.0);
  return ConvOperator(kernel, 1, 1, 3, 3, ConvShape{1, size, size}, stride, padding);
}

}  // namespace

TEST_CASE("power method on a diagonal matrix") {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 0) = 3.0;
  w(1, 1) = 1.0;
  auto [sigma, normalized] = spectral_norm_matrix(w, 50);
  CHECK(sigma == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(normalized(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("isotropic matrix needs a single iteration") {
  Matrix w = 2.0 * Matrix::Identity(4, 4);
  auto [sigma, normalized] = spectral_norm_matrix(w, 1);
  (void)normalized;
  CHECK(sigma == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("power method matches a Jacobi eigensolver") {
  Matrix w = random_matrix(20, 30, 31);
  auto [sigma, normalized] = spectral_norm_matrix(w, 500);
  (void)normalized;
  CHECK(sigma == doctest::Approx(oracle::jacobi_spectral_norm(w)).epsilon(1e-7));
}

TEST_CASE("rayleigh estimate is non-decreasing across warm-started calls") {
  Matrix w = random_matrix(12, 12, 32);
  PowerState state = PowerState::gaussian(12, 7);
  double previous = 0.0;
  for (int k = 0; k < 30; ++k) {
    auto [sigma, normalized] = spectral_norm_matrix(w, 1, state);
    (void)normalized;
    CHECK(sigma >= previous - 1e-12);
    previous = sigma;
    CHECK(std::abs(state.u.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("zero matrix is degenerate") {
  Matrix w = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(spectral_norm_matrix(w, 10), DegenerateInput);
}

TEST_CASE("scalar 1x1 conv is plain multiplication") {
  ConvOperator op({2.0}, 1, 1, 1, 1, ConvShape{1, 5, 5}, 1, 0);
  CHECK(spectral_norm_conv(op, 10) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(reshaped_kernel_norm(op, 10) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("conv power method equals the materialized matrix norm") {
  ConvOperator op = averaging_conv(8);
  const double by_conv = spectral_norm_conv(op, 500);
  Matrix dense = materialize_conv(op);
  auto [by_matrix, normalized] = spectral_norm_matrix(dense, 500);
  (void)normalized;
  CHECK(by_conv == doctest::Approx(by_matrix).epsilon(1e-6));
}

TEST_CASE("reshaped kernel norm is visibly wrong for the averaging kernel") {
  ConvOperator op = averaging_conv(8);
  const double truth = spectral_norm_conv(op, 500);
  const double reshaped = reshaped_kernel_norm(op, 500);
  CHECK(std::abs(reshaped - truth) / truth > 0.05);
  CHECK(reshaped < truth);
}

TEST_CASE("materialized identity conv is the identity matrix") {
  ConvOperator op({1.0}, 1, 1, 1, 1, ConvShape{1, 3, 3}, 1, 0);
  Matrix dense = materialize_conv(op);
  CHECK((dense - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("materialized adjoint is the transpose") {
  CounterRng rng(33);
  std::vector<double> kernel(2 * 1 * 3 * 3);
  for (double& k : kernel) k = rng.next_gaussian();
  ConvOperator op(kernel, 2, 1, 3, 3, ConvShape{1, 6, 6}, 2, 1);
  Matrix dense = materialize_conv(op);
  CHECK(dense.rows() == op.output_shape().size());
  CHECK(dense.cols() == op.input_shape().size());

  // adjoint materialized column by column
  Matrix adj(op.input_shape().size(), op.output_shape().size());
  Vector basis = Vector::Zero(op.output_shape().size());
  for (int j = 0; j < op.output_shape().size(); ++j) {
    basis[j] = 1.0;
    adj.col(j) = op.adjoint(basis);
    basis[j] = 0.0;
  }
  CHECK((adj - dense.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("conv adjoint identity holds on random vectors") {
  CounterRng rng(34);
  std::vector<double> kernel(3 * 2 * 3 * 3);
  for (double& k : kernel) k = rng.next_gaussian();
  ConvOperator op(kernel, 3, 2, 3, 3, ConvShape{2, 5, 5}, 1, 2);
  for (int rep = 0; rep < 10; ++rep) {
    Vector x(op.input_shape().size()), y(op.output_shape().size());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.next_gaussian();
    for (int i = 0; i < y.size(); ++i) y[i] = rng.next_gaussian();
    CHECK(op.forward(x).dot(y) == doctest::Approx(x.dot(op.adjoint(y))).epsilon(1e-8));
  }
}

TEST_CASE("materialize guard") {
  std::vector<double> kernel(9, 0.1);
  ConvOperator op(kernel, 1, 1, 3, 3, ConvShape{1, 80, 80}, 1, 1);
  CHECK_THROWS_AS(materialize_conv(op), InvalidArgument);
}

TEST_CASE("lipschitz bound multiplies layer norms") {
  Matrix w1 = random_matrix(6, 4, 41);
  Matrix w2 = random_matrix(1, 6, 42);
  auto [s1, n1] = spectral_norm_matrix(w1, 500);
  auto [s2, n2] = spectral_norm_matrix(w2, 500);

  MlpCritic normalized(
      {CriticLayer{n1, Vector::Zero(6), Activation::LeakyRelu},
       CriticLayer{n2, Vector::Zero(1), Activation::Identity}});
  CHECK(lipschitz_upper_bound(normalized) == doctest::Approx(1.0).epsilon(1e-6));

  MlpCritic scaled({CriticLayer{Matrix(2.0 * n1), Vector::Zero(6), Activation::LeakyRelu},
                    CriticLayer{Matrix(3.0 * n2), Vector::Zero(1), Activation::Identity}});
  CHECK(lipschitz_upper_bound(scaled) == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("sampled gradient norms never exceed the product bound") {
  CounterRng rng(43);
  MlpCritic net = make_mlp_critic({3, 8, 8, 1}, Activation::LeakyRelu, 44);
  const double bound = lipschitz_upper_bound(net);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.next_uniform(-2.0, 2.0);
    auto [value, grad] = critic_value_and_gradient(net, x);
    (void)value;
    worst = std::max(worst, grad.norm());
  }
  CHECK(worst <= bound + 1e-6);
}

TEST_CASE("identity single layer gives the weight row as gradient") {
  Matrix w(1, 3);
  w << 0.5, -1.5, 2.0;
  MlpCritic net({CriticLayer{w, Vector::Zero(1), Activation::Identity}});
  Vector x(3);
  x << 1.0, 2.0, 3.0;
  auto [value, grad] = critic_value_and_gradient(net, x);
  CHECK(value == doctest::Approx(w.row(0).dot(x.transpose())));
  for (int i = 0; i < 3; ++i) CHECK(grad[i] == doctest::Approx(w(0, i)));
}

TEST_CASE("critic gradient matches finite differences away from kinks") {
  MlpCritic net = make_mlp_critic({4, 10, 10, 1}, Activation::LeakyRelu, 45);
  CounterRng rng(46);
  int tested = 0;
  while (tested < 10) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.next_uniform(-1.0, 1.0);
    auto [value, grad] = critic_value_and_gradient(net, x);
    (void)value;
    Vector fd = finite_difference_gradient(
        [&](const Vector& p) { return critic_value(net, p); }, x, 1e-6);
    if ((fd - grad).cwiseAbs().maxCoeff() > 1e-5 * std::max(1.0, fd.norm())) {
      // Points straddling an activation kink are excluded; resample.
      bool near_kink = false;
      Vector z = x;
      for (const CriticLayer& l : net.layers()) {
        Vector s = l.weight * z + l.bias;
        for (Eigen::Index k = 0; k < s.size(); ++k) {
          if (std::abs(s[k]) < 1e-4) near_kink = true;
          z = s;
          for (Eigen::Index q = 0; q < s.size(); ++q)
            z[q] = apply_activation(l.activation, s[q]);
        }
      }
      CHECK(near_kink);
      continue;
    }
    ++tested;
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(grad[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(fd[i])));
  }
}

TEST_CASE("doubling every weight of a two-layer linear net scales gradients by 4") {
  Matrix w1 = random_matrix(5, 3, 47);
  Matrix w2 = random_matrix(1, 5, 48);
  MlpCritic base({CriticLayer{w1, Vector::Zero(5), Activation::Identity},
                  CriticLayer{w2, Vector::Zero(1), Activation::Identity}});
  MlpCritic doubled({CriticLayer{Matrix(2.0 * w1), Vector::Zero(5), Activation::Identity},
                     CriticLayer{Matrix(2.0 * w2), Vector::Zero(1), Activation::Identity}});
  Vector x(3);
  x << 0.3, -0.4, 0.9;
  auto [v1, g1] = critic_value_and_gradient(base, x);
  auto [v2, g2] = critic_value_and_gradient(doubled, x);
  (void)v1;
  (void)v2;
  for (int i = 0; i < 3; ++i) CHECK(g2[i] == doctest::Approx(4.0 * g1[i]).epsilon(1e-12));
}

TEST_CASE("gradient penalty vanishes for a unit-gradient critic and for lambda 0") {
  // Single linear layer with a unit-norm row has |grad f| = 1 everywhere.
  Matrix w(1, 2);
  w << 0.6, 0.8;
  MlpCritic unit({CriticLayer{w, Vector::Zero(1), Activation::Identity}});
  Matrix xd = random_matrix(4, 2, 49);
  Matrix yd = random_matrix(4, 2, 50);
  SampleBatch x(xd), y(yd);
  CHECK(gradient_penalty(unit, x, y, 10.0, 32, 3) <= 1e-24);

  MlpCritic net = make_mlp_critic({2, 6, 1}, Activation::LeakyRelu, 51);
  CHECK(gradient_penalty(net, x, y, 0.0, 32, 3) == 0.0);
}

TEST_CASE("gradient penalty is bit-identical across runs for a fixed seed") {
  MlpCritic net = make_mlp_critic({2, 6, 1}, Activation::LeakyRelu, 52);
  Matrix xd = random_matrix(4, 2, 53);
  Matrix yd = random_matrix(4, 2, 54);
  SampleBatch x(xd), y(yd);
  const double a = gradient_penalty(net, x, y, 1.0, 64, 77);
  const double b = gradient_penalty(net, x, y, 1.0, 64, 77);
  CHECK(a == b);
  const double c = gradient_penalty(net, x, y, 1.0, 64, 78);
  CHECK(a != c);
}

TEST_CASE("fit_critic on identical batches stays near zero") {
  Matrix xd = random_matrix(8, 2, 55);
  SampleBatch x(xd);
  for (CriticMode mode : {CriticMode::GradientPenalty, CriticMode::SpectralNormLayer,
                          CriticMode::SpectralNormProject}) {
    MlpCritic net = make_mlp_critic({2, 8, 8, 1}, Activation::LeakyRelu, 56);
    AdamState adam;
    adam.params.lr = 1e-3;
    FitResult fit = fit_critic(net, x, x, mode, adam, 200);
    CHECK(std::abs(fit.estimate) <= 1e-12);  // identical batches cancel exactly
  }
}

TEST_CASE("sn_layer keeps the effective layer norms at one") {
  Matrix xd = random_matrix(8, 2, 57);
  Matrix yd = random_matrix(8, 2, 58);
  SampleBatch x(xd), y(yd);
  MlpCritic net = make_mlp_critic({2, 10, 10, 1}, Activation::LeakyRelu, 59);
  AdamState adam;
  adam.params.lr = 1e-3;
  FitResult fit = fit_critic(net, x, y, CriticMode::SpectralNormLayer, adam, 500);
  REQUIRE(fit.layer_sigmas.size() == 3);
  for (int i = 0; i < 3; ++i) {
    auto [true_sigma, normalized] = spectral_norm_matrix(net.layers()[i].weight, 500);
    (void)normalized;
    // The warm-started estimate the training used tracks the true norm.
    CHECK(std::abs(true_sigma / fit.layer_sigmas[i] - 1.0) <= 1e-3);
  }
}

TEST_CASE("sn_project keeps raw weights inside the unit ball") {
  Matrix xd = random_matrix(8, 2, 60);
  Matrix yd = random_matrix(8, 2, 61);
  SampleBatch x(xd), y(yd);
  MlpCritic net = make_mlp_critic({2, 10, 1}, Activation::LeakyRelu, 62);
  AdamState adam;
  adam.params.lr = 1e-2;
  FitResult fit = fit_critic(net, x, y, CriticMode::SpectralNormProject, adam, 300,
                             FitOptions{1.0, 32, 0, 5});
  (void)fit;
  for (const CriticLayer& l : net.layers()) {
    auto [sigma, normalized] = spectral_norm_matrix(l.weight, 500);
    (void)normalized;
    CHECK(sigma <= 1.0 + 1e-3);
  }
}
