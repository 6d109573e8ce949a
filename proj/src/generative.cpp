#include "ot/generative.hpp"

#include <cmath>

#include "ot/costs.hpp"
#include "ot/divergence.hpp"
#include "ot/rng.hpp"

namespace ot {
namespace {

double logistic(double s) { return 1.0 / (1.0 + std::exp(-s)); }

double leaky(double s) { return s > 0.0 ? s : 0.2 * s; }
double leaky_slope(double s) { return s > 0.0 ? 1.0 : 0.2; }

void adam_update(Matrix& param, Matrix& m, Matrix& v, const Matrix& grad,
                 const AdamParams& p, long t) {
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(t));
  for (Eigen::Index r = 0; r < param.rows(); ++r)
    for (Eigen::Index c = 0; c < param.cols(); ++c) {
      m(r, c) = p.beta1 * m(r, c) + (1.0 - p.beta1) * grad(r, c);
      v(r, c) = p.beta2 * v(r, c) + (1.0 - p.beta2) * grad(r, c) * grad(r, c);
      param(r, c) -= p.lr * (m(r, c) / bc1) / (std::sqrt(v(r, c) / bc2) + p.eps_hat);
    }
}

void adam_update(Vector& param, Vector& m, Vector& v, const Vector& grad,
                 const AdamParams& p, long t) {
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(t));
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * grad[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * grad[i] * grad[i];
    param[i] -= p.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + p.eps_hat);
  }
}

}  // namespace

Matrix GeneratorMlp::generate(const Matrix& z) const {
  if (z.cols() != z_dim()) throw InvalidArgument("generator: latent dimension mismatch");
  Matrix h = z * w1.transpose();
  h.rowwise() += b1.transpose();
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = leaky(h(i, j));
  Matrix out = h * w2.transpose();
  out.rowwise() += b2.transpose();
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = logistic(out(i, j));
  return out;
}

GeneratorMlp make_generator(int z_dim, int hidden, int out_dim, std::uint64_t seed) {
  if (z_dim < 1 || hidden < 1 || out_dim < 1)
    throw InvalidArgument("generator dimensions must be positive");
  CounterRng rng(seed);
  GeneratorMlp g;
  g.w1.resize(hidden, z_dim);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(z_dim));
  for (Eigen::Index r = 0; r < g.w1.rows(); ++r)
    for (Eigen::Index c = 0; c < g.w1.cols(); ++c) g.w1(r, c) = s1 * rng.next_gaussian();
  g.b1 = Vector::Zero(hidden);
  g.w2.resize(out_dim, hidden);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Eigen::Index r = 0; r < g.w2.rows(); ++r)
    for (Eigen::Index c = 0; c < g.w2.cols(); ++c) g.w2(r, c) = s2 * rng.next_gaussian();
  g.b2 = Vector::Zero(out_dim);
  return g;
}

std::pair<GeneratorMlp, std::vector<double>> train_toy_generator(const SampleBatch& data,
                                                                 const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw InvalidArgument("train_toy_generator: epochs must be positive");
  if (cfg.batch < 1 || cfg.batch > data.size())
    throw InvalidArgument("train_toy_generator: batch must be within the dataset size");
  for (int r = 0; r < data.size(); ++r)
    for (int c = 0; c < data.dim(); ++c)
      if (data.data()(r, c) < 0.0 || data.data()(r, c) > 1.0)
        throw InvalidArgument("train_toy_generator: data rows must lie in [0,1]");

  const int n = cfg.batch;
  const int d = data.dim();

  // Fixed data batch for the whole run: a seeded draw without replacement.
  CounterRng pick_rng(cfg.seed, 1);
  std::vector<int> index(data.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<int>(i);
  for (int i = static_cast<int>(index.size()) - 1; i > 0; --i)
    std::swap(index[i], index[pick_rng.next_u64() % (i + 1)]);
  Matrix batch(n, d);
  for (int i = 0; i < n; ++i) batch.row(i) = data.data().row(index[i]);
  SampleBatch x(batch, data.image_shape());
  const DiscreteMeasure mu = uniform_measure(n);
  const DiscreteMeasure nu = uniform_measure(n);

  GeneratorMlp g = make_generator(cfg.z_dim, cfg.hidden, d, cfg.seed);

  Matrix m_w1 = Matrix::Zero(g.w1.rows(), g.w1.cols()), v_w1 = m_w1;
  Matrix m_w2 = Matrix::Zero(g.w2.rows(), g.w2.cols()), v_w2 = m_w2;
  Vector m_b1 = Vector::Zero(g.b1.size()), v_b1 = m_b1;
  Vector m_b2 = Vector::Zero(g.b2.size()), v_b2 = m_b2;
  long adam_t = 0;

  CounterRng z_rng(cfg.seed, 2);
  Matrix z_fixed;
  if (cfg.fixed_z) {
    z_fixed.resize(n, cfg.z_dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < cfg.z_dim; ++j) z_fixed(i, j) = z_rng.next_double();
  }

  std::vector<double> history;
  history.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Matrix z;
    if (cfg.fixed_z) {
      z = z_fixed;
    } else {
      z.resize(n, cfg.z_dim);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < cfg.z_dim; ++j) z(i, j) = z_rng.next_double();
    }

    // Forward pass with the traces the analytic backward pass needs.
    Matrix s1 = z * g.w1.transpose();
    s1.rowwise() += g.b1.transpose();
    Matrix h = s1;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = leaky(s1(i, j));
    Matrix s2 = h * g.w2.transpose();
    s2.rowwise() += g.b2.transpose();
    Matrix y = s2;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = logistic(s2(i, j));

    SampleBatch generated(y, data.image_shape());
    CostMatrix cost = pairwise_cost(x, generated, cfg.cost);

    std::optional<SolveResult> solved;
    try {
      solved = run_solver(cfg.solver, cost, mu, nu, cfg.solver_cfg, cfg.outer_iter);
    } catch (const std::exception& e) {
      throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    history.push_back(solved->report.distance);

    // Envelope gradient: differentiate <T, C(X, Y)> in Y with T fixed,
    // then push through the generator.
    Matrix dy = plan_gradient(solved->plan, x, generated, cfg.cost);
    Matrix ds2 = dy.cwiseProduct(y.cwiseProduct(Matrix::Ones(y.rows(), y.cols()) - y));
    Matrix gw2 = ds2.transpose() * h;
    Vector gb2 = ds2.colwise().sum().transpose();
    Matrix dh = ds2 * g.w2;
    Matrix ds1 = dh;
    for (Eigen::Index i = 0; i < ds1.rows(); ++i)
      for (Eigen::Index j = 0; j < ds1.cols(); ++j) ds1(i, j) *= leaky_slope(s1(i, j));
    Matrix gw1 = ds1.transpose() * z;
    Vector gb1 = ds1.colwise().sum().transpose();

    ++adam_t;
    adam_update(g.w1, m_w1, v_w1, gw1, cfg.adam, adam_t);
    adam_update(g.b1, m_b1, v_b1, gb1, cfg.adam, adam_t);
    adam_update(g.w2, m_w2, v_w2, gw2, cfg.adam, adam_t);
    adam_update(g.b2, m_b2, v_b2, gb2, cfg.adam, adam_t);
  }

  return {std::move(g), std::move(history)};
}

SampleBatch manifold_grid(const GeneratorMlp& g, int steps) {
  if (g.z_dim() != 2) throw InvalidArgument("manifold_grid requires z_dim = 2");
  if (steps < 1) throw InvalidArgument("manifold_grid: steps must be positive");
  Matrix z(steps * steps, 2);
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double zi = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
      const double zj = steps == 1 ? 0.0 : static_cast<double>(j) / (steps - 1);
      z(i * steps + j, 0) = zi;
      z(i * steps + j, 1) = zj;
    }
  return SampleBatch(g.generate(z));
}

Matrix tile_images(const SampleBatch& batch, int tiles_per_row) {
  if (!batch.image_shape()) throw InvalidArgument("tile_images needs an image batch");
  const ImageShape& shape = *batch.image_shape();
  if (shape.channels != 1) throw InvalidArgument("tile_images supports single-channel images");
  const int rows = (batch.size() + tiles_per_row - 1) / tiles_per_row;
  Matrix sheet = Matrix::Zero(rows * shape.height, tiles_per_row * shape.width);
  for (int k = 0; k < batch.size(); ++k) {
    const int ty = k / tiles_per_row;
    const int tx = k % tiles_per_row;
    for (int y = 0; y < shape.height; ++y)
      for (int x = 0; x < shape.width; ++x)
        sheet(ty * shape.height + y, tx * shape.width + x) =
            batch.data()(k, y * shape.width + x);
  }
  return sheet;
}

}  // namespace ot
