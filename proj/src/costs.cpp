#include "ot/costs.hpp"

#include <cmath>

namespace ot {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;

const std::vector<double>& gaussian_window() {
  static const std::vector<double> w = [] {
    std::vector<double> out(kWindow * kWindow);
    double sum = 0.0;
    for (int dy = 0; dy < kWindow; ++dy)
      for (int dx = 0; dx < kWindow; ++dx) {
        double ry = dy - (kWindow - 1) / 2.0;
        double rx = dx - (kWindow - 1) / 2.0;
        double g = std::exp(-(ry * ry + rx * rx) / (2.0 * kSigma * kSigma));
        out[dy * kWindow + dx] = g;
        sum += g;
      }
    for (double& g : out) g /= sum;
    return out;
  }();
  return w;
}

double ssim_from_moments(double mx, double my, double sxx, double syy, double sxy) {
  double vx = sxx - mx * mx;
  double vy = syy - my * my;
  double cov = sxy - mx * my;
  return ((2.0 * mx * my + kC1) * (2.0 * cov + kC2)) /
         ((mx * mx + my * my + kC1) * (vx + vy + kC2));
}

// SSIM of one channel plane; a and b index as y*width + x within the plane.
double channel_ssim(const double* a, const double* b, int height, int width) {
  if (height < kWindow || width < kWindow) {
    // Global uniform window for images smaller than the sliding window.
    const double inv = 1.0 / (height * width);
    double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < height * width; ++i) {
      mx += a[i];
      my += b[i];
      sxx += a[i] * a[i];
      syy += b[i] * b[i];
      sxy += a[i] * b[i];
    }
    return ssim_from_moments(mx * inv, my * inv, sxx * inv, syy * inv, sxy * inv);
  }

  const std::vector<double>& w = gaussian_window();
  double total = 0.0;
  int count = 0;
  for (int oy = 0; oy + kWindow <= height; ++oy)
    for (int ox = 0; ox + kWindow <= width; ++ox) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int dy = 0; dy < kWindow; ++dy)
        for (int dx = 0; dx < kWindow; ++dx) {
          double g = w[dy * kWindow + dx];
          double av = a[(oy + dy) * width + (ox + dx)];
          double bv = b[(oy + dy) * width + (ox + dx)];
          mx += g * av;
          my += g * bv;
          sxx += g * av * av;
          syy += g * bv * bv;
          sxy += g * av * bv;
        }
      total += ssim_from_moments(mx, my, sxx, syy, sxy);
      ++count;
    }
  return total / count;
}

}  // namespace

double mean_ssim(const Vector& a, const Vector& b, const ImageShape& shape) {
  if (a.size() != shape.pixel_count() || b.size() != shape.pixel_count())
    throw InvalidArgument("mean_ssim: image size does not match shape");
  const int plane = shape.height * shape.width;
  double total = 0.0;
  for (int c = 0; c < shape.channels; ++c)
    total += channel_ssim(a.data() + c * plane, b.data() + c * plane, shape.height, shape.width);
  return total / shape.channels;
}

CostMatrix pairwise_cost(const SampleBatch& x, const SampleBatch& y, CostKind kind) {
  if (x.dim() != y.dim()) throw InvalidArgument("pairwise_cost: feature dimensions differ");

  const Matrix& xd = x.data();
  const Matrix& yd = y.data();
  const int n = x.size();
  const int m = y.size();

  ImageShape shape;
  if (kind == CostKind::SSIM) {
    if (!x.image_shape() || !y.image_shape() || !(*x.image_shape() == *y.image_shape()))
      throw InvalidArgument("SSIM cost requires matching image shapes on both batches");
    shape = *x.image_shape();
  }

  Vector x_norm, y_norm;
  if (kind == CostKind::Cosine) {
    x_norm = xd.rowwise().norm();
    y_norm = yd.rowwise().norm();
    for (int i = 0; i < n; ++i)
      if (x_norm[i] == 0.0) throw DegenerateInput("cosine cost: zero-norm sample row");
    for (int j = 0; j < m; ++j)
      if (y_norm[j] == 0.0) throw DegenerateInput("cosine cost: zero-norm sample row");
  }

  Matrix c(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = 0.0;
      switch (kind) {
        case CostKind::L1:
          v = (xd.row(i) - yd.row(j)).cwiseAbs().sum();
          break;
        case CostKind::L2:
          v = (xd.row(i) - yd.row(j)).norm();
          break;
        case CostKind::SquaredL2:
          v = (xd.row(i) - yd.row(j)).squaredNorm();
          break;
        case CostKind::Cosine:
          v = 1.0 - xd.row(i).dot(yd.row(j)) / (x_norm[i] * y_norm[j]);
          break;
        case CostKind::SSIM:
          v = 1.0 - mean_ssim(xd.row(i).transpose(), yd.row(j).transpose(), shape);
          break;
      }
      c(i, j) = std::max(v, 0.0);
    }
  }
  return CostMatrix(std::move(c), kind);
}

}  // namespace ot
