#include "ot/core.hpp"

#include <cmath>

namespace ot {

const char* cost_kind_name(CostKind kind) {
  switch (kind) {
    case CostKind::L1: return "l1";
    case CostKind::L2: return "l2";
    case CostKind::SquaredL2: return "sql2";
    case CostKind::Cosine: return "cosine";
    case CostKind::SSIM: return "ssim";
  }
  return "unknown";
}

CostKind parse_cost_kind(const std::string& name) {
  if (name == "l1") return CostKind::L1;
  if (name == "l2") return CostKind::L2;
  if (name == "sql2") return CostKind::SquaredL2;
  if (name == "cosine") return CostKind::Cosine;
  if (name == "ssim") return CostKind::SSIM;
  throw InvalidArgument("unknown cost kind: " + name);
}

DiscreteMeasure::DiscreteMeasure(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw InvalidArgument("measure needs at least one atom");
  // Kahan summation: the 1e-12 tolerance must not be eaten by accumulation
  // error on long weight vectors.
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("measure weights must be nonnegative");
    const double y = w - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("measure weights must sum to 1");
}

DiscreteMeasure uniform_measure(int n) {
  if (n < 1) throw InvalidArgument("uniform_measure: n must be positive");
  return DiscreteMeasure(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

SampleBatch::SampleBatch(Matrix data, std::optional<ImageShape> image_shape)
    : data_(std::move(data)), image_shape_(image_shape) {
  if (data_.rows() < 1 || data_.cols() < 1)
    throw InvalidArgument("sample batch must be nonempty");
  if (image_shape_ && image_shape_->pixel_count() != data_.cols())
    throw InvalidArgument("image_shape does not factor the feature dimension");
}

CostMatrix::CostMatrix(Matrix values, CostKind kind) : values_(std::move(values)), kind_(kind) {
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double c = values_(i, j);
      if (!std::isfinite(c) || c < 0.0)
        throw InvalidArgument("cost entries must be nonnegative and finite");
    }
}

TransportPlan::TransportPlan(Matrix values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j < values_.cols(); ++j)
      if (!(values_(i, j) >= 0.0)) throw InvalidArgument("plan entries must be nonnegative");
}

Vector TransportPlan::row_sums() const { return values_.rowwise().sum(); }

Vector TransportPlan::col_sums() const { return values_.colwise().sum().transpose(); }

void SolverConfig::validate() const {
  if (epsilon < 0.0) throw InvalidArgument("epsilon must be nonnegative");
  if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (tol <= 0.0) throw InvalidArgument("tol must be positive");
  if (inner_iter < 1) throw InvalidArgument("inner_iter must be positive");
  if (tau <= 0.0) throw InvalidArgument("tau must be positive");
}

double transport_cost(const TransportPlan& plan, const CostMatrix& cost) {
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols())
    throw InvalidArgument("transport_cost: shape mismatch");
  const Matrix& t = plan.values();
  const Matrix& c = cost.values();
  double total = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) total += t(i, j) * c(i, j);
  return total;
}

double marginal_residual(const Matrix& plan, const Vector& mu, const Vector& nu) {
  double res = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    double row = plan.row(i).sum();
    res = std::max(res, std::abs(row - mu[i]));
  }
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    double col = plan.col(j).sum();
    res = std::max(res, std::abs(col - nu[j]));
  }
  return res;
}

}  // namespace ot
