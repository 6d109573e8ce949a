#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ot {

// All dense matrices are stored row-major so that reductions and
// vectorized transport plans have one well-defined traversal order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CostKind { L1, L2, SquaredL2, Cosine, SSIM };

const char* cost_kind_name(CostKind kind);
CostKind parse_cost_kind(const std::string& name);

/// Probability weights over a finite support: nonnegative, summing to one.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(Vector weights);

  const Vector& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.size()); }

 private:
  Vector weights_;
};

/// n/m atoms with equal mass 1/n.
DiscreteMeasure uniform_measure(int n);

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  int pixel_count() const { return height * width * channels; }
  bool operator==(const ImageShape&) const = default;
};

/// A batch of samples, one feature row per sample. When the rows are images
/// the layout is channel-major planes: index = (c*height + y)*width + x.
class SampleBatch {
 public:
  explicit SampleBatch(Matrix data, std::optional<ImageShape> image_shape = std::nullopt);

  const Matrix& data() const { return data_; }
  const std::optional<ImageShape>& image_shape() const { return image_shape_; }
  int size() const { return static_cast<int>(data_.rows()); }
  int dim() const { return static_cast<int>(data_.cols()); }

 private:
  Matrix data_;
  std::optional<ImageShape> image_shape_;
};

/// Ground cost C_ij = c(x_i, y_j); entries are nonnegative and finite.
class CostMatrix {
 public:
  CostMatrix(Matrix values, CostKind kind);

  const Matrix& values() const { return values_; }
  CostKind kind() const { return kind_; }
  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }

 private:
  Matrix values_;
  CostKind kind_;
};

/// Coupling between two measures; row sums follow mu, column sums follow nu
/// within solver tolerance once a solver reports convergence.
class TransportPlan {
 public:
  explicit TransportPlan(Matrix values);

  const Matrix& values() const { return values_; }
  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }

  Vector row_sums() const;
  Vector col_sums() const;

 private:
  Matrix values_;
};

/// Dual variables of the transport LP. PDHG multipliers are stored here
/// in the standard orientation (alpha_i + beta_j <= C_ij at optimality).
struct DualPotentials {
  Vector alpha;
  Vector beta;
};

struct SolverConfig {
  double epsilon = 0.05;  // regularization weight; 0 only for PDHG
  int max_iter = 10000;
  double tol = 1e-7;      // marginal-residual threshold (infinity norm)
  int inner_iter = 1;     // inner loop length of the centered variants
  double tau = 1.0;       // PDHG primal step
  bool log_domain = false;

  void validate() const;
};

struct HistoryEntry {
  int iteration = 0;
  double residual = 0.0;
  double objective = 0.0;  // sharp transport cost <T,C> at this iterate
};

struct SolveReport {
  double distance = 0.0;               // <T,C> of the returned plan
  double regularized_objective = 0.0;  // distance + eps * h(T) for the solver's h
  int iterations = 0;
  double marginal_residual = 0.0;
  bool converged = false;
  std::vector<HistoryEntry> history;
};

/// Frobenius inner product <T,C> with a fixed row-major reduction order.
double transport_cost(const TransportPlan& plan, const CostMatrix& cost);

/// Infinity-norm marginal violation of a plan against (mu, nu).
double marginal_residual(const Matrix& plan, const Vector& mu, const Vector& nu);

}  // namespace ot
