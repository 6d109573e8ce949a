#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ot/core.hpp"
#include "ot/lipschitz.hpp"
#include "ot/solvers.hpp"

namespace ot {

/// One-hidden-layer generator: leaky-relu hidden activation, logistic
/// output, so every generated value stays inside (0, 1).
struct GeneratorMlp {
  Matrix w1;  // hidden x z_dim
  Vector b1;
  Matrix w2;  // out x hidden
  Vector b2;

  int z_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
  int out_dim() const { return static_cast<int>(w2.rows()); }

  /// Rows of z map to rows of the generated batch.
  Matrix generate(const Matrix& z) const;
};

GeneratorMlp make_generator(int z_dim, int hidden, int out_dim, std::uint64_t seed);

struct TrainConfig {
  int epochs = 100;
  int batch = 1000;      // full-batch size; data is subsampled once per run
  int z_dim = 2;
  int hidden = 500;
  SolverKind solver = SolverKind::Sinkhorn;
  SolverConfig solver_cfg;
  int outer_iter = 100;  // centered variants only
  CostKind cost = CostKind::L2;
  AdamParams adam;
  std::uint64_t seed = 0;
  bool fixed_z = false;  // keep one latent batch instead of redrawing per epoch
};

/// Full-batch generative training: per epoch draw latents, generate, build
/// the cost against the data batch, solve transport, and descend the cost
/// with the plan held fixed. Returns the trained generator and <T,C> per
/// epoch. Deterministic for a fixed seed.
std::pair<GeneratorMlp, std::vector<double>> train_toy_generator(const SampleBatch& data,
                                                                 const TrainConfig& cfg);

/// steps^2 outputs of g over the regular z grid on [0,1]^2, row-major over
/// (grid row, grid column). Requires z_dim = 2.
SampleBatch manifold_grid(const GeneratorMlp& g, int steps);

/// Tile a batch of single-channel images into one steps x steps sheet.
Matrix tile_images(const SampleBatch& batch, int tiles_per_row);

}  // namespace ot
