#pragma once

#include "ot/core.hpp"

namespace ot {

/// C_ij = c(x_i, y_j) for rows of X and Y.
///   L1        sum |x - y|
///   L2        Euclidean norm
///   SquaredL2 squared Euclidean norm
///   Cosine    1 - <x,y>/(|x||y|), throws DegenerateInput on a zero-norm row
///   SSIM      1 - MSSIM(x, y); both batches need the same image_shape
/// Entries are clamped at 0 against negative round-off.
CostMatrix pairwise_cost(const SampleBatch& x, const SampleBatch& y, CostKind kind);

/// Mean SSIM between two images of the given shape (values in [0,1]).
/// 11x11 Gaussian window, sigma 1.5, C1 = 0.01^2, C2 = 0.03^2; images smaller
/// than the window fall back to one uniform global window. Channels are
/// averaged.
double mean_ssim(const Vector& a, const Vector& b, const ImageShape& shape);

}  // namespace ot
