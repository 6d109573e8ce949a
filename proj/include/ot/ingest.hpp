#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ot/core.hpp"

namespace ot {

/// IDX image file (big-endian magic 0x00000803): pixels rescaled to [0,1]
/// by /255, rows flattened row-major, image_shape (h, w, 1).
SampleBatch load_idx(const std::string& path);

/// Inverse of load_idx; bytes are round(255 * value). Round-trips files.
void write_idx(const SampleBatch& batch, const std::string& path);

/// CIFAR-10 binary: 3073-byte records (label + 3072 channel-major pixels).
/// Labels are discarded; image_shape (32, 32, 3), channel-major layout kept.
SampleBatch load_cifar10(const std::string& path);

/// Comma-separated values, no header, one sample per line.
SampleBatch load_csv(const std::string& path);
void write_csv(const SampleBatch& batch, const std::string& path);

/// Gaussian blobs around the given centers, n_per samples each, drawn from
/// the counter-based generator (identical bytes for identical seeds).
SampleBatch synth_blobs(const std::vector<Vector>& centers, double scale, int n_per,
                        std::uint64_t seed);

/// Binary PGM (P5, maxval 255); pixels clamped to [0,1], bytes round(255 v).
void write_pgm(const Matrix& image, const std::string& path);

}  // namespace ot
