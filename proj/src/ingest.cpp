#include "ot/ingest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ot/rng.hpp"

namespace ot {
namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;

std::uint32_t read_u32_be(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("unexpected end of file in header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<char*>(b), 4);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  return in;
}

}  // namespace

SampleBatch load_idx(const std::string& path) {
  std::ifstream in = open_binary(path);
  const std::uint32_t magic = read_u32_be(in);
  if (magic != kIdxImagesMagic)
    throw FormatError("not an IDX image file (bad magic): " + path);
  const std::uint32_t count = read_u32_be(in);
  const std::uint32_t height = read_u32_be(in);
  const std::uint32_t width = read_u32_be(in);
  if (count == 0 || height == 0 || width == 0)
    throw FormatError("IDX file declares an empty dimension: " + path);

  const std::size_t payload = std::size_t(count) * height * width;
  std::vector<unsigned char> bytes(payload);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(payload));
  if (static_cast<std::size_t>(in.gcount()) != payload)
    throw FormatError("truncated IDX payload: " + path);

  Matrix data(count, height * width);
  for (std::uint32_t r = 0; r < count; ++r)
    for (std::uint32_t p = 0; p < height * width; ++p)
      data(r, p) = bytes[std::size_t(r) * height * width + p] / 255.0;
  return SampleBatch(std::move(data),
                     ImageShape{static_cast<int>(height), static_cast<int>(width), 1});
}

void write_idx(const SampleBatch& batch, const std::string& path) {
  if (!batch.image_shape() || batch.image_shape()->channels != 1)
    throw InvalidArgument("write_idx needs a single-channel image batch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  const ImageShape& shape = *batch.image_shape();
  write_u32_be(out, kIdxImagesMagic);
  write_u32_be(out, static_cast<std::uint32_t>(batch.size()));
  write_u32_be(out, static_cast<std::uint32_t>(shape.height));
  write_u32_be(out, static_cast<std::uint32_t>(shape.width));
  for (int r = 0; r < batch.size(); ++r)
    for (int p = 0; p < batch.dim(); ++p) {
      const double v = std::min(std::max(batch.data()(r, p), 0.0), 1.0);
      const unsigned char byte = static_cast<unsigned char>(std::lround(v * 255.0));
      out.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

SampleBatch load_cifar10(const std::string& path) {
  std::ifstream in = open_binary(path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  constexpr std::streamoff kRecord = 3073;  // label byte + 32*32*3 pixels
  if (size <= 0 || size % kRecord != 0)
    throw FormatError("CIFAR-10 file length is not a multiple of 3073: " + path);
  const int count = static_cast<int>(size / kRecord);

  Matrix data(count, 3072);
  std::vector<unsigned char> record(kRecord);
  for (int r = 0; r < count; ++r) {
    in.read(reinterpret_cast<char*>(record.data()), kRecord);
    if (!in) throw FormatError("truncated CIFAR-10 record: " + path);
    for (int p = 0; p < 3072; ++p) data(r, p) = record[p + 1] / 255.0;
  }
  return SampleBatch(std::move(data), ImageShape{32, 32, 3});
}

SampleBatch load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError("bad CSV value '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("empty CSV file: " + path);

  Matrix data(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) data(r, c) = rows[r][c];
  return SampleBatch(std::move(data));
}

void write_csv(const SampleBatch& batch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  out.precision(17);
  for (int r = 0; r < batch.size(); ++r) {
    for (int c = 0; c < batch.dim(); ++c) {
      if (c) out << ',';
      out << batch.data()(r, c);
    }
    out << '\n';
  }
}

SampleBatch synth_blobs(const std::vector<Vector>& centers, double scale, int n_per,
                        std::uint64_t seed) {
  if (centers.empty()) throw InvalidArgument("synth_blobs: need at least one center");
  if (scale <= 0.0) throw InvalidArgument("synth_blobs: scale must be positive");
  if (n_per < 1) throw InvalidArgument("synth_blobs: n_per must be positive");
  const Eigen::Index d = centers.front().size();
  for (const Vector& c : centers)
    if (c.size() != d) throw InvalidArgument("synth_blobs: centers differ in dimension");

  CounterRng rng(seed);
  Matrix data(static_cast<Eigen::Index>(centers.size()) * n_per, d);
  Eigen::Index row = 0;
  for (const Vector& center : centers)
    for (int k = 0; k < n_per; ++k, ++row)
      for (Eigen::Index j = 0; j < d; ++j)
        data(row, j) = center[j] + scale * rng.next_gaussian();
  return SampleBatch(std::move(data));
}

void write_pgm(const Matrix& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  for (Eigen::Index y = 0; y < image.rows(); ++y)
    for (Eigen::Index x = 0; x < image.cols(); ++x) {
      const double v = std::min(std::max(image(y, x), 0.0), 1.0);
      const unsigned char byte = static_cast<unsigned char>(std::lround(v * 255.0));
      out.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

}  // namespace ot
