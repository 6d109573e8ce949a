#include <doctest.h>

#include "oracles.hpp"
#include "ot/costs.hpp"
#include "ot/rng.hpp"

using namespace ot;

namespace {

SampleBatch random_batch(int n, int d, std::uint64_t seed,
                         std::optional<ImageShape> shape = std::nullopt) {
  CounterRng rng(seed);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.next_double();
  return SampleBatch(std::move(m), shape);
}

}  // namespace

TEST_CASE("identical batches have zero diagonal cost") {
  SampleBatch x = random_batch(4, 6, 1);
  for (CostKind kind : {CostKind::L1, CostKind::L2, CostKind::SquaredL2}) {
    CostMatrix c = pairwise_cost(x, x, kind);
    for (int i = 0; i < 4; ++i) CHECK(c.values()(i, i) == 0.0);
  }
  CostMatrix cosine = pairwise_cost(x, x, CostKind::Cosine);
  for (int i = 0; i < 4; ++i) CHECK(cosine.values()(i, i) <= 1e-12);

  SampleBatch imgs = random_batch(3, 16, 2, ImageShape{4, 4, 1});
  CostMatrix ssim = pairwise_cost(imgs, imgs, CostKind::SSIM);
  for (int i = 0; i < 3; ++i) CHECK(ssim.values()(i, i) == 0.0);
}

TEST_CASE("3-4-5 triangle distances") {
  Matrix xd(1, 2), yd(1, 2);
  xd << 0.0, 0.0;
  yd << 3.0, 4.0;
  SampleBatch x(xd), y(yd);
  CHECK(pairwise_cost(x, y, CostKind::L2).values()(0, 0) == doctest::Approx(5.0));
  CHECK(pairwise_cost(x, y, CostKind::L1).values()(0, 0) == doctest::Approx(7.0));
  CHECK(pairwise_cost(x, y, CostKind::SquaredL2).values()(0, 0) == doctest::Approx(25.0));
}

TEST_CASE("orthogonal unit vectors have cosine cost 1") {
  Matrix xd(1, 2), yd(1, 2);
  xd << 1.0, 0.0;
  yd << 0.0, 1.0;
  CHECK(pairwise_cost(SampleBatch(xd), SampleBatch(yd), CostKind::Cosine).values()(0, 0) ==
        doctest::Approx(1.0));
}

TEST_CASE("SSIM matches a straight-from-definition implementation") {
  // 8x8 images use the global-window path the reference implements.
  SampleBatch x = random_batch(2, 64, 3, ImageShape{8, 8, 1});
  SampleBatch y = random_batch(2, 64, 4, ImageShape{8, 8, 1});
  CostMatrix c = pairwise_cost(x, y, CostKind::SSIM);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double ref = 1.0 - oracle::reference_global_ssim(x.data().row(i).transpose(),
                                                             y.data().row(j).transpose());
      CHECK(c.values()(i, j) == doctest::Approx(std::max(ref, 0.0)).epsilon(1e-10));
    }
}

TEST_CASE("pairwise_cost is symmetric across argument order") {
  SampleBatch x = random_batch(3, 12, 5, ImageShape{2, 6, 1});
  SampleBatch y = random_batch(4, 12, 6, ImageShape{2, 6, 1});
  for (CostKind kind :
       {CostKind::L1, CostKind::L2, CostKind::SquaredL2, CostKind::Cosine, CostKind::SSIM}) {
    CostMatrix xy = pairwise_cost(x, y, kind);
    CostMatrix yx = pairwise_cost(y, x, kind);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(xy.values()(i, j) == doctest::Approx(yx.values()(j, i)).epsilon(1e-14));
  }
}

TEST_CASE("cosine and SSIM costs stay in [0, 2]") {
  CounterRng rng(8);
  SampleBatch x = random_batch(5, 9, 9, ImageShape{3, 3, 1});
  SampleBatch y = random_batch(5, 9, 10, ImageShape{3, 3, 1});
  for (CostKind kind : {CostKind::Cosine, CostKind::SSIM}) {
    CostMatrix c = pairwise_cost(x, y, kind);
    CHECK(c.values().minCoeff() >= 0.0);
    CHECK(c.values().maxCoeff() <= 2.0);
  }
}

TEST_CASE("cosine equals half squared distance on the unit sphere") {
  CounterRng rng(12);
  Matrix xd(6, 4), yd(6, 4);
  for (int i = 0; i < 6; ++i) {
    Vector a(4), b(4);
    for (int j = 0; j < 4; ++j) {
      a[j] = rng.next_gaussian();
      b[j] = rng.next_gaussian();
    }
    xd.row(i) = a.transpose() / a.norm();
    yd.row(i) = b.transpose() / b.norm();
  }
  SampleBatch x(xd), y(yd);
  CostMatrix cosine = pairwise_cost(x, y, CostKind::Cosine);
  CostMatrix sq = pairwise_cost(x, y, CostKind::SquaredL2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(cosine.values()(i, j) ==
            doctest::Approx(0.5 * sq.values()(i, j)).epsilon(1e-12));
}

TEST_CASE("cost construction errors") {
  SampleBatch x = random_batch(2, 3, 1);
  SampleBatch y = random_batch(2, 4, 2);
  CHECK_THROWS_AS(pairwise_cost(x, y, CostKind::L2), InvalidArgument);

  Matrix with_zero(2, 3);
  with_zero << 1.0, 2.0, 3.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(pairwise_cost(SampleBatch(with_zero), SampleBatch(with_zero),
                                CostKind::Cosine),
                  DegenerateInput);

  // SSIM needs image shapes on both sides.
  SampleBatch flat = random_batch(2, 16, 3);
  SampleBatch img = random_batch(2, 16, 4, ImageShape{4, 4, 1});
  CHECK_THROWS_AS(pairwise_cost(flat, img, CostKind::SSIM), InvalidArgument);
}
