#include <doctest.h>

#include "oracles.hpp"
#include "ot/costs.hpp"
#include "ot/divergence.hpp"
#include "ot/rng.hpp"
#include "ot/verification.hpp"

using namespace ot;

namespace {

SampleBatch random_batch(int n, int d, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.next_double();
  return SampleBatch(std::move(m));
}

SolverConfig tight_entropic(double eps) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.tol = 1e-13;
  cfg.max_iter = 500000;
  return cfg;
}

}  // namespace

TEST_CASE("identical batches give exactly zero divergence") {
  SampleBatch x = random_batch(5, 3, 1);
  DivergenceReport rep =
      sinkhorn_divergence(x, x, CostKind::L2, tight_entropic(0.1), SolverKind::Sinkhorn);
  CHECK(rep.value == 0.0);
  CHECK(rep.w_xy == rep.w_xx);
}

TEST_CASE("divergence is symmetric in its arguments") {
  SampleBatch x = random_batch(6, 3, 2);
  SampleBatch y = random_batch(6, 3, 3);
  DivergenceReport xy =
      sinkhorn_divergence(x, y, CostKind::L2, tight_entropic(0.1), SolverKind::Sinkhorn);
  DivergenceReport yx =
      sinkhorn_divergence(y, x, CostKind::L2, tight_entropic(0.1), SolverKind::Sinkhorn);
  CHECK(std::abs(xy.value - yx.value) <= 1e-10);
}

TEST_CASE("disjoint clouds: divergence approaches twice the distance") {
  // Two points per cloud, zero within-cloud distance, mutual distance d.
  const double d = 0.7;
  Matrix xd(2, 2), yd(2, 2);
  xd << 0.0, 0.0, 0.0, 0.0;
  yd << d, 0.0, d, 0.0;
  DivergenceReport rep =
      sinkhorn_divergence(SampleBatch(xd), SampleBatch(yd), CostKind::L2,
                          tight_entropic(0.005), SolverKind::Sinkhorn);
  CHECK(rep.value == doctest::Approx(2.0 * d).epsilon(0.05));
}

TEST_CASE("divergence works with every regularized solver") {
  SampleBatch x = random_batch(4, 2, 4);
  SampleBatch y = random_batch(4, 2, 5);
  SolverConfig cfg = tight_entropic(0.1);
  cfg.tol = 1e-9;
  cfg.inner_iter = 200;
  for (SolverKind kind : {SolverKind::Sinkhorn, SolverKind::SinkhornCenter, SolverKind::Fista,
                          SolverKind::FistaCenter}) {
    DivergenceReport rep = sinkhorn_divergence(x, y, CostKind::SquaredL2, cfg, kind, 30);
    CHECK(rep.value == 2.0 * rep.w_xy - rep.w_xx - rep.w_yy);
    CHECK(std::isfinite(rep.value));
  }
  CHECK_THROWS_AS(sinkhorn_divergence(x, y, CostKind::L2, cfg, SolverKind::Pdhg),
                  InvalidArgument);
}

TEST_CASE("entropic divergence stays essentially nonnegative") {
  SolverConfig cfg = tight_entropic(0.1);
  cfg.tol = 1e-11;
  CounterRng seeds(99);
  for (int rep = 0; rep < 25; ++rep) {
    SampleBatch x = random_batch(4, 2, seeds.next_u64());
    SampleBatch y = random_batch(4, 2, seeds.next_u64());
    DivergenceReport d = sinkhorn_divergence(x, y, CostKind::SquaredL2, cfg,
                                             SolverKind::Sinkhorn);
    CHECK(d.value >= -1e-6);
  }
}

TEST_CASE("plan gradient vanishes at a diagonal matching of identical batches") {
  SampleBatch x = random_batch(4, 3, 6);
  Matrix diag = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) diag(i, i) = 0.25;
  Matrix g = plan_gradient(TransportPlan(diag), x, x, CostKind::SquaredL2);
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-pair L2 gradient is the unit direction") {
  Matrix xd(1, 2), yd(1, 2);
  xd << 0.0, 0.0;
  yd << 3.0, 4.0;
  Matrix t(1, 1);
  t << 1.0;
  Matrix g = plan_gradient(TransportPlan(t), SampleBatch(xd), SampleBatch(yd), CostKind::L2);
  CHECK(g(0, 0) == doctest::Approx(0.6));
  CHECK(g(0, 1) == doctest::Approx(0.8));
}

TEST_CASE("plan gradient matches finite differences of the transport cost") {
  CounterRng rng(7);
  const int n = 3, m = 4, d = 3;
  SampleBatch x = random_batch(n, d, 8);
  Matrix y0 = random_batch(m, d, 9).data();
  Matrix tv(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) tv(i, j) = rng.next_double();
  TransportPlan plan(tv);

  for (CostKind kind :
       {CostKind::SquaredL2, CostKind::L2, CostKind::L1, CostKind::Cosine}) {
    Matrix analytic = plan_gradient(plan, x, SampleBatch(y0), kind);

    Vector flat(m * d);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < d; ++k) flat[j * d + k] = y0(j, k);
    auto cost_of = [&](const Vector& yv) {
      Matrix ym(m, d);
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < d; ++k) ym(j, k) = yv[j * d + k];
      return transport_cost(plan, pairwise_cost(x, SampleBatch(ym), kind));
    };
    Vector fd = finite_difference_gradient(cost_of, flat, 1e-6);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < d; ++k) {
        const double a = analytic(j, k);
        const double f = fd[j * d + k];
        CHECK(std::abs(a - f) <= 1e-5 * std::max(1.0, std::abs(f)));
      }
  }
}

TEST_CASE("descending the gradient lowers the cost") {
  SampleBatch x = random_batch(5, 2, 10);
  SampleBatch y = random_batch(5, 2, 11);
  Matrix t = Matrix::Constant(5, 5, 1.0 / 25.0);
  TransportPlan plan(t);
  const double before = transport_cost(plan, pairwise_cost(x, y, CostKind::SquaredL2));
  Matrix g = plan_gradient(plan, x, y, CostKind::SquaredL2);
  Matrix moved = y.data() - 0.05 * g;
  const double after =
      transport_cost(plan, pairwise_cost(x, SampleBatch(moved), CostKind::SquaredL2));
  CHECK(after < before);
}

TEST_CASE("SSIM gradient is unsupported") {
  SampleBatch x = random_batch(2, 4, 12);
  Matrix t = Matrix::Constant(2, 2, 0.25);
  CHECK_THROWS_AS(plan_gradient(TransportPlan(t), x, x, CostKind::SSIM), Unsupported);
}
