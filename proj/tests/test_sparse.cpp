#include <gtest/gtest.h>

#include <cmath>

#include "ncopt/errors.hpp"
#include "ncopt/projections.hpp"
#include "ncopt/sparse.hpp"
#include "oracles.hpp"

namespace ncopt {
namespace {

TEST(GenSparseInstance, NoiselessResponses) {
  RandomSource rand(61);
  const SparseInstance inst = gen_sparse_instance(30, 20, 4, 0.0, Design::Gaussian, rand);
  EXPECT_EQ(inst.y, inst.X * inst.theta_star);
  EXPECT_EQ((inst.theta_star.array() != 0.0).count(), 4);
  EXPECT_EQ(inst.seed, 61u);
}

TEST(GenSparseInstance, DesignConstructions) {
  RandomSource rand(62);
  const SparseInstance r = gen_sparse_instance(25, 10, 2, 0.0, Design::Rademacher, rand);
  EXPECT_TRUE((r.X.array().abs() - 0.2).abs().maxCoeff() < 1e-15);
  const SparseInstance t = gen_sparse_instance(25, 40, 2, 0.0, Design::SparseTernary, rand);
  const double big = std::sqrt(3.0 / 25.0);
  for (Index i = 0; i < t.X.size(); ++i) {
    const double a = std::abs(t.X.data()[i]);
    EXPECT_TRUE(a == 0.0 || std::abs(a - big) < 1e-15);
  }
  const double zeros = double((t.X.array() == 0.0).count()) / double(t.X.size());
  EXPECT_NEAR(zeros, 2.0 / 3.0, 0.06);
  EXPECT_EQ(parse_design(to_string(Design::SparseTernary)), Design::SparseTernary);
  EXPECT_THROW(parse_design("bernoulli"), InvalidInput);
}

TEST(GenSparseInstance, GaussianColumnNormsConcentrate) {
  RandomSource rand(63);
  const SparseInstance inst = gen_sparse_instance(200, 50, 5, 0.0, Design::Gaussian, rand);
  for (Index j = 0; j < 50; ++j) {
    EXPECT_GE(inst.X.col(j).norm(), 0.8);
    EXPECT_LE(inst.X.col(j).norm(), 1.2);
  }
}

TEST(GenSparseInstance, UnitVarianceViewKeepsSolution) {
  RandomSource rand(60);
  SparseInstance inst = gen_sparse_instance(40, 30, 3, 0.0, Design::Gaussian, rand);
  const Matrix X = inst.X;
  to_unit_variance(inst);
  to_unit_variance(inst);
  EXPECT_TRUE(inst.unit_variance);
  EXPECT_LE((inst.X - std::sqrt(40.0) * X).norm(), 1e-12);
  EXPECT_LE((inst.X * inst.theta_star - inst.y).norm(), 1e-12);
}

TEST(GenSparseInstance, InvalidSizes) {
  RandomSource rand(64);
  EXPECT_THROW(gen_sparse_instance(10, 5, 6, 0.0, Design::Gaussian, rand), InvalidInput);
  EXPECT_THROW(gen_sparse_instance(0, 5, 1, 0.0, Design::Gaussian, rand), InvalidInput);
  EXPECT_THROW(gen_sparse_instance(10, 5, 1, -1.0, Design::Gaussian, rand), InvalidInput);
}

// ---------------------------------------------------------------- IHT

TEST(Iht, ScaledIdentityDesignOneStep) {
  const Index p = 9;
  const Matrix X = 3.0 * Matrix::Identity(p, p);  // sqrt(n) I with n = 9
  Vector theta = Vector::Zero(p);
  theta(2) = 1.5;
  theta(7) = -0.5;
  const IhtResult r = iht_run(X, X * theta, 2, 1.0, 10);
  EXPECT_LE((r.theta - theta).norm(), 1e-15);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
}

TEST(Iht, ZeroModelIsFixedPoint) {
  RandomSource rand(65);
  const Matrix X = rand.normal_matrix(20, 30);
  int calls = 0;
  IhtOptions opts;
  opts.on_iterate = [&](int, const Vector& theta) {
    ++calls;
    EXPECT_EQ(theta, Vector::Zero(30));
  };
  const IhtResult r = iht_run(X, Vector::Zero(20), 3, 1.0, 5, opts);
  EXPECT_EQ(r.theta, Vector::Zero(30));
  EXPECT_GE(calls, 1);
}

TEST(Iht, GaussianRecoveryRegime) {
  const Index p = 200, s = 10;
  const Index n = static_cast<Index>(std::ceil(2.0 * s * std::log(double(p))));
  ASSERT_EQ(n, 106);
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rand(6000 + seed);
    SparseInstance inst = gen_sparse_instance(n, p, s, 0.0, Design::Gaussian, rand);
    to_unit_variance(inst);
    // eta = 1 leaves the contraction regime at n = 106 and diverges on most seeds.
    const IhtResult r = iht_run(inst.X, inst.y, s, 0.7, 500);
    if ((r.theta - inst.theta_star).norm() <= 1e-6) ++recovered;
  }
  EXPECT_GE(recovered, 47);
}

TEST(Iht, IteratesAreKSparse) {
  RandomSource rand(66);
  const SparseInstance inst = gen_sparse_instance(60, 80, 5, 0.05, Design::Rademacher, rand);
  IhtOptions opts;
  opts.on_iterate = [](int, const Vector& theta) { EXPECT_LE((theta.array() != 0.0).count(), 7); };
  iht_run(inst.X, inst.y, 7, 1.0, 50, opts);
}

TEST(Iht, ContractionWithinIsometryBound) {
  RandomSource rand(67);
  const Index n = 400, p = 12, s = 2;
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    SparseInstance inst = gen_sparse_instance(n, p, s, 0.0, Design::Gaussian, rand);
    to_unit_variance(inst);
    const IsometryEstimate rip = estimate_restricted_isometry(inst.X, 3 * s, 1, rand);
    ASSERT_TRUE(rip.exhaustive);
    if (rip.delta() >= 0.5) continue;
    ++checked;
    IhtOptions opts;
    opts.reference = inst.theta_star;
    const IhtResult r = iht_run(inst.X, inst.y, s, 1.0, 40, opts);
    double previous = inst.theta_star.norm();
    for (const TraceRow& row : r.trace.rows()) {
      if (previous < 1e-9) break;
      EXPECT_LE(*row.error / previous, 2.0 * rip.delta() + 0.05);
      previous = *row.error;
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(Iht, NoisyErrorFloor) {
  RandomSource rand(68);
  const Index n = 400, p = 200, s = 10;
  const double sigma = 0.1;
  SparseInstance inst = gen_sparse_instance(n, p, s, sigma, Design::Gaussian, rand);
  to_unit_variance(inst);
  const Vector noise = inst.y - inst.X * inst.theta_star;
  const double alpha = estimate_restricted_isometry(inst.X, 2 * s, 2000, rand).lower;
  const IhtResult r = iht_run(inst.X, inst.y, s, 1.0, 300);
  const double floor = (3.0 * std::sqrt(double(s)) / alpha) * (inst.X.transpose() * noise / double(n)).cwiseAbs().maxCoeff();
  EXPECT_LE((r.theta - inst.theta_star).norm(), 1.5 * floor);
}

TEST(Iht, InvalidArguments) {
  const Matrix X = Matrix::Identity(3, 3);
  const Vector y = Vector::Ones(3);
  EXPECT_THROW(iht_run(X, y, 0, 1.0, 1), InvalidInput);
  EXPECT_THROW(iht_run(X, y, 1, 0.0, 1), InvalidInput);
  EXPECT_THROW(iht_run(X, Vector::Ones(2), 1, 1.0, 1), InvalidInput);
}

TEST(Iht, LargeStepDiverges) {
  RandomSource rand(69);
  const SparseInstance inst = gen_sparse_instance(50, 40, 5, 0.0, Design::Gaussian, rand);
  EXPECT_THROW(iht_run(inst.X, inst.y, 40, 50.0, 500), Diverged);
}

// ---------------------------------------------------------------- isometry estimates

TEST(RestrictedIsometry, ExactIsometryAndScaling) {
  RandomSource rand(70);
  const Index n = 16, p = 16;
  const Matrix I = std::sqrt(double(n)) * Matrix::Identity(n, p);
  for (const Index k : {1, 3}) {
    const IsometryEstimate e = estimate_restricted_isometry(I, k, 10, rand);
    EXPECT_NEAR(e.lower, 1.0, 1e-12);
    EXPECT_NEAR(e.upper, 1.0, 1e-12);
    const IsometryEstimate e2 = estimate_restricted_isometry(2.0 * I, k, 10, rand);
    EXPECT_NEAR(e2.lower, 4.0, 1e-12);
    EXPECT_NEAR(e2.upper, 4.0, 1e-12);
  }
}

TEST(RestrictedIsometry, ExhaustiveBracketsSampled) {
  RandomSource rand(71);
  const Matrix X = rand.normal_matrix(10, 8);
  const IsometryEstimate exh = estimate_restricted_isometry(X, 2, 5, rand);
  const IsometryEstimate samp = estimate_restricted_isometry(X, 2, 5, rand, SupportSampling::Random);
  EXPECT_TRUE(exh.exhaustive);
  EXPECT_EQ(exh.trials, 28);
  EXPECT_FALSE(samp.exhaustive);
  EXPECT_LE(exh.lower, samp.lower);
  EXPECT_LE(samp.upper, exh.upper);
  // Independent oracle: Jacobi extremes on every 2-column Gram block.
  double lo = 1e300, hi = 0.0;
  oracle::for_each_subset(8, 2, [&](const std::vector<int>& s) {
    Matrix g(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) g(a, b) = X.col(s[a]).dot(X.col(s[b])) / 10.0;
    const Vector ev = oracle::jacobi_eigen(g).first;
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  });
  EXPECT_NEAR(exh.lower, lo, 1e-10);
  EXPECT_NEAR(exh.upper, hi, 1e-10);
}

TEST(RestrictedIsometry, MonotoneInOrder) {
  RandomSource rand(72);
  const Matrix X = rand.normal_matrix(30, 10);
  double previous = 0.0;
  for (Index k = 1; k <= 5; ++k) {
    const IsometryEstimate e = estimate_restricted_isometry(X, k, 1, rand);
    ASSERT_TRUE(e.exhaustive);
    EXPECT_GE(e.delta(), previous - 1e-12);
    previous = e.delta();
  }
}

TEST(RestrictedIsometry, Binomial) {
  EXPECT_EQ(binomial_capped(8, 2, 10000), 28);
  EXPECT_EQ(binomial_capped(200, 30, 10000), 10001);
  EXPECT_EQ(binomial_capped(5, 7, 10), 0);
}

}  // namespace
}  // namespace ncopt
