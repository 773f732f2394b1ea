#include <gtest/gtest.h>

#include <cmath>

#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"
#include "ncopt/lowrank.hpp"
#include "ncopt/projections.hpp"
#include "oracles.hpp"

namespace ncopt {
namespace {

// ---------------------------------------------------------------- AffineMap

TEST(AffineMap, ApplyAndAdjointMatchExplicitSums) {
  RandomSource rand(80);
  std::vector<Matrix> As;
  for (int i = 0; i < 5; ++i) As.push_back(rand.normal_matrix(3, 4));
  const AffineMap map = AffineMap::from_matrices(As);
  const Matrix X = rand.normal_matrix(3, 4);
  const Vector v = rand.normal_vector(5);
  const Vector ax = map.apply(X);
  Matrix adj = Matrix::Zero(3, 4);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(ax(i), (As[i].array() * X.array()).sum(), 1e-12);
    adj += v(i) * As[i];
  }
  EXPECT_LE((map.adjoint(v) - adj).norm(), 1e-12);
  EXPECT_EQ(map.measurement(2), As[2]);
}

TEST(AffineMap, IdentityVectorizes) {
  const AffineMap map = AffineMap::identity(2, 3);
  Matrix X(2, 3);
  X << 1, 2, 3, 4, 5, 6;
  const Vector y = map.apply(X);
  EXPECT_EQ(y.size(), 6);
  EXPECT_EQ(y(1), 4.0);  // column-major
  EXPECT_EQ(map.adjoint(y), X);
}

TEST(AffineMap, AdjointProbe) {
  RandomSource rand(81);
  const ArmInstance inst = gen_arm_instance(6, 5, 2, 40, rand);
  EXPECT_LE(adjoint_mismatch(inst.map, rand, 20), 1e-8);
}

TEST(AffineMap, ShapeErrors) {
  const AffineMap map = AffineMap::identity(2, 2);
  EXPECT_THROW(map.apply(Matrix::Zero(2, 3)), InvalidInput);
  EXPECT_THROW(map.adjoint(Vector::Zero(3)), InvalidInput);
  EXPECT_THROW(AffineMap::from_matrices({Matrix::Zero(2, 2), Matrix::Zero(3, 2)}), InvalidInput);
  EXPECT_THROW(AffineMap(2, 2, Matrix::Zero(3, 5)), InvalidInput);
}

TEST(GenArmInstance, Shapes) {
  RandomSource rand(82);
  const ArmInstance inst = gen_arm_instance(5, 4, 4, 30, rand);
  EXPECT_EQ(inst.y.size(), 30);
  EXPECT_EQ(inst.map.measurements(), 30);
  EXPECT_GT(oracle::singular_values(inst.X_star).minCoeff(), 1e-8);
  EXPECT_LE((inst.map.apply(inst.X_star) - inst.y).norm(), 1e-12);
  EXPECT_THROW(gen_arm_instance(3, 3, 4, 10, rand), InvalidInput);
  EXPECT_THROW(gen_arm_instance(3, 3, 1, 0, rand), InvalidInput);
}

TEST(GenArmInstance, MeasurementVariance) {
  RandomSource rand(83);
  const ArmInstance inst = gen_arm_instance(10, 10, 1, 200, rand);
  const double var = inst.map.stacked().squaredNorm() / double(inst.map.stacked().size());
  EXPECT_NEAR(var * 200.0, 1.0, 0.02);
}

// ---------------------------------------------------------------- isometry

TEST(MatrixIsometry, IdentityIsExact) {
  RandomSource rand(84);
  const MatrixIsometryEstimate e = estimate_matrix_isometry(AffineMap::identity(3, 3), 1, rand);
  EXPECT_FALSE(e.exact);
  EXPECT_NEAR(e.lower, 1.0, 1e-12);
  EXPECT_NEAR(e.upper, 1.0, 1e-12);
  const MatrixIsometryEstimate full = estimate_matrix_isometry(AffineMap::identity(3, 3), 3, rand);
  EXPECT_TRUE(full.exact);
  EXPECT_NEAR(full.delta(), 0.0, 1e-12);
}

TEST(MatrixIsometry, ProbesStayInsideGramSpectrum) {
  RandomSource rand(85);
  const ArmInstance inst = gen_arm_instance(4, 5, 1, 60, rand);
  const Matrix gram = inst.map.stacked().transpose() * inst.map.stacked();
  const Vector ev = oracle::jacobi_eigen(gram).first;
  const MatrixIsometryEstimate e = estimate_matrix_isometry(inst.map, 2, rand);
  EXPECT_GE(e.lower, ev.minCoeff() - 1e-9);
  EXPECT_LE(e.upper, ev.maxCoeff() + 1e-9);
  EXPECT_LE(e.lower, e.upper);
  const MatrixIsometryEstimate exact = estimate_matrix_isometry(inst.map, 4, rand);
  EXPECT_NEAR(exact.lower, std::max(ev.minCoeff(), 0.0), 1e-9);
  EXPECT_NEAR(exact.upper, ev.maxCoeff(), 1e-9);
}

TEST(MatrixIsometry, RefinementOnlyWidens) {
  RandomSource a(86), b(86), gen(87);
  const ArmInstance inst = gen_arm_instance(8, 8, 1, 50, gen);
  const MatrixIsometryEstimate raw = estimate_matrix_isometry(inst.map, 2, a, 20, 0);
  const MatrixIsometryEstimate refined = estimate_matrix_isometry(inst.map, 2, b, 20, 10);
  EXPECT_LE(refined.lower, raw.lower + 1e-12);
  EXPECT_GE(refined.upper, raw.upper - 1e-12);
}

TEST(MatrixIsometry, DefaultStep) {
  RandomSource rand(88);
  const ArmInstance inst = gen_arm_instance(6, 6, 1, 80, rand);
  const double eta = svp_default_step(inst.map, 1, rand);
  EXPECT_GT(eta, 0.0);
  EXPECT_LE(eta, 1.0);
}

// ---------------------------------------------------------------- SVP

TEST(Svp, IdentityMapIsOneTruncatedSvd) {
  RandomSource rand(89);
  const Matrix M = rand.normal_matrix(6, 5);
  const AffineMap map = AffineMap::identity(6, 5);
  const SvpResult r = svp_run(map, map.apply(M), 2, 1.0, 1);
  EXPECT_LE((r.X - oracle::best_rank(M, 2)).norm(), 1e-10);
  EXPECT_EQ(r.iterations, 1);
}

TEST(Svp, ZeroTargetStaysZero) {
  RandomSource rand(90);
  const ArmInstance inst = gen_arm_instance(5, 5, 2, 40, rand);
  SvpOptions opts;
  opts.on_iterate = [](int, const Matrix& X) { EXPECT_EQ(X.norm(), 0.0); };
  const SvpResult r = svp_run(inst.map, Vector::Zero(40), 2, 0.8, 5, opts);
  EXPECT_EQ(r.X.norm(), 0.0);
}

TEST(Svp, GaussianRecoveryRegime) {
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rand(7000 + seed);
    const ArmInstance inst = gen_arm_instance(30, 30, 3, 6 * 30 * 3, rand);
    const double eta = svp_default_step(inst.map, 3, rand);
    SvpOptions opts;
    opts.reference = inst.X_star;
    const SvpResult r = svp_run(inst.map, inst.y, 3, eta, 300, opts);
    if ((r.X - inst.X_star).norm() / inst.X_star.norm() <= 1e-4) ++recovered;
  }
  EXPECT_GE(recovered, 18);
}

TEST(Svp, IteratesHaveRankAtMostQ) {
  RandomSource rand(91);
  const ArmInstance inst = gen_arm_instance(8, 7, 3, 120, rand);
  SvpOptions opts;
  opts.on_iterate = [](int, const Matrix& X) {
    const Vector s = oracle::singular_values(X);
    EXPECT_LE((s.array() > 1e-9 * std::max(s(0), 1.0)).count(), 2);
  };
  svp_run(inst.map, inst.y, 2, 0.7, 20, opts);
}

TEST(Svp, ContractionWithinIsometryBound) {
  RandomSource rand(92);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const ArmInstance inst = gen_arm_instance(4, 4, 2, 1000, rand);
    const MatrixIsometryEstimate rip = estimate_matrix_isometry(inst.map, 4, rand);
    ASSERT_TRUE(rip.exact);
    const double delta = rip.delta();
    if (delta >= 1.0 / 3.0) continue;
    ++checked;
    const SvpResult r = svp_run(inst.map, inst.y, 2, 1.0 / (1.0 + delta), 60);
    double previous = 0.5 * inst.y.squaredNorm();
    for (const TraceRow& row : r.trace.rows()) {
      if (previous < 1e-24) break;
      EXPECT_LE(row.objective / previous, 2.0 * delta / (1.0 - delta) + 0.1);
      previous = row.objective;
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(Svp, InvalidArguments) {
  const AffineMap map = AffineMap::identity(3, 3);
  EXPECT_THROW(svp_run(map, Vector::Zero(8), 1, 1.0, 1), InvalidInput);
  EXPECT_THROW(svp_run(map, Vector::Zero(9), 0, 1.0, 1), InvalidInput);
  EXPECT_THROW(svp_run(map, Vector::Zero(9), 1, -1.0, 1), InvalidInput);
}

TEST(Svp, LargeStepDiverges) {
  RandomSource rand(93);
  const ArmInstance inst = gen_arm_instance(6, 6, 2, 30, rand);
  EXPECT_THROW(svp_run(inst.map, inst.y, 6, 50.0, 500), Diverged);
}

// ---------------------------------------------------------------- incoherence

TEST(Incoherence, Examples) {
  Matrix spike = Matrix::Zero(4, 4);
  spike(0, 0) = 1.0;
  EXPECT_NEAR(incoherence_of(spike, 1).mu, 2.0, 1e-12);
  EXPECT_NEAR(incoherence_of(Matrix::Ones(5, 3), 1).mu, 1.0, 1e-12);
}

TEST(Incoherence, MatchesJacobiOracle) {
  RandomSource rand(94);
  const Matrix A = rand.normal_matrix(10, 2) * rand.normal_matrix(10, 2).transpose();
  const IncoherenceReport rep = incoherence_of(A, 2);
  EXPECT_EQ(rep.rank, 2);
  EXPECT_NEAR(rep.mu, oracle::incoherence(A, 2), 1e-8);
}

TEST(Incoherence, FactorIsBasisInvariant) {
  RandomSource rand(95);
  const Matrix F = rand.normal_matrix(12, 2);
  const Matrix R = rand.normal_matrix(2, 2);
  EXPECT_NEAR(factor_incoherence(F), factor_incoherence(F * R), 1e-9);
  EXPECT_NEAR(factor_incoherence(Vector::Ones(9)), 1.0, 1e-12);
}

// ---------------------------------------------------------------- completion instances

TEST(GenCompletion, FullSampling) {
  RandomSource rand(96);
  const CompletionInstance inst = gen_completion_instance(7, 5, 2, 1.0, 100.0, rand);
  EXPECT_EQ(inst.omega.size(), 35u);
  EXPECT_LE((inst.A_star - inst.U_star * inst.V_star.transpose()).norm(), 1e-12);
  EXPECT_LE((scaled_observation(inst) - inst.A_star).norm(), 1e-12);
}

TEST(GenCompletion, SamplingRateConcentrates) {
  RandomSource rand(97);
  const double p = 0.3;
  const CompletionInstance inst = gen_completion_instance(60, 50, 2, p, 100.0, rand);
  const double rate = double(inst.omega.size()) / 3000.0;
  EXPECT_LE(std::abs(rate - p), 3.0 * std::sqrt(p * (1 - p) / 3000.0));
}

TEST(GenCompletion, IncoherenceCap) {
  RandomSource rand(98);
  const CompletionInstance inst = gen_completion_instance(30, 30, 1, 0.5, 2.5, rand);
  EXPECT_LE(incoherence_of(inst.A_star, 1).mu, 2.5);
  EXPECT_THROW(gen_completion_instance(30, 30, 1, 0.5, 1.0, rand), GenerationError);
  EXPECT_THROW(gen_completion_instance(30, 30, 1, 0.0, 5.0, rand), InvalidInput);
}

TEST(GenCompletion, SpectralInitQuality) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSource rand(9000 + seed);
    const CompletionInstance inst = gen_completion_instance(400, 400, 1, 0.9, 3.0, rand);
    const Matrix diff = scaled_observation(inst) - inst.A_star;
    const double top = Eigen::BDCSVD<Matrix>(diff).singularValues()(0);
    if (top <= 0.1 * Eigen::BDCSVD<Matrix>(inst.A_star).singularValues()(0)) ++good;
  }
  EXPECT_GE(good, 9);
}

// ---------------------------------------------------------------- AM-MC

std::vector<Entry> all_entries(Index m, Index n) {
  std::vector<Entry> out;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) out.push_back({i, j});
  return out;
}

TEST(Ammc, RowSolvesMatchNormalEquations) {
  RandomSource rand(99);
  const Matrix A = rand.normal_matrix(8, 6);
  const Matrix U = rand.normal_matrix(8, 2);
  std::vector<Entry> entries;
  for (const Entry& e : all_entries(8, 6))
    if (rand.bernoulli(0.6)) entries.push_back(e);
  const Matrix previous = Matrix::Constant(6, 2, 7.0);
  AmmcDiagnostics diag;
  const Matrix V = ammc_solve_right(U, A, entries, previous, &diag);
  for (Index j = 0; j < 6; ++j) {
    std::vector<Index> rows;
    for (const Entry& e : entries)
      if (e.col == j) rows.push_back(e.row);
    if (rows.empty()) {
      EXPECT_EQ(V.row(j), previous.row(j));
      continue;
    }
    Matrix D(static_cast<Index>(rows.size()), 2);
    Vector b(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      D.row(static_cast<Index>(k)) = U.row(rows[k]);
      b(static_cast<Index>(k)) = A(rows[k], j);
    }
    if (rows.size() < 2) continue;
    const Vector expected = oracle::normal_equations<double>(D, b, 0.0);
    EXPECT_LE((V.row(j).transpose() - expected).norm(), 1e-9 * (1.0 + expected.norm()));
  }
}

TEST(Ammc, EmptyRowsCarryPreviousFactor) {
  const Matrix A = Matrix::Ones(3, 3);
  const Matrix previous = Matrix::Constant(3, 1, 5.0);
  AmmcDiagnostics diag;
  const Matrix V = ammc_solve_right(Matrix::Ones(3, 1), A, {{0, 0}, {1, 0}}, previous, &diag);
  EXPECT_NEAR(V(0, 0), 1.0, 1e-10);
  EXPECT_EQ(V(1, 0), 5.0);
  EXPECT_EQ(V(2, 0), 5.0);
  EXPECT_EQ(diag.empty_rows, 2);
}

TEST(Ammc, RankOneUpdateIsPowerStep) {
  RandomSource rand(100);
  const Vector u_star = rand.normal_vector(9), v_star = rand.normal_vector(7);
  const Matrix A = u_star * v_star.transpose();
  Vector u = rand.normal_vector(9);
  u /= u.norm();
  const Matrix V = ammc_solve_right(u, A, all_entries(9, 7), Matrix::Zero(7, 1));
  const Vector expected = u.dot(u_star) * v_star;
  EXPECT_LE((V.col(0) - expected).norm(), 1e-8 * expected.norm());
}

TEST(Ammc, FullObservationRecoversInOneStep) {
  RandomSource rand(101);
  const CompletionInstance inst = gen_completion_instance(20, 15, 1, 1.0, 100.0, rand);
  AmmcOptions opts;
  opts.splitting = SampleSplitting::Reuse;
  const AmmcResult r = ammc_run(inst, 1, 1, rand, opts);
  EXPECT_LE((r.U * r.V.transpose() - inst.A_star).norm(), 1e-8 * inst.A_star.norm());
}

TEST(Ammc, ZeroMatrix) {
  CompletionInstance inst;
  inst.A_star = Matrix::Zero(6, 5);
  inst.rank = 1;
  inst.omega = all_entries(6, 5);
  RandomSource rand(102);
  const AmmcResult r = ammc_run(inst, 1, 2, rand);
  EXPECT_EQ((r.U * r.V.transpose()).norm(), 0.0);
  EXPECT_EQ(*r.trace.back().error, 0.0);
}

TEST(Ammc, RankOneRegimeWithSampleReuse) {
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rand(8000 + seed);
    const CompletionInstance inst = gen_completion_instance(100, 100, 1, 0.2, 3.0, rand);
    AmmcOptions opts;
    opts.splitting = SampleSplitting::Reuse;
    const AmmcResult r = ammc_run(inst, 1, kAmmcDefaultIterations, rand, opts);
    if (aligned_distance(r.U.col(0), inst.U_star.col(0)) <= 1e-3) ++recovered;
  }
  EXPECT_GE(recovered, 18);
}

TEST(Ammc, PartitionedRecoversWithDenseSampling) {
  RandomSource rand(103);
  const CompletionInstance inst = gen_completion_instance(100, 100, 1, 1.0, 3.0, rand);
  const AmmcResult r = ammc_run(inst, 1, 10, rand);
  EXPECT_FALSE(r.diagnostics.sparse_splits);
  EXPECT_LE(aligned_distance(r.U.col(0), inst.U_star.col(0)), 1e-2);
  EXPECT_LT(*r.trace.back().error, 1e-2 * *r.trace.rows()[1].error);
}

TEST(Ammc, SparseSplitsAreFlagged) {
  RandomSource rand(104);
  const CompletionInstance inst = gen_completion_instance(20, 20, 1, 0.2, 100.0, rand);
  const AmmcResult r = ammc_run(inst, 1, kAmmcDefaultIterations, rand);
  EXPECT_TRUE(r.diagnostics.sparse_splits);
  EXPECT_GT(r.diagnostics.empty_rows, 0);
  EXPECT_THROW(ammc_run(inst, 1, 1000, rand), InvalidInput);
}

TEST(Ammc, IteratesStayIncoherent) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomSource rand(8100 + seed);
    const CompletionInstance inst = gen_completion_instance(100, 100, 1, 0.2, 3.0, rand);
    const double mu = incoherence_of(inst.A_star, 1).mu;
    AmmcOptions opts;
    opts.splitting = SampleSplitting::Reuse;
    opts.on_iterate = [&](int, const Matrix& U, const Matrix& V) {
      EXPECT_LE(factor_incoherence(U), 2.0 * mu * 1.1);
      EXPECT_LE(factor_incoherence(V), 2.0 * mu * 1.1);
    };
    ammc_run(inst, 1, 10, rand, opts);
  }
}

TEST(Ammc, RankTwoObjectiveMonotone) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSource rand(8200 + seed);
    const CompletionInstance inst = gen_completion_instance(40, 30, 2, 0.5, 100.0, rand);
    AmmcOptions opts;
    opts.splitting = SampleSplitting::Reuse;
    const AmmcResult r = ammc_run(inst, 2, 15, rand, opts);
    const auto& rows = r.trace.rows();
    for (std::size_t t = 1; t < rows.size(); ++t)
      EXPECT_LE(rows[t].objective, rows[t - 1].objective + 1e-9 * (1.0 + rows[t - 1].objective));
    EXPECT_LT(*rows.back().error, *rows.front().error + 1e-12);
  }
}

TEST(AlignedDistance, SignInvariant) {
  RandomSource rand(105);
  const Vector u = rand.normal_vector(5);
  EXPECT_NEAR(aligned_distance(-3.0 * u, u), 0.0, 1e-12);
  EXPECT_NEAR(aligned_distance(u, u), 0.0, 1e-12);
  EXPECT_THROW(aligned_distance(u, Vector::Ones(4)), InvalidInput);
}

}  // namespace
}  // namespace ncopt
