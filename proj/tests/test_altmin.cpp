#include <gtest/gtest.h>

#include <cmath>

#include "ncopt/altmin.hpp"
#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"
#include "oracles.hpp"

namespace ncopt {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (const double x : xs) v(i++) = x;
  return v;
}

Vector scalar(double x) { return vec({x}); }

// ---------------------------------------------------------------- gAM

TEST(Gam, SeparableQuadraticOneRound) {
  BivariateOracle f;
  f.value = [](const Vector& x, const Vector& y) { return x.squaredNorm() + y.squaredNorm(); };
  f.argmin_x_given_y = [](const Vector&) -> Vector { return scalar(0.0); };
  f.argmin_y_given_x = [](const Vector&) -> Vector { return scalar(0.0); };
  const GamResult r = gam_run(f, scalar(1.0), scalar(1.0), 1);
  EXPECT_EQ(r.x(0), 0.0);
  EXPECT_EQ(r.y(0), 0.0);
}

TEST(Gam, JointlyConvexQuadraticStrictDecrease) {
  // f = (x - y)^2 + x^2: argmin_x = y / 2, argmin_y = x.
  BivariateOracle f;
  f.value = [](const Vector& x, const Vector& y) { return std::pow(x(0) - y(0), 2) + x(0) * x(0); };
  f.argmin_x_given_y = [](const Vector& y) -> Vector { return scalar(y(0) / 2.0); };
  f.argmin_y_given_x = [](const Vector& x) -> Vector { return scalar(x(0)); };
  const GamResult r = gam_run(f, scalar(1.0), scalar(1.0), 60);
  EXPECT_LE(std::abs(r.x(0)) + std::abs(r.y(0)), 1e-12);
  double previous = r.initial_value;
  for (const GamStep& s : r.steps) {
    if (previous < 1e-12) break;
    EXPECT_LT(s.value_after_x, previous);
    EXPECT_LE(s.value, s.value_after_x);
    previous = s.value;
  }
}

TEST(Gam, BiconvexMatchesGridAlternationOracle) {
  // f = (xy - 1)^2 + 0.2 x^2 + 0.1 y^2.
  const auto value = [](double x, double y) { return std::pow(x * y - 1.0, 2) + 0.2 * x * x + 0.1 * y * y; };
  BivariateOracle f;
  f.value = [&](const Vector& x, const Vector& y) { return value(x(0), y(0)); };
  f.argmin_x_given_y = [](const Vector& y) -> Vector { return scalar(y(0) / (y(0) * y(0) + 0.2)); };
  f.argmin_y_given_x = [](const Vector& x) -> Vector { return scalar(x(0) / (x(0) * x(0) + 0.1)); };
  const GamResult r = gam_run(f, scalar(2.0), scalar(0.5), 500);

  const double h = 1e-3;
  const auto grid_argmin = [&](auto&& g) {
    double best = 0.0, best_v = std::numeric_limits<double>::infinity();
    for (int k = -3000; k <= 3000; ++k) {
      const double v = g(k * h);
      if (v < best_v) {
        best_v = v;
        best = k * h;
      }
    }
    return best;
  };
  double gx = 2.0, gy = 0.5;
  for (int round = 0; round < 2000; ++round) {
    const double nx = grid_argmin([&](double x) { return value(x, gy); });
    const double ny = grid_argmin([&](double y) { return value(nx, y); });
    const bool fixed = nx == gx && ny == gy;
    gx = nx;
    gy = ny;
    if (fixed) break;
  }
  EXPECT_NEAR(r.x(0), gx, 2e-3);
  EXPECT_NEAR(r.y(0), gy, 2e-3);
}

TEST(Gam, NonFiniteOracleDiverges) {
  BivariateOracle f = rank_one_factorization_oracle(Matrix::Identity(2, 2), 0.0);
  EXPECT_THROW(gam_run(f, Vector::Zero(2), Vector::Zero(2), 3), Diverged);
}

TEST(Gam, MarginalMinimizersAreOptimal) {
  RandomSource rand(41);
  const Matrix M = rand.normal_matrix(5, 4);
  const BivariateOracle f = rank_one_factorization_oracle(M, 0.1);
  for (int k = 0; k < 20; ++k) {
    const Vector u = rand.normal_vector(5), v = rand.normal_vector(4);
    EXPECT_LE(f.value(f.argmin_x_given_y(v), v), f.value(u, v) + 1e-12);
    EXPECT_LE(f.value(u, f.argmin_y_given_x(u)), f.value(u, v) + 1e-12);
  }
}

// ---------------------------------------------------------------- bistability

ObjectiveOracle joint(std::function<double(double, double)> value, std::function<Vector(double, double)> grad) {
  ObjectiveOracle f;
  f.value = [value](const Vector& z) { return value(z(0), z(1)); };
  f.gradient = [grad](const Vector& z) { return grad(z(0), z(1)); };
  return f;
}

TEST(CheckBistable, Examples) {
  const ObjectiveOracle bowl =
      joint([](double x, double y) { return x * x + y * y; }, [](double x, double y) { return vec({2 * x, 2 * y}); });
  EXPECT_TRUE(check_bistable(bowl, vec({0, 0}), 1e-10).bistable);
  const BistableCheck off = check_bistable(bowl, vec({1, 0}), 1e-10);
  EXPECT_FALSE(off.bistable);
  EXPECT_DOUBLE_EQ(off.gradient_norm, 2.0);
  // x*y is marginally linear, so its saddle at the origin is bistable.
  const ObjectiveOracle bilinear =
      joint([](double x, double y) { return x * y; }, [](double x, double y) { return vec({y, x}); });
  EXPECT_TRUE(check_bistable(bilinear, vec({0, 0}), 1e-10).bistable);
}

// ---------------------------------------------------------------- GMM E/M

TEST(GmmWeights, Examples) {
  const GmmState s{vec({1, 0}), vec({-1, 0})};
  const LatentWeights eq = gmm_posterior_weights(s, vec({0, 3}));
  EXPECT_DOUBLE_EQ(eq.w0, 0.5);
  EXPECT_DOUBLE_EQ(eq.w1, 0.5);
  const GmmState far{vec({0, 0}), vec({20, 0})};
  EXPECT_GE(gmm_posterior_weights(far, vec({0, 0})).w0, 1.0 - 1e-40);
}

TEST(GmmWeights, MatchExtendedPrecisionDensities) {
  RandomSource rand(42);
  for (int k = 0; k < 50; ++k) {
    const GmmState s{rand.normal_vector(3), rand.normal_vector(3)};
    const Vector y = 2.0 * rand.normal_vector(3);
    const long double d0 = std::exp(-0.5L * static_cast<long double>((y - s.mu0).squaredNorm()));
    const long double d1 = std::exp(-0.5L * static_cast<long double>((y - s.mu1).squaredNorm()));
    const LatentWeights w = gmm_posterior_weights(s, y);
    EXPECT_NEAR(w.w0, static_cast<double>(d0 / (d0 + d1)), 1e-12);
    EXPECT_NEAR(w.w1, static_cast<double>(d1 / (d0 + d1)), 1e-12);
  }
}

TEST(GmmWeights, NormalizedAtExtremeResiduals) {
  const GmmState s{vec({0.0}), vec({1e4})};
  for (const double y : {-1e4, 0.0, 5e3, 1e4, 2e4}) {
    const LatentWeights w = gmm_posterior_weights(s, vec({y}));
    EXPECT_NEAR(w.w0 + w.w1, 1.0, 1e-12);
    EXPECT_GE(w.w0, 0.0);
    EXPECT_GE(w.w1, 0.0);
  }
  const MixRegState m{vec({0.0}), vec({1.0})};
  const LatentWeights w = mixreg_posterior_weights(m, vec({1e4}), 0.0);
  EXPECT_NEAR(w.w0 + w.w1, 1.0, 1e-12);
}

TEST(GmmMeans, Examples) {
  Matrix pts(3, 2);
  pts << 1, 2, 3, 4, 5, 9;
  const std::vector<LatentWeights> all0(3, LatentWeights{1.0, 0.0});
  EXPECT_THROW(gmm_update_means(pts, all0), DegenerateComponent);
  std::vector<LatentWeights> mostly0(3, LatentWeights{1.0, 0.0});
  mostly0[2] = {1.0 - 1e-300, 1e-300};
  EXPECT_LE((gmm_update_means(pts, mostly0).mu0 - vec({3, 5})).norm(), 1e-12);

  Matrix two(2, 2);
  two << 1, 1, -2, 3;
  const GmmState s = gmm_update_means(two, {{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(s.mu0, vec({1, 1}));
  EXPECT_EQ(s.mu1, vec({-2, 3}));
}

double explicit_q(const GmmState& s, const Matrix& pts, const std::vector<LatentWeights>& w) {
  double q = 0.0;
  for (Index i = 0; i < pts.rows(); ++i) {
    const Vector y = pts.row(i).transpose();
    q -= 0.5 * w[std::size_t(i)].w0 * (y - s.mu0).squaredNorm();
    q -= 0.5 * w[std::size_t(i)].w1 * (y - s.mu1).squaredNorm();
  }
  return q;
}

TEST(GmmMeans, MaximizesQOnGrid) {
  RandomSource rand(43);
  Matrix pts(3, 1);
  pts << rand.normal(), rand.normal(), rand.normal();
  std::vector<LatentWeights> w;
  for (int i = 0; i < 3; ++i) {
    const double a = rand.uniform();
    w.push_back({a, 1.0 - a});
  }
  const GmmState s = gmm_update_means(pts, w);
  const double lo = pts.minCoeff(), hi = pts.maxCoeff();
  GmmState best = s;
  double best_q = -std::numeric_limits<double>::infinity();
  for (double m0 = lo; m0 <= hi; m0 += 1e-4) {
    // Q separates across components; grid each coordinate independently.
    const double q = explicit_q({vec({m0}), s.mu1}, pts, w);
    if (q > best_q) {
      best_q = q;
      best.mu0 = vec({m0});
    }
  }
  best_q = -std::numeric_limits<double>::infinity();
  for (double m1 = lo; m1 <= hi; m1 += 1e-4) {
    const double q = explicit_q({best.mu0, vec({m1})}, pts, w);
    if (q > best_q) {
      best_q = q;
      best.mu1 = vec({m1});
    }
  }
  EXPECT_NEAR(s.mu0(0), best.mu0(0), 1e-4);
  EXPECT_NEAR(s.mu1(0), best.mu1(0), 1e-4);
}

TEST(GmmMeans, StationaryForQ) {
  RandomSource rand(44);
  const Matrix pts = rand.normal_matrix(20, 3);
  std::vector<LatentWeights> w;
  for (int i = 0; i < 20; ++i) {
    const double a = rand.uniform();
    w.push_back({a, 1.0 - a});
  }
  const GmmState s = gmm_update_means(pts, w);
  Vector packed(6);
  packed << s.mu0, s.mu1;
  const auto q = [&](const Vector& z) { return explicit_q({z.head(3), z.tail(3)}, pts, w); };
  // Q is quadratic, so a wide central difference is exact up to rounding.
  EXPECT_LE(oracle::numeric_gradient(q, packed, 1e-3).norm(), 1e-8);
}

// ---------------------------------------------------------------- mixed regression E/M

TEST(MixRegWeights, Examples) {
  const MixRegState s{vec({1, 0}), vec({0, 1})};
  const LatentWeights eq = mixreg_posterior_weights(s, vec({1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(eq.w0, 0.5);
  const MixRegState fit{vec({1, 2}), vec({1, 2}) + vec({10, 0})};
  EXPECT_GE(mixreg_posterior_weights(fit, vec({1, 0}), 1.0).w0, 1.0 - 1e-20);
}

TEST(MixRegWeights, MatchExtendedPrecisionRatio) {
  RandomSource rand(45);
  for (int k = 0; k < 50; ++k) {
    const MixRegState s{rand.normal_vector(3), rand.normal_vector(3)};
    const Vector x = rand.normal_vector(3);
    const double y = rand.normal();
    const long double r0 = y - x.dot(s.theta0), r1 = y - x.dot(s.theta1);
    const long double ratio = std::exp(-0.5L * (r1 * r1 - r0 * r0));
    EXPECT_NEAR(mixreg_posterior_weights(s, x, y).w0, static_cast<double>(1.0L / (1.0L + ratio)), 1e-12);
  }
}

TEST(MixRegModels, AllWeightOnOneComponentIsLeastSquares) {
  RandomSource rand(46);
  const Matrix X = rand.normal_matrix(12, 3);
  const Vector y = rand.normal_vector(12);
  std::vector<LatentWeights> w(12, LatentWeights{1.0, 0.0});
  const MixRegUpdate u = mixreg_update_models(X, y, w);
  EXPECT_LE((u.state.theta0 - oracle::normal_equations<double>(X, y, 0.0)).norm(), 1e-10);
  EXPECT_TRUE(u.stabilized[1]);
  EXPECT_LE(u.state.theta1.norm(), 1e-12);
}

TEST(MixRegModels, ConsistentSplitRecoversModels) {
  RandomSource rand(47);
  const MixRegState truth{rand.normal_vector(3), rand.normal_vector(3)};
  const MixRegData d = gen_mixreg_data(30, truth, 0.0, rand);
  std::vector<LatentWeights> w;
  for (const int z : d.labels) w.push_back(z == 0 ? LatentWeights{1, 0} : LatentWeights{0, 1});
  const MixRegUpdate u = mixreg_update_models(d.X, d.y, w);
  EXPECT_LE((u.state.theta0 - truth.theta0).norm(), 1e-10);
  EXPECT_LE((u.state.theta1 - truth.theta1).norm(), 1e-10);
}

TEST(MixRegModels, MatchesWeightedNormalEquations) {
  RandomSource rand(48);
  const Matrix X = rand.normal_matrix(15, 4);
  const Vector y = rand.normal_vector(15);
  std::vector<LatentWeights> w;
  for (int i = 0; i < 15; ++i) {
    const double a = rand.uniform();
    w.push_back({a, 1.0 - a});
  }
  const MixRegUpdate u = mixreg_update_models(X, y, w);
  for (int z = 0; z < 2; ++z) {
    Matrix G = Matrix::Zero(4, 4);
    Vector b = Vector::Zero(4);
    for (Index i = 0; i < 15; ++i) {
      const double a = z == 0 ? w[std::size_t(i)].w0 : w[std::size_t(i)].w1;
      G += a * X.row(i).transpose() * X.row(i);
      b += a * y(i) * X.row(i).transpose();
    }
    const Vector expected = oracle::gauss_solve<double>(G, b);
    EXPECT_LE(((z == 0 ? u.state.theta0 : u.state.theta1) - expected).norm(), 1e-10);
  }
}

// ---------------------------------------------------------------- EM

TEST(Em, GmmRecoversMeans) {
  RandomSource rand(49);
  const GmmState truth{vec({5, 0}), vec({-5, 0})};
  const Matrix pts = gen_gmm_points(500, truth, rand);
  const GmmState init{truth.mu0 + vec({0.3, -0.3}), truth.mu1 + vec({-0.2, 0.4})};
  const EmResult<GmmState> r = gmm_em(pts, init, 30);
  const GmmState& f = r.states.back();
  EXPECT_LE(swap_invariant_distance(f.mu0, f.mu1, truth.mu0, truth.mu1), 0.15);
  EXPECT_EQ(r.states.size(), 31u);
  EXPECT_EQ(r.trace.size(), 30u);
}

TEST(Em, MixedRegressionSymmetricModels) {
  RandomSource rand(50);
  const Vector theta = 3.0 * sample_unit_sphere(4, rand);
  const MixRegState truth{theta, -theta};
  const MixRegData d = gen_mixreg_data(2000, truth, 1.0, rand);
  const MixRegState init{theta + 0.3 * sample_unit_sphere(4, rand), -theta + 0.3 * sample_unit_sphere(4, rand)};
  const MixRegState f = mixreg_em(d.X, d.y, init, 50).states.back();
  EXPECT_LE(swap_invariant_distance(f.theta0, f.theta1, truth.theta0, truth.theta1), 0.1);
}

TEST(Em, IdenticalInitializationNeverSeparates) {
  RandomSource rand(51);
  const Vector theta = sample_unit_sphere(3, rand);
  const MixRegData d = gen_mixreg_data(300, {theta, -theta}, 0.5, rand);
  const Vector start = rand.normal_vector(3);
  for (const MixRegState& s : mixreg_em(d.X, d.y, {start, start}, 20).states)
    EXPECT_EQ(s.theta0, s.theta1);
  const Matrix pts = gen_gmm_points(200, {vec({2, 0}), vec({-2, 0})}, rand);
  for (const GmmState& s : gmm_em(pts, {vec({0.1, 0.1}), vec({0.1, 0.1})}, 20).states) EXPECT_EQ(s.mu0, s.mu1);
}

TEST(Em, StochasticVariantDefaultSchedule) {
  RandomSource rand(52);
  const GmmState truth{vec({4, 0}), vec({-4, 0})};
  const Matrix pts = gen_gmm_points(2000, truth, rand);
  const EmResult<GmmState> r = gmm_stochastic_em(pts, {vec({3, 1}), vec({-3, -1})}, 4000, rand);
  const GmmState& f = r.states.back();
  EXPECT_LE(swap_invariant_distance(f.mu0, f.mu1, truth.mu0, truth.mu1), 0.3);
  int calls = 0;
  gmm_stochastic_em(pts, truth, 10, rand, [&](int t) {
    ++calls;
    return 0.5 / t;
  });
  EXPECT_EQ(calls, 10);
}

// ---------------------------------------------------------------- AM-LVM

TEST(Amlvm, HardAssignmentIsLloydStep) {
  RandomSource rand(53);
  const GmmState s{rand.normal_vector(2), rand.normal_vector(2)};
  const Matrix pts = 2.0 * rand.normal_matrix(200, 2);
  const std::vector<int> z = gmm_hard_assign(s, pts);
  Vector sum[2] = {Vector::Zero(2), Vector::Zero(2)};
  int count[2] = {0, 0};
  for (Index i = 0; i < 200; ++i) {
    const Vector y = pts.row(i).transpose();
    const int expect = (y - s.mu0).norm() > (y - s.mu1).norm() ? 1 : 0;
    EXPECT_EQ(z[std::size_t(i)], expect);
    sum[expect] += y;
    ++count[expect];
  }
  bool empty = true;
  const GmmState m = gmm_hard_means(pts, z, s, empty);
  EXPECT_FALSE(empty);
  EXPECT_LE((m.mu0 - sum[0] / count[0]).norm(), 1e-12);
  EXPECT_LE((m.mu1 - sum[1] / count[1]).norm(), 1e-12);
}

TEST(Amlvm, EmptyClusterKeepsPreviousMean) {
  Matrix pts(3, 1);
  pts << 0.1, -0.2, 0.3;
  const GmmState init{vec({0.0}), vec({100.0})};
  const AmlvmResult<GmmState> r = gmm_amlvm(pts, init, 3);
  EXPECT_TRUE(r.empty_component);
  EXPECT_EQ(r.states.back().mu1, vec({100.0}));
  EXPECT_NEAR(r.states.back().mu0(0), 0.2 / 3.0, 1e-15);
}

TEST(Amlvm, AgreesWithEmOnSeparatedClusters) {
  RandomSource rand(54);
  const GmmState truth{vec({6, 0, 0}), vec({-6, 0, 0})};
  const Matrix pts = gen_gmm_points(600, truth, rand);
  const GmmState init{vec({4, 1, 0}), vec({-4, -1, 0})};
  const GmmState a = gmm_amlvm(pts, init, 30).states.back();
  const GmmState e = gmm_em(pts, init, 30).states.back();
  EXPECT_LE(swap_invariant_distance(a.mu0, a.mu1, e.mu0, e.mu1), 0.05);
}

// ---------------------------------------------------------------- monotonicity

TEST(AltMinProperties, GamMonotone) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rand(3000 + seed);
    const Matrix M = rand.normal_matrix(6, 5);
    const GamResult r = gam_run(rank_one_factorization_oracle(M, 0.05), rand.normal_vector(6), rand.normal_vector(5), 40);
    double previous = r.initial_value;
    for (const GamStep& s : r.steps) {
      EXPECT_LE(s.value_after_x, previous + 1e-10);
      EXPECT_LE(s.value, s.value_after_x + 1e-10);
      previous = s.value;
    }
  }
}

TEST(AltMinProperties, EmLikelihoodMonotone) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rand(4000 + seed);
    const GmmState truth{rand.normal_vector(2) * 2.0, rand.normal_vector(2) * 2.0};
    const Matrix pts = gen_gmm_points(100, truth, rand);
    const EmResult<GmmState> g = gmm_em(pts, {rand.normal_vector(2), rand.normal_vector(2)}, 15);
    for (std::size_t t = 1; t < g.log_likelihood.size(); ++t)
      EXPECT_GE(g.log_likelihood[t], g.log_likelihood[t - 1] - 1e-9) << "seed " << seed;

    const Vector theta = rand.normal_vector(3);
    const MixRegData d = gen_mixreg_data(100, {theta, -theta}, 1.0, rand);
    const EmResult<MixRegState> m = mixreg_em(d.X, d.y, {rand.normal_vector(3), rand.normal_vector(3)}, 15);
    for (std::size_t t = 1; t < m.log_likelihood.size(); ++t)
      EXPECT_GE(m.log_likelihood[t], m.log_likelihood[t - 1] - 1e-9) << "seed " << seed;
  }
}

TEST(AltMinProperties, AmlvmJointLikelihoodMonotone) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rand(5000 + seed);
    const GmmState truth{rand.normal_vector(2) * 2.0, rand.normal_vector(2) * 2.0};
    const Matrix pts = gen_gmm_points(100, truth, rand);
    const AmlvmResult<GmmState> g = gmm_amlvm(pts, {rand.normal_vector(2), rand.normal_vector(2)}, 15);
    for (std::size_t t = 1; t < g.joint_log_likelihood.size(); ++t)
      EXPECT_GE(g.joint_log_likelihood[t], g.joint_log_likelihood[t - 1] - 1e-9) << "seed " << seed;

    const Vector theta = rand.normal_vector(3);
    const MixRegData d = gen_mixreg_data(100, {theta, -theta}, 1.0, rand);
    const AmlvmResult<MixRegState> m = mixreg_amlvm(d.X, d.y, {rand.normal_vector(3), rand.normal_vector(3)}, 15);
    for (std::size_t t = 1; t < m.joint_log_likelihood.size(); ++t)
      EXPECT_GE(m.joint_log_likelihood[t], m.joint_log_likelihood[t - 1] - 1e-9) << "seed " << seed;
  }
}

}  // namespace
}  // namespace ncopt
