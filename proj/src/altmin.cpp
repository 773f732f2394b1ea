#include "ncopt/altmin.hpp"

#include <cmath>
#include <numbers>

#include "ncopt/linalg.hpp"

namespace ncopt {

GamResult gam_run(const BivariateOracle& f, const Vector& x0, const Vector& y0, int T) {
  require(T >= 1, "gam_run: T must be >= 1");
  GamResult out;
  out.x = x0;
  out.y = y0;
  out.initial_value = f.value(x0, y0);
  out.steps.reserve(static_cast<std::size_t>(T));
  const auto last = [&] {
    Matrix m(x0.size() + y0.size(), 1);
    m << out.x, out.y;
    return m;
  };
  for (int t = 1; t <= T; ++t) {
    GamStep step;
    step.x = f.argmin_x_given_y(out.y);
    if (!step.x.allFinite())
      throw Diverged("gam_run: non-finite x at iteration " + std::to_string(t), last(), out.trace);
    step.value_after_x = f.value(step.x, out.y);
    step.y = f.argmin_y_given_x(step.x);
    if (!step.y.allFinite())
      throw Diverged("gam_run: non-finite y at iteration " + std::to_string(t), last(), out.trace);
    step.value = f.value(step.x, step.y);
    out.x = step.x;
    out.y = step.y;
    out.trace.record(step.value);
    out.steps.push_back(std::move(step));
  }
  return out;
}

BivariateOracle rank_one_factorization_oracle(const Matrix& M, double lambda) {
  require(lambda >= 0.0, "rank_one_factorization_oracle: lambda must be nonnegative");
  BivariateOracle f;
  f.value = [M, lambda](const Vector& u, const Vector& v) {
    return (M - u * v.transpose()).squaredNorm() + lambda * (u.squaredNorm() + v.squaredNorm());
  };
  f.argmin_x_given_y = [M, lambda](const Vector& v) -> Vector { return M * v / (v.squaredNorm() + lambda); };
  f.argmin_y_given_x = [M, lambda](const Vector& u) -> Vector {
    return M.transpose() * u / (u.squaredNorm() + lambda);
  };
  return f;
}

BistableCheck check_bistable(const ObjectiveOracle& f, const Vector& point, double tol) {
  BistableCheck check;
  check.gradient_norm = f.gradient(point).norm();
  check.bistable = check.gradient_norm <= tol;
  return check;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kLogHalf = -std::numbers::ln2;

LatentWeights normalize(double l0, double l1) {
  const double m = std::max(l0, l1);
  const double e0 = std::exp(l0 - m);
  const double e1 = std::exp(l1 - m);
  const double total = e0 + e1;
  return {e0 / total, e1 / total};
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_gauss(double squared_distance, Index dim) {
  return -0.5 * squared_distance - 0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

LatentWeights gmm_posterior_weights(const GmmState& state, const Vector& y) {
  return normalize(-0.5 * (y - state.mu0).squaredNorm(), -0.5 * (y - state.mu1).squaredNorm());
}

std::vector<LatentWeights> gmm_posterior_weights(const GmmState& state, const Matrix& points) {
  std::vector<LatentWeights> w(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i)
    w[static_cast<std::size_t>(i)] = gmm_posterior_weights(state, Vector(points.row(i).transpose()));
  return w;
}

GmmState gmm_update_means(const Matrix& points, const std::vector<LatentWeights>& weights) {
  require(points.rows() >= 1, "gmm_update_means: no points");
  require(static_cast<Index>(weights.size()) == points.rows(), "gmm_update_means: one weight pair per point");
  Vector s0 = Vector::Zero(points.cols()), s1 = Vector::Zero(points.cols());
  double m0 = 0.0, m1 = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    const LatentWeights& w = weights[static_cast<std::size_t>(i)];
    s0 += w.w0 * points.row(i).transpose();
    s1 += w.w1 * points.row(i).transpose();
    m0 += w.w0;
    m1 += w.w1;
  }
  if (!(m0 > 0.0)) throw DegenerateComponent("gmm_update_means: component 0 has zero total weight");
  if (!(m1 > 0.0)) throw DegenerateComponent("gmm_update_means: component 1 has zero total weight");
  return {s0 / m0, s1 / m1};
}

double gmm_log_likelihood(const GmmState& state, const Matrix& points) {
  const Index p = points.cols();
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    const Vector y = points.row(i).transpose();
    total += kLogHalf + log_sum_exp(log_gauss((y - state.mu0).squaredNorm(), p),
                                    log_gauss((y - state.mu1).squaredNorm(), p));
  }
  return total;
}

LatentWeights mixreg_posterior_weights(const MixRegState& state, const Vector& x, double y) {
  const double r0 = y - x.dot(state.theta0);
  const double r1 = y - x.dot(state.theta1);
  return normalize(-0.5 * r0 * r0, -0.5 * r1 * r1);
}

std::vector<LatentWeights> mixreg_posterior_weights(const MixRegState& state, const Matrix& X, const Vector& y) {
  require(X.rows() == y.size(), "mixreg_posterior_weights: dimension mismatch");
  std::vector<LatentWeights> w(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i)
    w[static_cast<std::size_t>(i)] = mixreg_posterior_weights(state, Vector(X.row(i).transpose()), y(i));
  return w;
}

MixRegUpdate mixreg_update_models(const Matrix& X, const Vector& y, const std::vector<LatentWeights>& weights) {
  require(X.rows() == y.size() && static_cast<Index>(weights.size()) == X.rows(),
          "mixreg_update_models: dimension mismatch");
  MixRegUpdate out;
  for (int z = 0; z < 2; ++z) {
    Vector root(X.rows());
    for (Index i = 0; i < X.rows(); ++i) {
      const LatentWeights& w = weights[static_cast<std::size_t>(i)];
      root(i) = std::sqrt(z == 0 ? w.w0 : w.w1);
    }
    const Matrix Xw = root.asDiagonal() * X;
    const Vector yw = root.cwiseProduct(y);
    const LeastSquaresResult<Vector> ls = solve_least_squares(Xw, yw);
    (z == 0 ? out.state.theta0 : out.state.theta1) = ls.solution;
    out.stabilized[static_cast<std::size_t>(z)] = ls.stabilized;
  }
  return out;
}

double mixreg_log_likelihood(const MixRegState& state, const Matrix& X, const Vector& y) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const double r0 = y(i) - X.row(i).dot(state.theta0);
    const double r1 = y(i) - X.row(i).dot(state.theta1);
    total += kLogHalf + log_sum_exp(log_gauss(r0 * r0, 1), log_gauss(r1 * r1, 1));
  }
  return total;
}

double swap_invariant_distance(const Vector& a0, const Vector& a1, const Vector& b0, const Vector& b1) {
  const double straight = std::max((a0 - b0).norm(), (a1 - b1).norm());
  const double swapped = std::max((a0 - b1).norm(), (a1 - b0).norm());
  return std::min(straight, swapped);
}

// ---------------------------------------------------------------------------

EmResult<GmmState> gmm_em(const Matrix& points, const GmmState& init, int T) {
  return em_run<GmmState>([&](const GmmState& s) { return gmm_posterior_weights(s, points); },
                          [&](const std::vector<LatentWeights>& w) { return gmm_update_means(points, w); },
                          [&](const GmmState& s) { return gmm_log_likelihood(s, points); }, init, T);
}

EmResult<MixRegState> mixreg_em(const Matrix& X, const Vector& y, const MixRegState& init, int T) {
  return em_run<MixRegState>(
      [&](const MixRegState& s) { return mixreg_posterior_weights(s, X, y); },
      [&](const std::vector<LatentWeights>& w) { return mixreg_update_models(X, y, w).state; },
      [&](const MixRegState& s) { return mixreg_log_likelihood(s, X, y); }, init, T);
}

EmResult<GmmState> gmm_stochastic_em(const Matrix& points, const GmmState& init, int T, RandomSource& rand,
                                     const std::function<double(int)>& step) {
  require(T >= 1, "gmm_stochastic_em: T must be >= 1");
  require(points.rows() >= 1, "gmm_stochastic_em: no points");
  EmResult<GmmState> out;
  out.states.push_back(init);
  out.log_likelihood.push_back(gmm_log_likelihood(init, points));
  GmmState s = init;
  for (int t = 1; t <= T; ++t) {
    const double a = step ? step(t) : 1.0 / static_cast<double>(t);
    const Vector y = points.row(static_cast<Index>(rand.uniform_index(static_cast<std::uint64_t>(points.rows())))).transpose();
    const LatentWeights w = gmm_posterior_weights(s, y);
    s.mu0 += a * w.w0 * (y - s.mu0);
    s.mu1 += a * w.w1 * (y - s.mu1);
    const double ll = gmm_log_likelihood(s, points);
    out.states.push_back(s);
    out.log_likelihood.push_back(ll);
    out.trace.record(-ll);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<int> gmm_hard_assign(const GmmState& state, const Matrix& points) {
  std::vector<int> z(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    const Vector y = points.row(i).transpose();
    z[static_cast<std::size_t>(i)] = (y - state.mu0).squaredNorm() > (y - state.mu1).squaredNorm() ? 1 : 0;
  }
  return z;
}

std::vector<int> mixreg_hard_assign(const MixRegState& state, const Matrix& X, const Vector& y) {
  std::vector<int> z(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) {
    const double r0 = y(i) - X.row(i).dot(state.theta0);
    const double r1 = y(i) - X.row(i).dot(state.theta1);
    z[static_cast<std::size_t>(i)] = r0 * r0 > r1 * r1 ? 1 : 0;
  }
  return z;
}

GmmState gmm_hard_means(const Matrix& points, const std::vector<int>& assignment, const GmmState& previous,
                        bool& empty) {
  require(static_cast<Index>(assignment.size()) == points.rows(), "gmm_hard_means: one label per point");
  std::array<Vector, 2> sums = {Vector::Zero(points.cols()), Vector::Zero(points.cols())};
  std::array<int, 2> counts = {0, 0};
  for (Index i = 0; i < points.rows(); ++i) {
    const int z = assignment[static_cast<std::size_t>(i)];
    sums[static_cast<std::size_t>(z)] += points.row(i).transpose();
    ++counts[static_cast<std::size_t>(z)];
  }
  GmmState out = previous;
  empty = false;
  if (counts[0] > 0) out.mu0 = sums[0] / counts[0]; else empty = true;
  if (counts[1] > 0) out.mu1 = sums[1] / counts[1]; else empty = true;
  return out;
}

MixRegState mixreg_hard_models(const Matrix& X, const Vector& y, const std::vector<int>& assignment,
                               const MixRegState& previous, bool& empty) {
  require(static_cast<Index>(assignment.size()) == X.rows(), "mixreg_hard_models: one label per point");
  MixRegState out = previous;
  empty = false;
  for (int z = 0; z < 2; ++z) {
    std::vector<Index> rows;
    for (Index i = 0; i < X.rows(); ++i)
      if (assignment[static_cast<std::size_t>(i)] == z) rows.push_back(i);
    if (rows.empty()) {
      empty = true;
      continue;
    }
    const Matrix Xs = X(rows, Eigen::all);
    const Vector ys = y(rows);
    (z == 0 ? out.theta0 : out.theta1) = solve_least_squares(Xs, ys).solution;
  }
  return out;
}

double gmm_joint_log_likelihood(const GmmState& state, const Matrix& points, const std::vector<int>& assignment) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    const Vector& mu = assignment[static_cast<std::size_t>(i)] == 0 ? state.mu0 : state.mu1;
    total += kLogHalf + log_gauss((points.row(i).transpose() - mu).squaredNorm(), points.cols());
  }
  return total;
}

double mixreg_joint_log_likelihood(const MixRegState& state, const Matrix& X, const Vector& y,
                                   const std::vector<int>& assignment) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const Vector& theta = assignment[static_cast<std::size_t>(i)] == 0 ? state.theta0 : state.theta1;
    const double r = y(i) - X.row(i).dot(theta);
    total += kLogHalf + log_gauss(r * r, 1);
  }
  return total;
}

AmlvmResult<GmmState> gmm_amlvm(const Matrix& points, const GmmState& init, int T) {
  return amlvm_run<GmmState>(
      [&](const GmmState& s) { return gmm_hard_assign(s, points); },
      [&](const std::vector<int>& z, const GmmState& prev, bool& empty) {
        return gmm_hard_means(points, z, prev, empty);
      },
      [&](const GmmState& s, const std::vector<int>& z) { return gmm_joint_log_likelihood(s, points, z); }, init, T);
}

AmlvmResult<MixRegState> mixreg_amlvm(const Matrix& X, const Vector& y, const MixRegState& init, int T) {
  return amlvm_run<MixRegState>(
      [&](const MixRegState& s) { return mixreg_hard_assign(s, X, y); },
      [&](const std::vector<int>& z, const MixRegState& prev, bool& empty) {
        return mixreg_hard_models(X, y, z, prev, empty);
      },
      [&](const MixRegState& s, const std::vector<int>& z) { return mixreg_joint_log_likelihood(s, X, y, z); },
      init, T);
}

// ---------------------------------------------------------------------------

Matrix gen_gmm_points(Index n, const GmmState& truth, RandomSource& rand, std::vector<int>* labels) {
  require(n >= 1 && truth.mu0.size() == truth.mu1.size(), "gen_gmm_points: invalid sizes");
  const Index p = truth.mu0.size();
  Matrix points(n, p);
  if (labels) labels->assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    const bool second = rand.bernoulli(0.5);
    if (labels) (*labels)[static_cast<std::size_t>(i)] = second ? 1 : 0;
    points.row(i) = ((second ? truth.mu1 : truth.mu0) + rand.normal_vector(p)).transpose();
  }
  return points;
}

MixRegData gen_mixreg_data(Index n, const MixRegState& truth, double sigma, RandomSource& rand) {
  require(n >= 1 && truth.theta0.size() == truth.theta1.size(), "gen_mixreg_data: invalid sizes");
  require(sigma >= 0.0, "gen_mixreg_data: sigma must be nonnegative");
  const Index p = truth.theta0.size();
  MixRegData d;
  d.X = rand.normal_matrix(n, p);
  d.y.resize(n);
  d.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const bool second = rand.bernoulli(0.5);
    d.labels[static_cast<std::size_t>(i)] = second ? 1 : 0;
    d.y(i) = d.X.row(i).dot(second ? truth.theta1 : truth.theta0) + sigma * rand.normal();
  }
  return d;
}

}  // namespace ncopt
