#include "ncopt/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"
#include "ncopt/projections.hpp"

namespace ncopt {

// ---------------------------------------------------------------- AffineMap

AffineMap::AffineMap(Index rows, Index cols, Matrix stacked) : rows_(rows), cols_(cols), stacked_(std::move(stacked)) {
  require(rows >= 1 && cols >= 1, "AffineMap: shape must be positive");
  require(stacked_.rows() >= 1, "AffineMap: at least one measurement is required");
  require(stacked_.cols() == rows * cols, "AffineMap: stacked measurements must have m*n columns");
  require(stacked_.allFinite(), "AffineMap: measurements must be finite");
}

AffineMap AffineMap::from_matrices(const std::vector<Matrix>& measurements) {
  require(!measurements.empty(), "AffineMap: at least one measurement is required");
  const Index m = measurements.front().rows(), n = measurements.front().cols();
  Matrix stacked(static_cast<Index>(measurements.size()), m * n);
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    require(measurements[i].rows() == m && measurements[i].cols() == n, "AffineMap: measurement shapes differ");
    stacked.row(static_cast<Index>(i)) = measurements[i].reshaped().transpose();
  }
  return AffineMap(m, n, std::move(stacked));
}

AffineMap AffineMap::identity(Index rows, Index cols) {
  return AffineMap(rows, cols, Matrix::Identity(rows * cols, rows * cols));
}

Matrix AffineMap::measurement(Index i) const {
  require(i >= 0 && i < measurements(), "AffineMap: measurement index out of range");
  return stacked_.row(i).transpose().reshaped(rows_, cols_);
}

Vector AffineMap::apply(const Matrix& X) const {
  require(X.rows() == rows_ && X.cols() == cols_, "AffineMap::apply: shape mismatch");
  return stacked_ * X.reshaped();
}

Matrix AffineMap::adjoint(const Vector& v) const {
  require(v.size() == measurements(), "AffineMap::adjoint: length mismatch");
  return (stacked_.transpose() * v).reshaped(rows_, cols_);
}

double adjoint_mismatch(const AffineMap& map, RandomSource& rand, int probes) {
  require(probes >= 1, "adjoint_mismatch: probes must be >= 1");
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    const Matrix X = rand.normal_matrix(map.rows(), map.cols());
    const Vector v = rand.normal_vector(map.measurements());
    const Vector ax = map.apply(X);
    const Matrix av = map.adjoint(v);
    const double scale = ax.norm() * v.norm() + X.norm() * av.norm();
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(ax.dot(v) - X.reshaped().dot(av.reshaped())) / scale);
  }
  return worst;
}

ArmInstance gen_arm_instance(Index m, Index n, Index r, Index k, RandomSource& rand) {
  require(m >= 1 && n >= 1, "gen_arm_instance: m and n must be positive");
  require(r >= 0 && r <= std::min(m, n), "gen_arm_instance: r must lie in [0, min(m, n)]");
  require(k >= 1, "gen_arm_instance: k must be >= 1");
  ArmInstance inst;
  inst.seed = rand.seed();
  inst.rank = r;
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix stacked(k, m * n);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m * n; ++j) stacked(i, j) = scale * rand.normal();
  inst.map = AffineMap(m, n, std::move(stacked));
  const Matrix U = rand.normal_matrix(m, r);
  const Matrix V = rand.normal_matrix(n, r);
  inst.X_star = U * V.transpose();
  inst.y = inst.map.apply(inst.X_star);
  return inst;
}

namespace {

double gain(const AffineMap& map, const Matrix& X) {
  const double denom = X.squaredNorm();
  return denom > 0.0 ? map.apply(X).squaredNorm() / denom : 1.0;
}

Matrix random_rank(Index m, Index n, Index r, RandomSource& rand) {
  return rand.normal_matrix(m, r) * rand.normal_matrix(n, r).transpose();
}

}  // namespace

MatrixIsometryEstimate estimate_matrix_isometry(const AffineMap& map, Index order, RandomSource& rand, int probes,
                                                int refine_steps) {
  const Index m = map.rows(), n = map.cols();
  require(order >= 1, "estimate_matrix_isometry: order must be >= 1");
  require(probes >= 1 && refine_steps >= 0, "estimate_matrix_isometry: probes >= 1 and refine_steps >= 0");
  MatrixIsometryEstimate est;
  est.order = order;
  if (order >= std::min(m, n)) {
    const Matrix gram = map.stacked().transpose() * map.stacked();
    const Vector values = symmetric_eigen(gram).values;
    est.exact = true;
    est.upper = values(0);
    est.lower = std::max(values(values.size() - 1), 0.0);
    return est;
  }
  est.lower = std::numeric_limits<double>::infinity();
  est.upper = 0.0;
  for (int t = 0; t < probes; ++t) {
    const Matrix start = random_rank(m, n, order, rand);
    const double g0 = gain(map, start);
    est.upper = std::max(est.upper, g0);
    est.lower = std::min(est.lower, g0);
    Matrix X = start;
    for (int s = 0; s < refine_steps; ++s) {
      X = project_low_rank(map.adjoint(map.apply(X)), order);
      if (X.norm() == 0.0) break;
      X /= X.norm();
      est.upper = std::max(est.upper, gain(map, X));
    }
    X = start / start.norm();
    for (int s = 0; s < refine_steps; ++s) {
      X = project_low_rank(est.upper * X - map.adjoint(map.apply(X)), order);
      if (X.norm() == 0.0) break;
      X /= X.norm();
      est.lower = std::min(est.lower, gain(map, X));
    }
  }
  return est;
}

double svp_default_step(const AffineMap& map, Index r, RandomSource& rand) {
  return 1.0 / (1.0 + estimate_matrix_isometry(map, 2 * r, rand).delta());
}

// ---------------------------------------------------------------- SVP

SvpResult svp_run(const AffineMap& map, const Vector& y, Index q, double eta, int T, const SvpOptions& options) {
  const Index m = map.rows(), n = map.cols();
  require(y.size() == map.measurements(), "svp_run: y length must equal the number of measurements");
  require(q >= 1 && q <= std::min(m, n), "svp_run: q must lie in [1, min(m, n)]");
  require(eta > 0.0, "svp_run: eta must be positive");
  require(T >= 1, "svp_run: T must be >= 1");
  if (options.reference)
    require(options.reference->rows() == m && options.reference->cols() == n, "svp_run: reference shape mismatch");
  const double ref_norm = options.reference ? options.reference->norm() : 0.0;
  const double y_norm = y.norm();

  SvpResult out;
  out.X = Matrix::Zero(m, n);
  out.trace.reserve(static_cast<std::size_t>(T));
  Vector residual = -y;
  for (int t = 1; t <= T; ++t) {
    const Matrix Y = out.X - eta * map.adjoint(residual);
    if (!Y.allFinite()) throw Diverged("svp_run: non-finite iterate at iteration " + std::to_string(t), out.X, out.trace);
    out.X = project_low_rank(Y, q);
    residual = map.apply(out.X) - y;
    const double objective = 0.5 * residual.squaredNorm();
    if (!std::isfinite(objective) || objective > kDivergenceThreshold)
      throw Diverged("svp_run: diverged at iteration " + std::to_string(t), out.X, out.trace);
    std::optional<double> err;
    if (options.reference) {
      const double d = (out.X - *options.reference).norm();
      err = ref_norm > 0.0 ? d / ref_norm : d;
    }
    out.trace.record(objective, err);
    out.iterations = t;
    if (options.on_iterate) options.on_iterate(t, out.X);
    if (residual.norm() <= options.residual_tol * y_norm) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- incoherence

IncoherenceReport incoherence_of(const Matrix& A, Index r) {
  require(r >= 1 && r <= std::min(A.rows(), A.cols()), "incoherence_of: r must lie in [1, min(m, n)]");
  const SvdResult svd = truncated_svd(A, r);
  IncoherenceReport rep;
  rep.rank = r;
  rep.max_row_u = svd.U.rowwise().norm().maxCoeff();
  rep.max_row_v = svd.V.rowwise().norm().maxCoeff();
  const double m = static_cast<double>(A.rows()), n = static_cast<double>(A.cols());
  rep.mu = std::max(rep.max_row_u * std::sqrt(m), rep.max_row_v * std::sqrt(n)) / std::sqrt(static_cast<double>(r));
  return rep;
}

double factor_incoherence(const Matrix& F) {
  require(F.rows() >= 1 && F.cols() >= 1, "factor_incoherence: empty factor");
  if (F.norm() == 0.0) return 0.0;
  const Matrix Q = truncated_svd(F, F.cols()).U;
  return Q.rowwise().norm().maxCoeff() * std::sqrt(static_cast<double>(F.rows()) / static_cast<double>(F.cols()));
}

// ---------------------------------------------------------------- completion

CompletionInstance gen_completion_instance(Index m, Index n, Index r, double p_sample, double mu_cap,
                                           RandomSource& rand) {
  require(m >= 1 && n >= 1, "gen_completion_instance: m and n must be positive");
  require(r >= 1 && r <= std::min(m, n), "gen_completion_instance: r must lie in [1, min(m, n)]");
  require(p_sample > 0.0 && p_sample <= 1.0, "gen_completion_instance: p_sample must lie in (0, 1]");
  CompletionInstance inst;
  inst.seed = rand.seed();
  inst.rank = r;
  inst.p_sample = p_sample;
  inst.mu_cap = mu_cap;
  constexpr int kAttempts = 50;
  bool accepted = false;
  for (int attempt = 0; attempt < kAttempts && !accepted; ++attempt) {
    inst.U_star = rand.normal_matrix(m, r);
    inst.V_star = rand.normal_matrix(n, r);
    inst.A_star = inst.U_star * inst.V_star.transpose();
    accepted = incoherence_of(inst.A_star, r).mu <= mu_cap;
  }
  if (!accepted)
    throw GenerationError("gen_completion_instance: incoherence cap " + std::to_string(mu_cap) + " not met in " +
                          std::to_string(kAttempts) + " attempts");
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      if (p_sample >= 1.0 || rand.bernoulli(p_sample)) inst.omega.push_back({i, j});
  return inst;
}

Matrix scaled_observation(const CompletionInstance& inst) {
  Matrix M = Matrix::Zero(inst.A_star.rows(), inst.A_star.cols());
  for (const Entry& e : inst.omega) M(e.row, e.col) = inst.A_star(e.row, e.col) / inst.p_sample;
  return M;
}

namespace {

// Solves, for every row of the result, a least-squares problem whose design
// rows come from `basis`. `transpose` selects which entry coordinate picks
// the basis row.
Matrix solve_rows(const Matrix& basis, const Matrix& A, const std::vector<Entry>& entries, const Matrix& previous,
                  bool solve_for_columns, AmmcDiagnostics* diagnostics) {
  const Index r = basis.cols();
  const Index count = solve_for_columns ? A.cols() : A.rows();
  require(previous.rows() == count && previous.cols() == r, "ammc: previous factor has the wrong shape");
  std::vector<std::vector<Index>> design_rows(static_cast<std::size_t>(count));
  std::vector<std::vector<double>> targets(static_cast<std::size_t>(count));
  for (const Entry& e : entries) {
    const Index owner = solve_for_columns ? e.col : e.row;
    const Index source = solve_for_columns ? e.row : e.col;
    design_rows[static_cast<std::size_t>(owner)].push_back(source);
    targets[static_cast<std::size_t>(owner)].push_back(A(e.row, e.col));
  }
  Matrix out = previous;
  for (Index j = 0; j < count; ++j) {
    const auto& idx = design_rows[static_cast<std::size_t>(j)];
    if (idx.empty()) {
      if (diagnostics) ++diagnostics->empty_rows;
      continue;
    }
    const Matrix design = basis(idx, Eigen::all);
    const Vector b = Eigen::Map<const Vector>(targets[static_cast<std::size_t>(j)].data(), static_cast<Index>(idx.size()));
    const LeastSquaresResult<Vector> ls = solve_least_squares(design, b);
    if (ls.stabilized && diagnostics) ++diagnostics->ridge_fallbacks;
    out.row(j) = ls.solution.transpose();
  }
  return out;
}

}  // namespace

Matrix ammc_solve_right(const Matrix& U, const Matrix& A, const std::vector<Entry>& entries, const Matrix& previous,
                        AmmcDiagnostics* diagnostics) {
  require(U.rows() == A.rows(), "ammc_solve_right: U and A disagree on m");
  return solve_rows(U, A, entries, previous, true, diagnostics);
}

Matrix ammc_solve_left(const Matrix& V, const Matrix& A, const std::vector<Entry>& entries, const Matrix& previous,
                       AmmcDiagnostics* diagnostics) {
  require(V.rows() == A.cols(), "ammc_solve_left: V and A disagree on n");
  return solve_rows(V, A, entries, previous, false, diagnostics);
}

AmmcResult ammc_run(const CompletionInstance& inst, Index r, int T, RandomSource& rand, const AmmcOptions& options) {
  const Matrix& A = inst.A_star;
  const Index m = A.rows(), n = A.cols();
  require(r >= 1 && r <= std::min(m, n), "ammc_run: r must lie in [1, min(m, n)]");
  require(T >= 1, "ammc_run: T must be >= 1");
  const auto splits = static_cast<std::size_t>(2 * T + 1);
  const bool partitioned = options.splitting == SampleSplitting::Partitioned;
  if (partitioned) require(inst.omega.size() >= splits, "ammc_run: |Omega| must be at least 2T + 1");
  require(!inst.omega.empty(), "ammc_run: Omega is empty");

  AmmcResult out;
  std::vector<std::vector<Entry>> parts;
  if (partitioned) {
    out.diagnostics.sparse_splits = inst.omega.size() / splits < static_cast<std::size_t>(kAmmcMinSplitSize);
    parts.resize(splits);
    const std::vector<Index> order = rand.permutation(static_cast<Index>(inst.omega.size()));
    for (std::size_t i = 0; i < order.size(); ++i)
      parts[i * splits / order.size()].push_back(inst.omega[static_cast<std::size_t>(order[i])]);
  }
  const auto split = [&](std::size_t s) -> const std::vector<Entry>& { return partitioned ? parts[s] : inst.omega; };

  Matrix init = Matrix::Zero(m, n);
  const double p_split = partitioned ? inst.p_sample / static_cast<double>(splits) : inst.p_sample;
  for (const Entry& e : split(0)) init(e.row, e.col) = A(e.row, e.col) / p_split;
  if (init.norm() == 0.0) {
    out.U = Matrix::Zero(m, r);
  } else {
    out.U = truncated_svd(init, r, rand).U;
  }
  out.V = Matrix::Zero(n, r);

  const double a_norm = A.norm();
  out.trace.reserve(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    out.V = ammc_solve_right(out.U, A, split(static_cast<std::size_t>(t)), out.V, &out.diagnostics);
    out.U = ammc_solve_left(out.V, A, split(static_cast<std::size_t>(T + t)), out.U, &out.diagnostics);
    const Matrix product = out.U * out.V.transpose();
    if (!product.allFinite()) throw Diverged("ammc_run: non-finite factors at iteration " + std::to_string(t), product, out.trace);
    double objective = 0.0;
    for (const Entry& e : inst.omega) {
      const double d = product(e.row, e.col) - A(e.row, e.col);
      objective += d * d;
    }
    const double err = (product - A).norm();
    out.trace.record(0.5 * objective, a_norm > 0.0 ? err / a_norm : err);
    out.iterations = t;
    if (options.on_iterate) options.on_iterate(t, out.U, out.V);
  }
  return out;
}

double aligned_distance(const Vector& u, const Vector& u_star) {
  require(u.size() == u_star.size(), "aligned_distance: length mismatch");
  const double a = u.norm(), b = u_star.norm();
  if (a == 0.0 || b == 0.0) return a == b ? 0.0 : 1.0;
  const Vector x = u / a, y = u_star / b;
  return std::min((x - y).norm(), (x + y).norm());
}

}  // namespace ncopt
