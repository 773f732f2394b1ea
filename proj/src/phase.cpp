#include "ncopt/phase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"

namespace ncopt {

PhaseInstance gen_phase_instance(Index n, Index p, RandomSource& rand) {
  require(n >= 1 && p >= 1, "gen_phase_instance: n and p must be positive");
  PhaseInstance inst;
  inst.seed = rand.seed();
  inst.X = rand.complex_normal_matrix(n, p);
  inst.theta_star = rand.complex_normal_vector(p);
  inst.theta_star /= inst.theta_star.norm();
  inst.y_mag = (inst.X * inst.theta_star).cwiseAbs();
  return inst;
}

double dist_mod_phase(const ComplexVector& a, const ComplexVector& b) {
  require(a.size() == b.size(), "dist_mod_phase: length mismatch");
  // Same value as sqrt(||a||^2 + ||b||^2 - 2 |<a, b>|) without the cancellation.
  return (unit_phase(a.dot(b)) * a - b).norm();
}

Complex unit_phase(Complex z) {
  const double r = std::abs(z);
  return r > 0.0 ? z / r : Complex(1.0, 0.0);
}

ComplexMatrix spectral_matrix(const ComplexMatrix& X, const Vector& y_mag, const std::vector<Index>& subset) {
  require(!subset.empty(), "spectral_matrix: subset must be nonempty");
  require(y_mag.size() == X.rows(), "spectral_matrix: X and y_mag disagree on n");
  const ComplexMatrix rows = X(subset, Eigen::all);
  const Vector w = y_mag(subset).array().square();
  ComplexMatrix M = rows.adjoint() * w.asDiagonal() * rows;
  M /= static_cast<double>(subset.size());
  return (M + M.adjoint()) * 0.5;  // exact Hermitian symmetry
}

ComplexVector spectral_init(const ComplexMatrix& X, const Vector& y_mag, const std::vector<Index>& subset,
                            RandomSource& rand) {
  ComplexVector v = leading_eigenvector(spectral_matrix(X, y_mag, subset), rand).vector;
  return v / v.norm();
}

int gsam_iterations(double eps) {
  require(eps > 0.0 && eps < 1.0, "gsam_iterations: eps must lie in (0, 1)");
  return std::max(1, static_cast<int>(std::ceil(std::log(1.0 / eps))));
}

ComplexVector gsam_update(const ComplexMatrix& X, const Vector& y_mag, const std::vector<Index>& S,
                          const ComplexVector& theta) {
  require(!S.empty(), "gsam_update: sample set must be nonempty");
  const ComplexMatrix A = X(S, Eigen::all);
  const ComplexVector current = A * theta;
  ComplexVector target(static_cast<Index>(S.size()));
  for (Index k = 0; k < target.size(); ++k) target(k) = y_mag(S[static_cast<std::size_t>(k)]) * unit_phase(current(k));
  return solve_least_squares(A, target).solution;
}

GsamResult gsam_run(const PhaseInstance& inst, double eps, RandomSource& rand) {
  const Index n = inst.X.rows(), p = inst.X.cols();
  require(inst.y_mag.size() == n, "gsam_run: X and y_mag disagree on n");
  const int T = gsam_iterations(eps);
  require(n >= static_cast<Index>(T + 1) * p,
          "gsam_run: need n >= (T+1) p samples, T = " + std::to_string(T) + ", got n = " + std::to_string(n));

  const std::vector<Index> order = rand.permutation(n);
  const Index block = n / (T + 1);
  std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(T + 1));
  for (Index i = 0; i < n; ++i) blocks[static_cast<std::size_t>(std::min<Index>(i / block, T))].push_back(order[static_cast<std::size_t>(i)]);

  GsamResult out;
  out.theta = spectral_init(inst.X, inst.y_mag, blocks[0], rand);
  out.initial_distance = dist_mod_phase(out.theta, inst.theta_star);
  out.trace.reserve(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    const std::vector<Index>& S = blocks[static_cast<std::size_t>(t)];
    out.theta = gsam_update(inst.X, inst.y_mag, S, out.theta);
    if (!out.theta.allFinite())
      throw Diverged("gsam_run: non-finite iterate at iteration " + std::to_string(t), Matrix(), out.trace);
    const Vector fit = (inst.X(S, Eigen::all) * out.theta).cwiseAbs() - inst.y_mag(S);
    out.trace.record(fit.squaredNorm(), dist_mod_phase(out.theta, inst.theta_star));
    out.iterations = t;
  }
  return out;
}

double wf_objective(const ComplexMatrix& X, const Vector& y_mag, const ComplexVector& theta) {
  const Vector gap = (X * theta).cwiseAbs2() - y_mag.cwiseAbs2();
  return gap.squaredNorm();
}

ComplexVector wf_direction(const ComplexMatrix& X, const Vector& y_mag, const ComplexVector& theta) {
  const ComplexVector a = X * theta;
  const Vector w = a.cwiseAbs2() - y_mag.cwiseAbs2();
  return X.adjoint() * (w.cast<Complex>().asDiagonal() * a);
}

double wf_default_step(const Vector& y_mag) {
  const double total = y_mag.squaredNorm();
  require(total > 0.0, "wf_default_step: all magnitudes are zero");
  return 0.1 / total;
}

WfResult wf_run(const PhaseInstance& inst, double eta, int T, RandomSource& rand) {
  const Index n = inst.X.rows();
  require(inst.y_mag.size() == n, "wf_run: X and y_mag disagree on n");
  require(eta > 0.0, "wf_run: eta must be positive");
  require(T >= 1, "wf_run: T must be >= 1");
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) all[static_cast<std::size_t>(k)] = k;

  WfResult out;
  out.theta = spectral_init(inst.X, inst.y_mag, all, rand) *
              std::sqrt(inst.y_mag.squaredNorm() / (2.0 * static_cast<double>(n)));
  out.initial_distance = dist_mod_phase(out.theta, inst.theta_star);
  out.trace.reserve(static_cast<std::size_t>(T));
  double value = wf_objective(inst.X, inst.y_mag, out.theta);
  constexpr int kMaxHalvings = 60;
  for (int t = 1; t <= T; ++t) {
    const ComplexVector d = wf_direction(inst.X, inst.y_mag, out.theta);
    if (!d.allFinite()) throw Diverged("wf_run: non-finite gradient at iteration " + std::to_string(t), Matrix(), out.trace);
    ComplexVector next = out.theta - (2.0 * eta) * d;
    double next_value = wf_objective(inst.X, inst.y_mag, next);
    for (int h = 0; h < kMaxHalvings && !(next_value <= value); ++h) {
      eta *= 0.5;
      ++out.step_halvings;
      next = out.theta - (2.0 * eta) * d;
      next_value = wf_objective(inst.X, inst.y_mag, next);
    }
    if (!std::isfinite(next_value) || next_value > kDivergenceThreshold)
      throw Diverged("wf_run: diverged at iteration " + std::to_string(t), Matrix(), out.trace);
    if (next_value <= value) {
      out.theta = std::move(next);
      value = next_value;
    }
    out.trace.record(value, dist_mod_phase(out.theta, inst.theta_star));
    out.iterations = t;
  }
  out.final_eta = eta;
  return out;
}

}  // namespace ncopt
