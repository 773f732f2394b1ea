#pragma once

#include <cstdint>
#include <vector>

#include "ncopt/random.hpp"
#include "ncopt/trace.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

/// Measurements are y = X theta*, observed through |y| only. Row k of X is
/// the conjugate of the measurement vector x_k, so y_k = x_k^H theta*.
struct PhaseInstance {
  ComplexMatrix X;
  Vector y_mag;
  ComplexVector theta_star;
  std::uint64_t seed = 0;
};

/// X entries N(0,1) + i N(0,1) (row by row, real part first), then theta*
/// drawn the same way and normalized to unit norm.
PhaseInstance gen_phase_instance(Index n, Index p, RandomSource& rand);

/// min over phi of ||e^{i phi} a - b|| = sqrt(||a||^2 + ||b||^2 - 2 |<a, b>|).
double dist_mod_phase(const ComplexVector& a, const ComplexVector& b);

/// z / |z|, and 1 for z = 0.
Complex unit_phase(Complex z);

/// (1/|S|) sum_{k in S} |y_k|^2 x_k x_k^H.
ComplexMatrix spectral_matrix(const ComplexMatrix& X, const Vector& y_mag, const std::vector<Index>& subset);

/// Unit-norm leading eigenvector of spectral_matrix(X, y_mag, subset).
ComplexVector spectral_init(const ComplexMatrix& X, const Vector& y_mag, const std::vector<Index>& subset,
                            RandomSource& rand);

/// One alternation on the samples S: phi_k = unit_phase(x_k^H theta), then
/// argmin_theta sum_{k in S} ||y_k| phi_k - x_k^H theta|^2.
ComplexVector gsam_update(const ComplexMatrix& X, const Vector& y_mag, const std::vector<Index>& S,
                          const ComplexVector& theta);

/// T = ceil(ln(1 / eps)), at least 1.
int gsam_iterations(double eps);

struct GsamResult {
  ComplexVector theta;
  double initial_distance = 0.0;  // dist_mod_phase(theta^0, theta*)
  int iterations = 0;
  /// objective = sum_{k in S_t} (|x_k^H theta^t| - |y_k|)^2,
  /// error = dist_mod_phase(theta^t, theta*).
  ConvergenceTrace trace;
};

/// Gerchberg-Saxton alternating minimization with T = gsam_iterations(eps)
/// fresh sample blocks. Samples are shuffled with `rand` and cut into T+1
/// equal contiguous blocks (the remainder joins the last block); block 0
/// feeds the spectral initialization.
GsamResult gsam_run(const PhaseInstance& inst, double eps, RandomSource& rand);

/// f(theta) = sum_k (|y_k|^2 - |x_k^H theta|^2)^2.
double wf_objective(const ComplexMatrix& X, const Vector& y_mag, const ComplexVector& theta);
/// sum_k (|x_k^H theta|^2 - |y_k|^2) x_k x_k^H theta, the Wirtinger derivative
/// df/d(conj theta) up to the factor 2; the real gradient over
/// (Re theta, Im theta) is 4 times this vector.
ComplexVector wf_direction(const ComplexMatrix& X, const Vector& y_mag, const ComplexVector& theta);

/// eta = 0.1 / (n mean |y_k|^2).
double wf_default_step(const Vector& y_mag);

struct WfResult {
  ComplexVector theta;
  double initial_distance = 0.0;
  int iterations = 0;
  int step_halvings = 0;  // steps that raised f and were retried with eta / 2
  double final_eta = 0.0;
  ConvergenceTrace trace;  // objective = f, error = dist_mod_phase to theta*
};

/// Wirtinger flow theta^t = theta^{t-1} - 2 eta wf_direction(theta^{t-1}),
/// from the spectral initialization on all samples rescaled to norm
/// sqrt(mean |y|^2 / 2). A step that increases f is retried with eta
/// halved (at most 60 times per iteration).
WfResult wf_run(const PhaseInstance& inst, double eta, int T, RandomSource& rand);

}  // namespace ncopt
