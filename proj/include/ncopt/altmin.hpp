#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ncopt/descent.hpp"
#include "ncopt/errors.hpp"
#include "ncopt/random.hpp"
#include "ncopt/trace.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

// ---------------------------------------------------------------- gAM

/// f(x, y) together with its two marginal minimizers.
struct BivariateOracle {
  std::function<double(const Vector&, const Vector&)> value;
  std::function<Vector(const Vector&)> argmin_x_given_y;
  std::function<Vector(const Vector&)> argmin_y_given_x;
};

/// One round of alternation: x is updated first, then y.
struct GamStep {
  Vector x;
  Vector y;
  double value_after_x = 0.0;  // f(x^{t+1}, y^t)
  double value = 0.0;          // f(x^{t+1}, y^{t+1})
};

struct GamResult {
  Vector x;
  Vector y;
  double initial_value = 0.0;
  std::vector<GamStep> steps;
  ConvergenceTrace trace;
};

/// f(u, v) = ||M - u v^T||_F^2 + lambda (||u||^2 + ||v||^2), biconvex with
/// closed-form marginal minimizers.
BivariateOracle rank_one_factorization_oracle(const Matrix& M, double lambda);

GamResult gam_run(const BivariateOracle& f, const Vector& x0, const Vector& y0, int T);

struct BistableCheck {
  bool bistable = false;
  double gradient_norm = 0.0;
};

/// Stationarity test at a point of the joint variable (x, y). Under marginal
/// convexity this is the bistability test.
BistableCheck check_bistable(const ObjectiveOracle& f, const Vector& point, double tol);

// ---------------------------------------------------------------- latent models

/// Balanced isotropic two-component Gaussian mixture.
struct GmmState {
  Vector mu0;
  Vector mu1;
};

/// Balanced two-component mixture of linear regressions with unit noise.
struct MixRegState {
  Vector theta0;
  Vector theta1;
};

struct LatentWeights {
  double w0 = 0.5;
  double w1 = 0.5;
};

/// Posterior over the component of y (points are rows of a matrix elsewhere).
LatentWeights gmm_posterior_weights(const GmmState& state, const Vector& y);
std::vector<LatentWeights> gmm_posterior_weights(const GmmState& state, const Matrix& points);

/// Weighted means. Throws DegenerateComponent if a component has zero mass.
GmmState gmm_update_means(const Matrix& points, const std::vector<LatentWeights>& weights);

/// Sample log-likelihood of the mixture (rows of `points` are samples).
double gmm_log_likelihood(const GmmState& state, const Matrix& points);

LatentWeights mixreg_posterior_weights(const MixRegState& state, const Vector& x, double y);
std::vector<LatentWeights> mixreg_posterior_weights(const MixRegState& state, const Matrix& X, const Vector& y);

struct MixRegUpdate {
  MixRegState state;
  std::array<bool, 2> stabilized{false, false};  // weighted Gram was singular
};

/// Weighted least squares per component.
MixRegUpdate mixreg_update_models(const Matrix& X, const Vector& y, const std::vector<LatentWeights>& weights);

double mixreg_log_likelihood(const MixRegState& state, const Matrix& X, const Vector& y);

/// Distance between two component pairs, minimized over the two matchings;
/// each matching is scored by its larger component distance.
double swap_invariant_distance(const Vector& a0, const Vector& a1, const Vector& b0, const Vector& b1);

// ---------------------------------------------------------------- EM

template <typename State>
struct EmResult {
  std::vector<State> states;            // init followed by one state per iteration
  std::vector<double> log_likelihood;   // of each entry of `states`
  ConvergenceTrace trace;               // objective = negative log-likelihood
};

template <typename State>
EmResult<State> em_run(const std::function<std::vector<LatentWeights>(const State&)>& e_step,
                       const std::function<State(const std::vector<LatentWeights>&)>& m_step,
                       const std::function<double(const State&)>& log_likelihood, const State& init, int T) {
  require(T >= 1, "em_run: T must be >= 1");
  EmResult<State> out;
  out.states.push_back(init);
  out.log_likelihood.push_back(log_likelihood(init));
  for (int t = 0; t < T; ++t) {
    State next = m_step(e_step(out.states.back()));
    const double ll = log_likelihood(next);
    out.states.push_back(std::move(next));
    out.log_likelihood.push_back(ll);
    out.trace.record(-ll);
  }
  return out;
}

EmResult<GmmState> gmm_em(const Matrix& points, const GmmState& init, int T);
EmResult<MixRegState> mixreg_em(const Matrix& X, const Vector& y, const MixRegState& init, int T);

/// Stochastic EM for the mixture: each step draws one sample and moves the
/// means along the gradient of its Q-function, mu^z += a_t w_z (y - mu^z).
/// The default schedule is a_t = 1/t.
EmResult<GmmState> gmm_stochastic_em(const Matrix& points, const GmmState& init, int T, RandomSource& rand,
                                     const std::function<double(int)>& step = nullptr);

// ---------------------------------------------------------------- AM-LVM

template <typename State>
struct AmlvmResult {
  std::vector<State> states;
  std::vector<int> assignment;         // final hard assignment
  std::vector<double> joint_log_likelihood;  // L(theta^{t+1}; z^t) per iteration
  bool empty_component = false;        // some M-step kept a previous component
  ConvergenceTrace trace;
};

/// Hard assignment (argmax of the posterior; ties go to component 0).
std::vector<int> gmm_hard_assign(const GmmState& state, const Matrix& points);
std::vector<int> mixreg_hard_assign(const MixRegState& state, const Matrix& X, const Vector& y);

/// Per-cluster means; an empty cluster keeps its previous mean and sets `empty`.
GmmState gmm_hard_means(const Matrix& points, const std::vector<int>& assignment, const GmmState& previous,
                        bool& empty);
MixRegState mixreg_hard_models(const Matrix& X, const Vector& y, const std::vector<int>& assignment,
                               const MixRegState& previous, bool& empty);

double gmm_joint_log_likelihood(const GmmState& state, const Matrix& points, const std::vector<int>& assignment);
double mixreg_joint_log_likelihood(const MixRegState& state, const Matrix& X, const Vector& y,
                                   const std::vector<int>& assignment);

template <typename State>
AmlvmResult<State> amlvm_run(const std::function<std::vector<int>(const State&)>& hard_e_step,
                             const std::function<State(const std::vector<int>&, const State&, bool&)>& m_step,
                             const std::function<double(const State&, const std::vector<int>&)>& joint_ll,
                             const State& init, int T) {
  require(T >= 1, "amlvm_run: T must be >= 1");
  AmlvmResult<State> out;
  out.states.push_back(init);
  for (int t = 0; t < T; ++t) {
    out.assignment = hard_e_step(out.states.back());
    bool empty = false;
    State next = m_step(out.assignment, out.states.back(), empty);
    out.empty_component = out.empty_component || empty;
    const double ll = joint_ll(next, out.assignment);
    out.states.push_back(std::move(next));
    out.joint_log_likelihood.push_back(ll);
    out.trace.record(-ll);
  }
  return out;
}

AmlvmResult<GmmState> gmm_amlvm(const Matrix& points, const GmmState& init, int T);
AmlvmResult<MixRegState> mixreg_amlvm(const Matrix& X, const Vector& y, const MixRegState& init, int T);

// ---------------------------------------------------------------- data

/// n samples, each from N(mu^z, I) with z a fair coin. Returns rows.
Matrix gen_gmm_points(Index n, const GmmState& truth, RandomSource& rand, std::vector<int>* labels = nullptr);

struct MixRegData {
  Matrix X;
  Vector y;
  std::vector<int> labels;
};

/// Gaussian covariates, fair-coin component, y = x^T theta^z + sigma * N(0,1).
MixRegData gen_mixreg_data(Index n, const MixRegState& truth, double sigma, RandomSource& rand);

}  // namespace ncopt
