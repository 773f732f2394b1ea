#pragma once

#include <cstdint>
#include <vector>

#include "ncopt/random.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

/// Dense storage limit per mode (64^4 doubles is 128 MiB).
inline constexpr Index kMaxTensorDim = 64;

/// Dense fourth-order tensor with p entries per mode, stored row-major:
/// T(i, j, k, l) sits at ((i p + j) p + k) p + l.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Index p);  // zero tensor

  Index dim() const { return p_; }
  double& operator()(Index i, Index j, Index k, Index l) { return data_(offset(i, j, k, l)); }
  double operator()(Index i, Index j, Index k, Index l) const { return data_(offset(i, j, k, l)); }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  /// T += weight * u (x) u (x) u (x) u.
  void add_rank_one(const Vector& u, double weight = 1.0);
  double max_abs() const;
  /// Largest |T(i,j,k,l) - T(sigma(i,j,k,l))| over the 24 index permutations.
  double asymmetry() const;

 private:
  Index offset(Index i, Index j, Index k, Index l) const { return ((i * p_ + j) * p_ + k) * p_ + l; }
  Index p_ = 0;
  Vector data_;
};

/// Columns are the components u_1 .. u_r.
using ComponentSet = Matrix;

/// Throws InvalidInput unless every column has unit norm and distinct columns
/// have |<u_i, u_j>| <= tol.
void validate_components(const ComponentSet& U, double tol = 1e-8);

/// r orthonormal columns in R^p: Q factor of a p x r Gaussian matrix, signs
/// fixed so R has a positive diagonal.
ComponentSet random_orthonormal_components(Index p, Index r, RandomSource& rand);

/// sum_i u_i (x) u_i (x) u_i (x) u_i.
Tensor4 tensor_from_components(const ComponentSet& U);

/// Contracts v into the last 4 - holds modes and keeps the first `holds`
/// modes free, e.g. holds = 0 gives T(v,v,v,v) and holds = 1 gives
/// T(I,v,v,v). The result is flat row-major with p^holds entries.
Vector contract(const Tensor4& T, const Vector& v, int holds);

double tensor_form(const Tensor4& T, const Vector& u);       // T(u,u,u,u)
Vector tensor_gradient_form(const Tensor4& T, const Vector& u);  // T(I,u,u,u)

/// Flips u so that its first nonzero coordinate is positive.
Vector canonical_sign(Vector u);

struct LrtdOptions {
  int restarts = 5;
  /// Noiseless sphere steps u <- T(I,u,u,u) / ||T(I,u,u,u)|| applied to the
  /// chosen iterate; 0 returns the raw PNGD output.
  int polish_steps = 30;
};

/// Maximizes T(u,u,u,u) over the unit sphere: pngd_run on -T(u,u,u,u) with
/// gradient -4 T(I,u,u,u) from a random sphere point, repeated `restarts`
/// times on split random streams. Returns the final iterate of the restart
/// with the largest T(u,u,u,u), polished and in canonical sign.
Vector lrtd_component(const Tensor4& T, double eta_max, double epsilon, RandomSource& rand,
                      const LrtdOptions& options = {});

struct DecomposeOptions {
  double eta_max = 0.05;
  double epsilon = 0.3;
  LrtdOptions lrtd;
  double overlap_limit = 0.5;
};

struct Decomposition {
  ComponentSet components;  // orthonormalized, canonical sign
  Tensor4 residual;         // T minus every recovered rank-one term
};

/// r rounds of lrtd_component, each followed by T <- T - u (x) u (x) u (x) u.
/// Throws DeflationFailure when a recovered u has |<u, u_j>| > overlap_limit
/// with an earlier one. The returned set is orthonormalized in recovery order.
Decomposition decompose(const Tensor4& T, Index r, RandomSource& rand, const DecomposeOptions& options = {});

struct TensorInstance {
  ComponentSet components;
  Tensor4 tensor;
  std::uint64_t seed = 0;
};

TensorInstance gen_tensor_instance(Index p, Index r, RandomSource& rand);

}  // namespace ncopt
