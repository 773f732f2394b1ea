#include "ncopt/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ncopt/descent.hpp"
#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"
#include "ncopt/projections.hpp"

namespace ncopt {

Tensor4::Tensor4(Index p) : p_(p) {
  require(p >= 1 && p <= kMaxTensorDim, "Tensor4: dimension must lie in [1, " + std::to_string(kMaxTensorDim) + "]");
  data_ = Vector::Zero(p * p * p * p);
}

void Tensor4::add_rank_one(const Vector& u, double weight) {
  require(u.size() == p_, "Tensor4::add_rank_one: dimension mismatch");
  const Index p = p_;
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) {
      const double ij = weight * u(i) * u(j);
      for (Index k = 0; k < p; ++k) data_.segment(((i * p + j) * p + k) * p, p) += (ij * u(k)) * u;
    }
}

double Tensor4::max_abs() const { return data_.size() == 0 ? 0.0 : data_.cwiseAbs().maxCoeff(); }

double Tensor4::asymmetry() const {
  std::array<int, 4> perm = {0, 1, 2, 3};
  double worst = 0.0;
  const Index p = p_;
  std::array<Index, 4> idx{};
  do {
    for (idx[0] = 0; idx[0] < p; ++idx[0])
      for (idx[1] = 0; idx[1] < p; ++idx[1])
        for (idx[2] = 0; idx[2] < p; ++idx[2])
          for (idx[3] = 0; idx[3] < p; ++idx[3]) {
            const double a = (*this)(idx[0], idx[1], idx[2], idx[3]);
            const double b = (*this)(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]);
            worst = std::max(worst, std::abs(a - b));
          }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return worst;
}

void validate_components(const ComponentSet& U, double tol) {
  require(U.cols() >= 1 && U.rows() >= 1, "validate_components: need at least one component");
  const Matrix gram = U.transpose() * U;
  for (Index i = 0; i < gram.rows(); ++i) {
    require(std::abs(gram(i, i) - 1.0) <= tol, "validate_components: component " + std::to_string(i) + " is not unit norm");
    for (Index j = i + 1; j < gram.cols(); ++j)
      require(std::abs(gram(i, j)) <= tol,
              "validate_components: components " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
  }
}

ComponentSet random_orthonormal_components(Index p, Index r, RandomSource& rand) {
  require(r >= 1 && r <= p, "random_orthonormal_components: need 1 <= r <= p");
  const Matrix G = rand.normal_matrix(p, r);
  const Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(p, r);
  const Matrix R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Index j = 0; j < r; ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

Tensor4 tensor_from_components(const ComponentSet& U) {
  validate_components(U);
  Tensor4 T(U.rows());
  for (Index c = 0; c < U.cols(); ++c) T.add_rank_one(U.col(c));
  return T;
}

Vector contract(const Tensor4& T, const Vector& v, int holds) {
  const Index p = T.dim();
  require(v.size() == p, "contract: vector dimension " + std::to_string(v.size()) + " != tensor dimension " + std::to_string(p));
  require(holds >= 0 && holds <= 3, "contract: holds must lie in [0, 3]");
  // The row-major buffer, read column-major as p x p^m, has the last mode
  // along the rows, so v^T times that view contracts the last mode.
  Vector current = T.data();
  for (int modes = 4; modes > holds; --modes) {
    const Index rest = current.size() / p;
    current = Eigen::Map<const Matrix>(current.data(), p, rest).transpose() * v;
  }
  return current;
}

double tensor_form(const Tensor4& T, const Vector& u) { return contract(T, u, 0)(0); }

Vector tensor_gradient_form(const Tensor4& T, const Vector& u) { return contract(T, u, 1); }

Vector canonical_sign(Vector u) {
  for (Index i = 0; i < u.size(); ++i) {
    if (u(i) != 0.0) {
      if (u(i) < 0.0) u = -u;
      break;
    }
  }
  return u;
}

Vector lrtd_component(const Tensor4& T, double eta_max, double epsilon, RandomSource& rand,
                      const LrtdOptions& options) {
  require(T.dim() >= 1, "lrtd_component: empty tensor");
  require(options.restarts >= 1, "lrtd_component: restarts must be >= 1");
  require(options.polish_steps >= 0, "lrtd_component: polish_steps must be >= 0");
  ObjectiveOracle f;
  f.name = "negative_tensor_form";
  f.value = [&T](const Vector& u) { return -tensor_form(T, u); };
  f.gradient = [&T](const Vector& u) -> Vector { return -4.0 * tensor_gradient_form(T, u); };
  const Projector sphere = make_projector(UnitSphere{});

  Vector best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.restarts; ++s) {
    RandomSource child = rand.split(static_cast<std::uint64_t>(s));
    const Vector x0 = sample_unit_sphere(T.dim(), child);
    const DescentResult run = pngd_run(f, sphere, x0, eta_max, epsilon, child);
    const double value = tensor_form(T, run.final_point);
    if (value > best_value) {
      best_value = value;
      best = run.final_point;
    }
  }
  for (int s = 0; s < options.polish_steps; ++s) {
    const Vector g = tensor_gradient_form(T, best);
    const double norm = g.norm();
    if (!(norm > 0.0) || !g.allFinite()) break;
    best = g / norm;
  }
  // Advance the caller's stream so consecutive calls differ.
  rand.uniform();
  return canonical_sign(best);
}

Decomposition decompose(const Tensor4& T, Index r, RandomSource& rand, const DecomposeOptions& options) {
  require(r >= 1 && r <= T.dim(), "decompose: need 1 <= r <= p");
  require(options.overlap_limit > 0.0 && options.overlap_limit < 1.0, "decompose: overlap_limit must lie in (0, 1)");
  Decomposition out;
  out.residual = T;
  Matrix raw(T.dim(), r);
  for (Index c = 0; c < r; ++c) {
    const Vector u = lrtd_component(out.residual, options.eta_max, options.epsilon, rand, options.lrtd);
    for (Index j = 0; j < c; ++j) {
      const double overlap = std::abs(u.dot(raw.col(j)));
      if (overlap > options.overlap_limit)
        throw DeflationFailure("decompose: component " + std::to_string(c) + " overlaps component " +
                               std::to_string(j) + " by " + std::to_string(overlap));
    }
    raw.col(c) = u;
    out.residual.add_rank_one(u, -1.0);
  }
  out.components.resize(T.dim(), r);
  for (Index c = 0; c < r; ++c) {
    Vector u = raw.col(c);
    for (Index j = 0; j < c; ++j) u -= out.components.col(j).dot(u) * out.components.col(j);
    out.components.col(c) = canonical_sign(u / u.norm());
  }
  return out;
}

TensorInstance gen_tensor_instance(Index p, Index r, RandomSource& rand) {
  TensorInstance inst;
  inst.seed = rand.seed();
  inst.components = random_orthonormal_components(p, r, rand);
  for (Index c = 0; c < r; ++c) inst.components.col(c) = canonical_sign(inst.components.col(c));
  inst.tensor = tensor_from_components(inst.components);
  return inst;
}

}  // namespace ncopt
