#include "ncopt/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"

namespace ncopt {

std::vector<Index> top_magnitude_support(const Vector& z, Index s) {
  const Index p = z.size();
  require(s >= 1 && s <= p, "hard_threshold: sparsity " + std::to_string(s) + " outside [1, " +
                                std::to_string(p) + "]");
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Total order: larger magnitude first, then lower index.
  const auto before = [&](Index a, Index b) {
    const double ma = std::abs(z(a));
    const double mb = std::abs(z(b));
    return ma > mb || (ma == mb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + (s - 1), idx.end(), before);
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector hard_threshold(const Vector& z, Index s) {
  Vector out = Vector::Zero(z.size());
  for (const Index i : top_magnitude_support(z, s)) out(i) = z(i);
  return out;
}

Matrix project_low_rank(const Matrix& A, Index r) {
  require(r >= 1 && r <= std::min(A.rows(), A.cols()), "project_low_rank: rank out of range");
  return truncated_svd(A, r).reconstruct();
}

Vector project_l2_ball(const Vector& z, double radius) {
  require(radius > 0.0, "project_l2_ball: radius must be positive");
  const double norm = z.norm();
  if (norm <= radius) return z;
  return (radius / norm) * z;
}

Vector project_l1_ball(const Vector& z, double radius) {
  require(radius > 0.0, "project_l1_ball: radius must be positive");
  if (z.lpNorm<1>() <= radius) return z;
  // Largest theta with sum(max(|z_i| - theta, 0)) = radius, found from the
  // sorted magnitudes.
  std::vector<double> mags(static_cast<std::size_t>(z.size()));
  for (Index i = 0; i < z.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(z(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) theta = candidate;
  }
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double shrunk = std::max(std::abs(z(i)) - theta, 0.0);
    out(i) = std::copysign(shrunk, z(i));
  }
  return out;
}

Vector project_unit_sphere(const Vector& z) {
  const double norm = z.norm();
  if (norm == 0.0) return Vector::Unit(z.size(), 0);
  return z / norm;
}

std::string describe(const SetDescriptor& set) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, L2Ball>) return "L2Ball(" + std::to_string(s.radius) + ")";
        if constexpr (std::is_same_v<T, L1Ball>) return "L1Ball(" + std::to_string(s.radius) + ")";
        if constexpr (std::is_same_v<T, SparseSet>) return "Sparse(" + std::to_string(s.sparsity) + ")";
        if constexpr (std::is_same_v<T, LowRankSet>) return "LowRank(" + std::to_string(s.rank) + ")";
        if constexpr (std::is_same_v<T, UnitSphere>) return "UnitSphere";
      },
      set);
}

namespace {

Vector apply_vector_set(const SetDescriptor& set, const Vector& z) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, L2Ball>) return project_l2_ball(z, s.radius);
        if constexpr (std::is_same_v<T, L1Ball>) return project_l1_ball(z, s.radius);
        if constexpr (std::is_same_v<T, SparseSet>) return hard_threshold(z, s.sparsity);
        if constexpr (std::is_same_v<T, UnitSphere>) return project_unit_sphere(z);
        if constexpr (std::is_same_v<T, LowRankSet>) {
          require(z.size() == s.rows * s.cols, "LowRankSet: vector length does not match shape");
          const Matrix m = Eigen::Map<const Matrix>(z.data(), s.rows, s.cols);
          const Matrix out = project_low_rank(m, s.rank);
          return Eigen::Map<const Vector>(out.data(), out.size());
        }
      },
      set);
}

}  // namespace

ProjectionReport project(const SetDescriptor& set, const Matrix& z) {
  ProjectionReport report;
  report.input = z;
  report.set = set;
  if (const auto* low_rank = std::get_if<LowRankSet>(&set)) {
    report.output = project_low_rank(z, low_rank->rank);
  } else {
    const Vector flat = Eigen::Map<const Vector>(z.data(), z.size());
    const Vector out = apply_vector_set(set, flat);
    report.output = Eigen::Map<const Matrix>(out.data(), z.rows(), z.cols());
  }
  report.distance = (report.input - report.output).norm();
  return report;
}

Projector make_projector(const SetDescriptor& set) {
  return [set](const Vector& z) { return apply_vector_set(set, z); };
}

Projector identity_projector() {
  return [](const Vector& z) { return z; };
}

}  // namespace ncopt
