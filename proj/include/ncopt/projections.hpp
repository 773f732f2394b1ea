#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "ncopt/types.hpp"

namespace ncopt {

/// Keeps the s largest-magnitude coordinates of z and zeroes the rest.
/// Magnitude ties are broken in favour of the lower index.
Vector hard_threshold(const Vector& z, Index s);

/// Indices (ascending) of the coordinates kept by hard_threshold(z, s).
std::vector<Index> top_magnitude_support(const Vector& z, Index s);

/// Best rank-r approximation in Frobenius norm (truncated SVD).
Matrix project_low_rank(const Matrix& A, Index r);

/// Radial scaling onto {x : ||x||_2 <= radius}.
Vector project_l2_ball(const Vector& z, double radius);

/// Euclidean projection onto {x : ||x||_1 <= radius} by the sort-based
/// soft-threshold search.
Vector project_l1_ball(const Vector& z, double radius);

/// Normalization onto the unit sphere; the origin maps to e_1.
Vector project_unit_sphere(const Vector& z);

// ---------------------------------------------------------------------------

struct L2Ball {
  double radius = 1.0;
};
struct L1Ball {
  double radius = 1.0;
};
struct SparseSet {
  Index sparsity = 1;
};
/// Matrices of rank <= rank; vectors are read as column-major rows x cols.
struct LowRankSet {
  Index rank = 1;
  Index rows = 1;
  Index cols = 1;
};
struct UnitSphere {};

using SetDescriptor = std::variant<L2Ball, L1Ball, SparseSet, LowRankSet, UnitSphere>;

std::string describe(const SetDescriptor& set);

/// Input, output and the distance between them for one projection.
struct ProjectionReport {
  Matrix input;
  Matrix output;
  double distance = 0.0;
  SetDescriptor set;
};

/// Projects z onto `set`. Vector sets act on the entries of z in
/// column-major order; LowRankSet acts on z as a matrix.
ProjectionReport project(const SetDescriptor& set, const Matrix& z);

using Projector = std::function<Vector(const Vector&)>;

/// Vector projector for `set` (LowRankSet reshapes to rows x cols).
Projector make_projector(const SetDescriptor& set);

/// Identity map, i.e. the unconstrained case.
Projector identity_projector();

}  // namespace ncopt
