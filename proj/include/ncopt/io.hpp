#pragma once

#include <string>

#include <json.hpp>

#include "ncopt/lowrank.hpp"
#include "ncopt/phase.hpp"
#include "ncopt/robust.hpp"
#include "ncopt/sparse.hpp"
#include "ncopt/tensor.hpp"

namespace ncopt {

using Json = nlohmann::json;

// Instance layouts. Every document carries "kind" and "version" (currently 1).
// Matrices are flat row-major arrays next to their integer dimensions. Complex
// arrays interleave (re, im) per entry, so entry k occupies slots 2k and 2k+1.
// Doubles are written with 17 significant digits and read back bit-exactly.
//
//   sparse:      {n, p, s, sigma, seed, design, unit_variance, X, y, theta_star}
//   completion:  {m, n, r, p_sample, mu_cap, seed, omega: [[i, j], ...],
//                 values, factors: {U, V}}   (values are A* at omega)
//   corrupted:   {n, p, k, sigma, magnitude, seed, X, y, theta_star, b_star, support}
//   phase:       {n, p, seed, X, y_mag, theta_star}
//   tensor:      {shape: [p, p, p, p], data}
//   tensor_instance: {p, r, seed, components (p x r), tensor}

Json to_json(const SparseInstance& inst);
Json to_json(const CompletionInstance& inst);
Json to_json(const CorruptedInstance& inst);
Json to_json(const PhaseInstance& inst);
Json to_json(const Tensor4& T);
Json to_json(const TensorInstance& inst);

/// Each reader checks "kind", "version" and array lengths and throws
/// InvalidInput naming the offending field.
SparseInstance sparse_instance_from_json(const Json& j);
CompletionInstance completion_instance_from_json(const Json& j);
CorruptedInstance corrupted_instance_from_json(const Json& j);
PhaseInstance phase_instance_from_json(const Json& j);
Tensor4 tensor_from_json(const Json& j);
TensorInstance tensor_instance_from_json(const Json& j);

void write_json_file(const Json& j, const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace ncopt
