#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "ncopt/types.hpp"

namespace ncopt {

/// Seedable pseudo-random stream.
///
/// Equal seeds give bitwise-equal streams on every platform: the raw 64-bit
/// words come from std::mt19937_64 (fully specified by the standard) and all
/// derived variates are computed here rather than by std distributions, whose
/// algorithms are implementation defined.
///
/// split() derives an independent child stream from the seed and a label
/// only, so children do not depend on how many draws the parent has made.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) != 0 ? 1.0 : -1.0; }

  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);
  /// Entries are re + i*im with re, im independent N(0, 1).
  ComplexVector complex_normal_vector(Index n);
  ComplexMatrix complex_normal_matrix(Index rows, Index cols);

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<Index> permutation(Index n);
  /// k distinct indices of 0..n-1, returned sorted.
  std::vector<Index> choose(Index n, Index k);

  RandomSource split(std::string_view label) const;
  RandomSource split(std::uint64_t label) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

/// splitmix64 finalizer; a bijective mixer on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

}  // namespace ncopt
