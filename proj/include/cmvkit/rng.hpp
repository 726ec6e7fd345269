#pragma once

#include <cstdint>

#include "cmvkit/matrix.hpp"

namespace cmvkit {

inline constexpr std::uint64_t default_seed = 42;

// xoshiro256** seeded through splitmix64. Fixed algorithm so seeded runs are
// reproducible byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double next_double();    // uniform in [0, 1)
  double next_gaussian();  // standard normal, Box-Muller
  Complex next_complex_gaussian();

  // Gaussian column normalized to unit Euclidean norm.
  Matrix unit_vector(std::size_t n);

 private:
  std::uint64_t state_[4];
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Mixes auxiliary identifiers into a seed, for independent deterministic
// streams (restart attempts, per-size benchmarks, ...).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace cmvkit
