#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmvkit/matrix.hpp"
#include "cmvkit/rng.hpp"

namespace cmvkit {

struct GeneratorSpec {
  enum class Kind { fourier, circulant_generator, haar_random, companion, direct_sum };
  Kind kind = Kind::fourier;
  std::size_t n = 0;
  std::uint64_t seed = default_seed;
  std::vector<Complex> coefficients;     // companion: a0 .. a_{n-1}
  std::vector<GeneratorSpec> parts;      // direct_sum
};

// Spec strings: "fourier:N", "circulant:N", "haar:N[:SEED]",
// "companion:cK,...,c0" (monic, highest degree first, leading 1 required),
// "direct_sum:SPEC+SPEC[+...]".
GeneratorSpec parse_generator_spec(const std::string& text,
                                   std::uint64_t default_seed_value = default_seed);

Matrix fourier_matrix(std::size_t n);
// Companion of z^n - 1: ones on the subdiagonal, one in the top-right corner.
Matrix circulant_generator(std::size_t n);
Matrix haar_random_unitary(std::size_t n, std::uint64_t seed);

Matrix generate(const GeneratorSpec& spec);

}  // namespace cmvkit
