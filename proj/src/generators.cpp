#include "cmvkit/generators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cmvkit/kernels.hpp"

namespace cmvkit {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

std::size_t parse_size(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("invalid number: " + s);
  return static_cast<std::size_t>(v);
}

}  // namespace

GeneratorSpec parse_generator_spec(const std::string& text,
                                   std::uint64_t default_seed_value) {
  GeneratorSpec spec;
  spec.seed = default_seed_value;
  const std::size_t colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);

  if (kind == "fourier" || kind == "circulant" || kind == "haar") {
    const auto fields = split(rest, ':');
    if (fields.empty() || fields[0].empty())
      throw std::invalid_argument("generator spec needs a size: " + text);
    spec.n = parse_size(fields[0]);
    if (kind == "fourier") {
      spec.kind = GeneratorSpec::Kind::fourier;
      if (spec.n < 2) throw std::invalid_argument("fourier requires n >= 2");
    } else if (kind == "circulant") {
      spec.kind = GeneratorSpec::Kind::circulant_generator;
    } else {
      spec.kind = GeneratorSpec::Kind::haar_random;
      if (fields.size() > 1) spec.seed = std::stoull(fields[1]);
    }
    if (spec.n == 0) throw std::invalid_argument("generator size must be positive");
    return spec;
  }
  if (kind == "companion") {
    spec.kind = GeneratorSpec::Kind::companion;
    const auto fields = split(rest, ',');
    if (fields.size() < 2 || fields[0] != "1")
      throw std::invalid_argument(
          "companion spec wants monic coefficients, highest degree first");
    // Stored lowest degree first, leading one dropped.
    for (std::size_t k = fields.size(); k-- > 1;)
      spec.coefficients.push_back(Complex(std::stod(fields[k]), 0.0));
    spec.n = spec.coefficients.size();
    return spec;
  }
  if (kind == "direct_sum") {
    spec.kind = GeneratorSpec::Kind::direct_sum;
    for (const std::string& part : split(rest, '+')) {
      // each part defaults to its own stream; explicit seeds still win
      spec.parts.push_back(parse_generator_spec(
          part, mix_seed(default_seed_value, spec.parts.size() + 1)));
      spec.n += spec.parts.back().n;
    }
    if (spec.parts.empty())
      throw std::invalid_argument("direct_sum needs at least one part");
    return spec;
  }
  throw std::invalid_argument("unknown generator kind: " + kind);
}

Matrix fourier_matrix(std::size_t n) {
  if (n < 2) throw std::invalid_argument("fourier_matrix requires n >= 2");
  Matrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double base = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double angle =
          base * static_cast<double>((i * j) % n);
      f(i, j) = scale * Complex(std::cos(angle), std::sin(angle));
    }
  return f;
}

Matrix circulant_generator(std::size_t n) {
  if (n == 0) throw std::invalid_argument("circulant_generator requires n >= 1");
  Matrix u(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) u(i + 1, i) = 1.0;
  u(0, n - 1) = 1.0;
  return u;
}

Matrix haar_random_unitary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g(i, j) = rng.next_complex_gaussian();
  // QR with the R diagonal made real positive gives the Haar distribution.
  return qr_tall(g).q;
}

Matrix generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorSpec::Kind::fourier:
      return fourier_matrix(spec.n);
    case GeneratorSpec::Kind::circulant_generator:
      return circulant_generator(spec.n);
    case GeneratorSpec::Kind::haar_random:
      return haar_random_unitary(spec.n, spec.seed);
    case GeneratorSpec::Kind::companion: {
      const std::size_t n = spec.coefficients.size();
      if (n < 1) throw std::invalid_argument("companion needs degree >= 1");
      Matrix c(n, n);
      for (std::size_t i = 0; i + 1 < n; ++i) c(i + 1, i) = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        c(0, j) = -spec.coefficients[n - 1 - j];
      return c;
    }
    case GeneratorSpec::Kind::direct_sum: {
      Matrix m(spec.n, spec.n);
      std::size_t off = 0;
      for (const GeneratorSpec& part : spec.parts) {
        assign_submatrix(m, off, off, generate(part));
        off += part.n;
      }
      return m;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace cmvkit
