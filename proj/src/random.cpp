#include "depsem/random.hpp"

#include <cmath>

#include "depsem/error.hpp"

namespace depsem {

Rng::Rng(std::uint64_t seed) : engine_(derive_seed(seed, 0)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw ConfigError("Rng::below called with n = 0");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("glorot_init: dims must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  return random_matrix(rows, cols, -s, s, rng);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
  Matrix m(rows, cols);
  for (auto& x : m.flat()) x = rng.uniform(lo, hi);
  return m;
}

}  // namespace depsem
