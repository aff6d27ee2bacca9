#pragma once

#include <cstdint>
#include <random>

#include "depsem/tensor.hpp"

namespace depsem {

// Seeded generator whose real-valued draws are derived from raw engine bits,
// so sequences do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Glorot/Xavier uniform: U(-s, s), s = sqrt(6 / (rows + cols)).
Matrix glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);

}  // namespace depsem
