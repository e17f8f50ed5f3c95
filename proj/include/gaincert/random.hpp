#pragma once

#include <cstdint>

#include "gaincert/matrix.hpp"

namespace gaincert {

// Deterministic splittable generator (splitmix64 core, Box-Muller gaussians).
// All randomness in the library flows through explicit seeds; split() derives
// an independent child stream from the root seed and a consumer tag.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double next_double();    // uniform in [0, 1)
  double next_gaussian();  // standard normal

  Rng split(std::uint64_t tag) const;
  std::uint64_t root_seed() const { return root_; }

 private:
  std::uint64_t root_;
  std::uint64_t state_;
  double cached_gauss_{0.0};
  bool has_cached_{false};
};

Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng);

// Orthogonal factor from Gram-Schmidt on a standard-gaussian matrix.
Matrix random_orthogonal(std::size_t dim, Rng& rng);

// SPD matrix Q diag(mu) Q^T with mu log-uniform in [10^lo, 10^hi]; bitwise
// deterministic for a given seed.
SpdMatrix random_spd(std::size_t dim, double log10_lo, double log10_hi, Rng& rng);
SpdMatrix random_spd(std::size_t dim, double log10_lo, double log10_hi, std::uint64_t seed);

}  // namespace gaincert
