#pragma once

#include <cstdint>
#include <vector>

#include "gaincert/kalman.hpp"
#include "gaincert/matrix.hpp"
#include "gaincert/random.hpp"

namespace gaincert::testing {

// Random measurement-update instance with gaussian H.
inline KalmanProblem make_problem(std::size_t n, std::size_t m, std::uint64_t seed,
                                  double lo = -2.0, double hi = 2.0) {
  const Rng root(seed);
  Rng p_rng = root.split(1);
  Rng r_rng = root.split(2);
  Rng h_rng = root.split(3);
  SpdMatrix p = random_spd(n, lo, hi, p_rng);
  SpdMatrix r = random_spd(m, lo, hi, r_rng);
  Matrix h = random_gaussian(m, n, h_rng);
  return KalmanProblem(std::move(p), std::move(r), std::move(h));
}

// The n = m = 1 instance with unit prior, likelihood and operator.
inline KalmanProblem scalar_problem() {
  return KalmanProblem(SpdMatrix(SymmetricMatrix(Matrix(1, 1, {1.0}))),
                       SpdMatrix(SymmetricMatrix(Matrix(1, 1, {1.0}))), Matrix(1, 1, {1.0}));
}

inline Matrix mat(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  return Matrix(rows, cols, std::move(entries));
}

}  // namespace gaincert::testing
