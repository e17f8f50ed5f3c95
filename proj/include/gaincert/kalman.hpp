#pragma once

#include "gaincert/matrix.hpp"

namespace gaincert {

// One measurement-update problem: prior covariance P (n x n), likelihood
// covariance R (m x m), measurement operator H (m x n). Rank-deficient H is
// allowed; the innovation covariance stays SPD because R is SPD.
struct KalmanProblem {
  SpdMatrix prior;
  SpdMatrix likelihood;
  Matrix measurement;

  KalmanProblem(SpdMatrix p, SpdMatrix r, Matrix h);

  std::size_t state_dim() const { return prior.dim(); }
  std::size_t obs_dim() const { return likelihood.dim(); }
};

// Candidate gain, n x m. Shape conformance is checked by every operation.
using GainMatrix = Matrix;

// S = H P H^T + R.
SpdMatrix innovation_cov(const KalmanProblem& prob);

// K* = P H^T S^{-1}, realized as an SPD solve of S X = H P.
GainMatrix optimal_gain(const KalmanProblem& prob);

// Joseph form (I - K H) P (I - K H)^T + K R K^T, valid for every gain,
// symmetrized on output.
SymmetricMatrix posterior_cov(const KalmanProblem& prob, const GainMatrix& gain);

// Short form (I - K* H) P, valid only at the optimal gain.
SymmetricMatrix posterior_cov_standard(const KalmanProblem& prob);

// K S - P H^T; zero exactly at the optimal gain.
Matrix gain_residual(const KalmanProblem& prob, const GainMatrix& gain);

// Derivative of K -> P_K at `gain` in direction `delta`:
// delta (S K^T - H P) + (K S - P H^T) delta^T.
SymmetricMatrix posterior_directional_derivative(const KalmanProblem& prob,
                                                 const GainMatrix& gain,
                                                 const Matrix& delta);

// P_K - P_{K*}; equals (K - K*) S (K - K*)^T and is PSD for every gain.
SymmetricMatrix loewner_gap(const KalmanProblem& prob, const GainMatrix& gain);

}  // namespace gaincert
