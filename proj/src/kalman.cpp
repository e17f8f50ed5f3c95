#include "gaincert/kalman.hpp"

#include <stdexcept>
#include <utility>

namespace gaincert {

namespace {

void require_gain_shape(const KalmanProblem& prob, const Matrix& gain, const char* op) {
  if (gain.rows() != prob.state_dim() || gain.cols() != prob.obs_dim()) {
    throw std::invalid_argument(std::string(op) + ": gain shape does not match problem");
  }
}

}  // namespace

KalmanProblem::KalmanProblem(SpdMatrix p, SpdMatrix r, Matrix h)
    : prior(std::move(p)), likelihood(std::move(r)), measurement(std::move(h)) {
  if (measurement.rows() != likelihood.dim() || measurement.cols() != prior.dim()) {
    throw std::invalid_argument("KalmanProblem: measurement operator has wrong shape");
  }
}

SpdMatrix innovation_cov(const KalmanProblem& prob) {
  const Matrix& h = prob.measurement;
  const Matrix s = h * prob.prior.sym().mat() * transpose(h) + prob.likelihood.sym().mat();
  return SpdMatrix(SymmetricMatrix(s));
}

GainMatrix optimal_gain(const KalmanProblem& prob) {
  const SpdMatrix s = innovation_cov(prob);
  const Matrix hp = prob.measurement * prob.prior.sym().mat();
  return transpose(solve_spd(s, hp));
}

SymmetricMatrix posterior_cov(const KalmanProblem& prob, const GainMatrix& gain) {
  require_gain_shape(prob, gain, "posterior_cov");
  const std::size_t n = prob.state_dim();
  const Matrix t = Matrix::identity(n) - gain * prob.measurement;
  const Matrix joseph =
      t * prob.prior.sym().mat() * transpose(t) +
      gain * prob.likelihood.sym().mat() * transpose(gain);
  return SymmetricMatrix(joseph);
}

SymmetricMatrix posterior_cov_standard(const KalmanProblem& prob) {
  const GainMatrix k = optimal_gain(prob);
  const Matrix t = Matrix::identity(prob.state_dim()) - k * prob.measurement;
  return SymmetricMatrix(t * prob.prior.sym().mat());
}

Matrix gain_residual(const KalmanProblem& prob, const GainMatrix& gain) {
  require_gain_shape(prob, gain, "gain_residual");
  const SpdMatrix s = innovation_cov(prob);
  return gain * s.sym().mat() - prob.prior.sym().mat() * transpose(prob.measurement);
}

SymmetricMatrix posterior_directional_derivative(const KalmanProblem& prob,
                                                 const GainMatrix& gain,
                                                 const Matrix& delta) {
  require_gain_shape(prob, gain, "posterior_directional_derivative");
  require_gain_shape(prob, delta, "posterior_directional_derivative (direction)");
  const Matrix g = gain_residual(prob, gain);
  return SymmetricMatrix(delta * transpose(g) + g * transpose(delta));
}

SymmetricMatrix loewner_gap(const KalmanProblem& prob, const GainMatrix& gain) {
  require_gain_shape(prob, gain, "loewner_gap");
  const SymmetricMatrix at_gain = posterior_cov(prob, gain);
  const SymmetricMatrix at_optimum = posterior_cov(prob, optimal_gain(prob));
  return SymmetricMatrix(at_gain.mat() - at_optimum.mat());
}

}  // namespace gaincert
