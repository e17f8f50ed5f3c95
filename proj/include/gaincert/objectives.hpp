#pragma once

#include <string>
#include <vector>

#include "gaincert/kalman.hpp"
#include "gaincert/matrix.hpp"
#include "gaincert/polynomial.hpp"
#include "gaincert/spectral.hpp"

namespace gaincert {

// One term coefficient * prod_k e_k^{exponents[k-1]} of a polynomial in the
// elementary symmetric polynomials of the posterior eigenvalues.
struct SymPolyTerm {
  double coefficient{0.0};
  std::vector<int> exponents;  // length n, nonnegative
};

struct SymmetricPolySpec {
  std::vector<SymPolyTerm> terms;  // at least one
};

enum class ObjectiveKind {
  kTrace,
  kDet,
  kSmallestEig,
  kCharMag,         // |Phi(P_K, lambda)|
  kLogCharMag,      // log |Phi(P_K, lambda)|
  kCoefficientMag,  // |a_i|, i in 0..n-1
  kElemSym,         // e_k of the eigenvalues, k in 1..n
  kCoeffAbsSum,     // sum_i |a_i|, i = 0..n
  kSymmetricPoly,
};

// Tagged description of one scalar uncertainty measure over the posterior
// covariance.
struct ObjectiveSpec {
  ObjectiveKind kind{ObjectiveKind::kTrace};
  double lambda{0.0};     // CharMag / LogCharMag
  std::size_t index{0};   // CoefficientMag (0..n-1) or ElemSym (1..n)
  SymmetricPolySpec poly;

  static ObjectiveSpec trace();
  static ObjectiveSpec det();
  static ObjectiveSpec smallest_eig();
  static ObjectiveSpec char_mag(double lambda);
  static ObjectiveSpec log_char_mag(double lambda);
  static ObjectiveSpec coefficient_mag(std::size_t i);
  static ObjectiveSpec elem_sym(std::size_t k);
  static ObjectiveSpec coeff_abs_sum();
  static ObjectiveSpec symmetric_poly(SymmetricPolySpec poly);

  std::string name() const;
};

// Objective value from a posterior covariance trace and its eigenvalues.
// Every catalog objective is a function of these two alone.
double eval_objective_from(const ObjectiveSpec& spec, double cov_trace,
                           const std::vector<double>& eigenvalues);

double eval_objective(const KalmanProblem& prob, const GainMatrix& gain,
                      const ObjectiveSpec& spec);

// W = d(objective)/d(P_K) as a symmetric matrix.
SymmetricMatrix objective_grad_cov(const ObjectiveSpec& spec, const SymmetricMatrix& posterior);

// Gradient with respect to the gain: 2 W (K S - P H^T). Vanishes at the
// optimal gain for every objective in the catalog.
Matrix objective_grad_gain(const KalmanProblem& prob, const GainMatrix& gain,
                           const ObjectiveSpec& spec);

// a_0..a_n of the posterior covariance at the given gain.
CharPolyCoeffs coefficient_vector(const KalmanProblem& prob, const GainMatrix& gain);

}  // namespace gaincert
