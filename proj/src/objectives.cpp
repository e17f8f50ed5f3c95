#include "gaincert/objectives.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "gaincert/errors.hpp"

namespace gaincert {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void validate_index(const ObjectiveSpec& spec, std::size_t n) {
  if (spec.kind == ObjectiveKind::kCoefficientMag && spec.index >= n) {
    throw std::invalid_argument("CoefficientMag: index must be in 0..n-1");
  }
  if (spec.kind == ObjectiveKind::kElemSym && (spec.index < 1 || spec.index > n)) {
    throw std::invalid_argument("ElemSym: index must be in 1..n");
  }
}

void validate_sympoly(const SymmetricPolySpec& poly, std::size_t n) {
  if (poly.terms.empty()) {
    throw std::invalid_argument("SymmetricPoly: at least one term required");
  }
  for (const SymPolyTerm& t : poly.terms) {
    if (t.exponents.size() != n) {
      throw std::invalid_argument("SymmetricPoly: exponent vector must have length n");
    }
    for (int e : t.exponents) {
      if (e < 0) throw std::invalid_argument("SymmetricPoly: exponents must be nonnegative");
    }
  }
}

double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

double eval_sympoly(const SymmetricPolySpec& poly, const std::vector<double>& esym) {
  double total = 0.0;
  for (const SymPolyTerm& t : poly.terms) {
    double term = t.coefficient;
    for (std::size_t k = 0; k < esym.size(); ++k) term *= int_pow(esym[k], t.exponents[k]);
    total += term;
  }
  return total;
}

// e_0..e_{n-1} of the values with index j removed, for every j.
std::vector<std::vector<double>> esym_excluding_each(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::vector<double>> table(n);
  std::vector<double> rest(n > 0 ? n - 1 : 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) rest[w++] = values[i];
    }
    std::vector<double> e(n, 0.0);
    e[0] = 1.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++used;
      for (std::size_t k = used; k >= 1; --k) e[k] += rest[i] * e[k - 1];
    }
    table[j] = std::move(e);
  }
  return table;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

ObjectiveSpec ObjectiveSpec::trace() { return {ObjectiveKind::kTrace, 0.0, 0, {}}; }
ObjectiveSpec ObjectiveSpec::det() { return {ObjectiveKind::kDet, 0.0, 0, {}}; }
ObjectiveSpec ObjectiveSpec::smallest_eig() { return {ObjectiveKind::kSmallestEig, 0.0, 0, {}}; }
ObjectiveSpec ObjectiveSpec::char_mag(double lambda) {
  return {ObjectiveKind::kCharMag, lambda, 0, {}};
}
ObjectiveSpec ObjectiveSpec::log_char_mag(double lambda) {
  return {ObjectiveKind::kLogCharMag, lambda, 0, {}};
}
ObjectiveSpec ObjectiveSpec::coefficient_mag(std::size_t i) {
  return {ObjectiveKind::kCoefficientMag, 0.0, i, {}};
}
ObjectiveSpec ObjectiveSpec::elem_sym(std::size_t k) {
  return {ObjectiveKind::kElemSym, 0.0, k, {}};
}
ObjectiveSpec ObjectiveSpec::coeff_abs_sum() { return {ObjectiveKind::kCoeffAbsSum, 0.0, 0, {}}; }
ObjectiveSpec ObjectiveSpec::symmetric_poly(SymmetricPolySpec poly) {
  ObjectiveSpec s;
  s.kind = ObjectiveKind::kSymmetricPoly;
  s.poly = std::move(poly);
  return s;
}

std::string ObjectiveSpec::name() const {
  switch (kind) {
    case ObjectiveKind::kTrace:
      return "Trace";
    case ObjectiveKind::kDet:
      return "Det";
    case ObjectiveKind::kSmallestEig:
      return "SmallestEig";
    case ObjectiveKind::kCharMag:
      return "CharMag(" + fmt_double(lambda) + ")";
    case ObjectiveKind::kLogCharMag:
      return "LogCharMag(" + fmt_double(lambda) + ")";
    case ObjectiveKind::kCoefficientMag:
      return "CoefficientMag(" + std::to_string(index) + ")";
    case ObjectiveKind::kElemSym:
      return "ElemSym(" + std::to_string(index) + ")";
    case ObjectiveKind::kCoeffAbsSum:
      return "CoeffAbsSum";
    case ObjectiveKind::kSymmetricPoly: {
      std::string s = "SymmetricPoly(";
      for (std::size_t t = 0; t < poly.terms.size(); ++t) {
        if (t > 0) s += "+";
        s += fmt_double(poly.terms[t].coefficient);
        for (std::size_t k = 0; k < poly.terms[t].exponents.size(); ++k) {
          const int e = poly.terms[t].exponents[k];
          if (e == 0) continue;
          s += "*e" + std::to_string(k + 1);
          if (e > 1) s += "^" + std::to_string(e);
        }
      }
      return s + ")";
    }
  }
  return "?";
}

double eval_objective_from(const ObjectiveSpec& spec, double cov_trace,
                           const std::vector<double>& eigenvalues) {
  const std::size_t n = eigenvalues.size();
  validate_index(spec, n);
  switch (spec.kind) {
    case ObjectiveKind::kTrace:
      return cov_trace;
    case ObjectiveKind::kDet: {
      double d = 1.0;
      for (double v : eigenvalues) d *= v;
      return d;
    }
    case ObjectiveKind::kSmallestEig:
      return eigenvalues.front();
    case ObjectiveKind::kCharMag: {
      if (!std::isfinite(spec.lambda)) throw std::invalid_argument("CharMag: lambda not finite");
      const CharPolyCoeffs c = char_poly_from_roots(eigenvalues);
      return std::abs(eval_poly(c, spec.lambda));
    }
    case ObjectiveKind::kLogCharMag: {
      if (!std::isfinite(spec.lambda)) {
        throw std::invalid_argument("LogCharMag: lambda not finite");
      }
      const CharPolyCoeffs c = char_poly_from_roots(eigenvalues);
      const double mag = std::abs(eval_poly(c, spec.lambda));
      if (mag < 1e-300) {
        throw EvalAtEigenvalue("LogCharMag: lambda is at an eigenvalue of the posterior");
      }
      return std::log(mag);
    }
    case ObjectiveKind::kCoefficientMag: {
      const CharPolyCoeffs c = char_poly_from_roots(eigenvalues);
      return std::abs(c.coeffs[spec.index]);
    }
    case ObjectiveKind::kElemSym: {
      const std::vector<double> e = elem_sym_polys(eigenvalues);
      return e[spec.index - 1];
    }
    case ObjectiveKind::kCoeffAbsSum: {
      const CharPolyCoeffs c = char_poly_from_roots(eigenvalues);
      double s = 0.0;
      for (double a : c.coeffs) s += std::abs(a);
      return s;
    }
    case ObjectiveKind::kSymmetricPoly: {
      validate_sympoly(spec.poly, n);
      return eval_sympoly(spec.poly, elem_sym_polys(eigenvalues));
    }
  }
  throw std::invalid_argument("eval_objective: unknown objective kind");
}

double eval_objective(const KalmanProblem& prob, const GainMatrix& gain,
                      const ObjectiveSpec& spec) {
  const SymmetricMatrix cov = posterior_cov(prob, gain);
  if (spec.kind == ObjectiveKind::kTrace) {
    return trace(cov.mat());
  }
  const Spectrum s = sym_eigen(cov);
  return eval_objective_from(spec, trace(cov.mat()), s.eigenvalues);
}

namespace {

// Assembles V diag(weights) V^T, symmetrized.
SymmetricMatrix assemble_from_eigvec_weights(const Spectrum& s,
                                             const std::vector<double>& weights) {
  const std::size_t n = s.eigenvalues.size();
  Matrix vd(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) vd(i, j) = s.eigenvectors(i, j) * weights[j];
  }
  return SymmetricMatrix(vd * transpose(s.eigenvectors));
}

}  // namespace

SymmetricMatrix objective_grad_cov(const ObjectiveSpec& spec, const SymmetricMatrix& posterior) {
  const std::size_t n = posterior.dim();
  validate_index(spec, n);
  if (spec.kind == ObjectiveKind::kTrace) {
    return SymmetricMatrix(Matrix::identity(n));
  }

  const Spectrum s = sym_eigen(posterior);
  const std::vector<double>& lam = s.eigenvalues;
  std::vector<double> weights(n, 0.0);

  switch (spec.kind) {
    case ObjectiveKind::kTrace:
      break;  // handled above
    case ObjectiveKind::kDet: {
      // d det / d lambda_j = prod of the other eigenvalues
      const auto sub = esym_excluding_each(lam);
      for (std::size_t j = 0; j < n; ++j) weights[j] = sub[j][n - 1];
      break;
    }
    case ObjectiveKind::kSmallestEig: {
      if (n >= 2 && lam[1] - lam[0] <= 1e-8 * lam[n - 1]) {
        throw DegenerateEigenvalue(
            "SmallestEig gradient: smallest eigenvalue is (nearly) repeated");
      }
      weights[0] = 1.0;
      break;
    }
    case ObjectiveKind::kCharMag:
    case ObjectiveKind::kLogCharMag: {
      if (!std::isfinite(spec.lambda)) {
        throw std::invalid_argument("CharMag/LogCharMag: lambda not finite");
      }
      // Phi(lambda) = prod (lambda - lambda_l):
      //   d log|Phi| / d lambda_j = 1 / (lambda_j - lambda)
      //   d |Phi| / d lambda_j    = -sign(Phi) prod_{l != j} (lambda - lambda_l)
      if (spec.kind == ObjectiveKind::kLogCharMag) {
        double mag = 1.0;
        for (double l : lam) mag *= std::abs(spec.lambda - l);
        if (mag < 1e-300) {
          throw EvalAtEigenvalue("LogCharMag gradient: lambda is at an eigenvalue");
        }
        for (std::size_t j = 0; j < n; ++j) weights[j] = 1.0 / (lam[j] - spec.lambda);
      } else {
        double phi = 1.0;
        for (double l : lam) phi *= (spec.lambda - l);
        const double sgn = sign_of(phi);
        for (std::size_t j = 0; j < n; ++j) {
          double prod = 1.0;
          for (std::size_t l = 0; l < n; ++l) {
            if (l != j) prod *= (spec.lambda - lam[l]);
          }
          weights[j] = -sgn * prod;
        }
      }
      break;
    }
    case ObjectiveKind::kCoefficientMag: {
      // |a_i| = |e_{n-i}| of the eigenvalues; the stored coefficient carries
      // the alternating sign, so differentiate e_{n-i} and apply its sign.
      const std::size_t k = n - spec.index;
      const std::vector<double> e = elem_sym_polys(lam);
      const double sgn = sign_of(e[k - 1]);
      const auto sub = esym_excluding_each(lam);
      for (std::size_t j = 0; j < n; ++j) weights[j] = sgn * sub[j][k - 1];
      break;
    }
    case ObjectiveKind::kElemSym: {
      const auto sub = esym_excluding_each(lam);
      for (std::size_t j = 0; j < n; ++j) weights[j] = sub[j][spec.index - 1];
      break;
    }
    case ObjectiveKind::kCoeffAbsSum: {
      // sum_i |a_i| = sum_k |e_k|; e_0 contributes nothing to the gradient.
      const std::vector<double> e = elem_sym_polys(lam);
      const auto sub = esym_excluding_each(lam);
      for (std::size_t j = 0; j < n; ++j) {
        double w = 0.0;
        for (std::size_t k = 1; k <= n; ++k) w += sign_of(e[k - 1]) * sub[j][k - 1];
        weights[j] = w;
      }
      break;
    }
    case ObjectiveKind::kSymmetricPoly: {
      validate_sympoly(spec.poly, n);
      const std::vector<double> e = elem_sym_polys(lam);
      std::vector<double> dphi_de(n, 0.0);
      for (const SymPolyTerm& t : spec.poly.terms) {
        for (std::size_t k = 0; k < n; ++k) {
          const int ek = t.exponents[k];
          if (ek == 0) continue;
          double partial = t.coefficient * ek * int_pow(e[k], ek - 1);
          for (std::size_t l = 0; l < n; ++l) {
            if (l != k) partial *= int_pow(e[l], t.exponents[l]);
          }
          dphi_de[k] += partial;
        }
      }
      const auto sub = esym_excluding_each(lam);
      for (std::size_t j = 0; j < n; ++j) {
        double w = 0.0;
        for (std::size_t k = 0; k < n; ++k) w += dphi_de[k] * sub[j][k];
        weights[j] = w;
      }
      break;
    }
  }
  return assemble_from_eigvec_weights(s, weights);
}

Matrix objective_grad_gain(const KalmanProblem& prob, const GainMatrix& gain,
                           const ObjectiveSpec& spec) {
  const SymmetricMatrix posterior = posterior_cov(prob, gain);
  const SymmetricMatrix w = objective_grad_cov(spec, posterior);
  const Matrix g = gain_residual(prob, gain);
  return 2.0 * (w.mat() * g);
}

CharPolyCoeffs coefficient_vector(const KalmanProblem& prob, const GainMatrix& gain) {
  const Spectrum s = sym_eigen(posterior_cov(prob, gain));
  return char_poly_from_spectrum(s);
}

}  // namespace gaincert
