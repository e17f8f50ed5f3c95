#pragma once

#include <vector>

#include "gaincert/matrix.hpp"
#include "gaincert/spectral.hpp"

namespace gaincert {

// Coefficients a_0..a_n of a monic degree-n polynomial, ascending powers.
struct CharPolyCoeffs {
  std::vector<double> coeffs;
  std::size_t degree() const { return coeffs.size() - 1; }
};

// Coefficients of prod_i (x - roots[i]); monic by construction.
CharPolyCoeffs char_poly_from_roots(const std::vector<double>& roots);

// Characteristic polynomial of the matrix behind a spectrum.
CharPolyCoeffs char_poly_from_spectrum(const Spectrum& s);

// Characteristic polynomial by the trace recursion, without any
// eigendecomposition. Kept as an independent oracle; numerically fragile for
// large dimensions.
CharPolyCoeffs char_poly_faddeev(const Matrix& a);

// Horner evaluation of sum_i a_i x^i.
double eval_poly(const CharPolyCoeffs& c, double x);

// Elementary symmetric polynomials e_1..e_n, by incremental multiplication of
// the factors (1 + v t).
std::vector<double> elem_sym_polys(const std::vector<double>& values);

// Power sums p_k = sum_i values[i]^k for k = 1..n.
std::vector<double> power_sums(const std::vector<double>& values);

}  // namespace gaincert
