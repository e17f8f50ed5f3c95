#include "gaincert/polynomial.hpp"

#include <cstddef>
#include <stdexcept>

namespace gaincert {

CharPolyCoeffs char_poly_from_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    next[0] = -r * c[0];
    for (std::size_t k = 1; k < c.size(); ++k) next[k] = c[k - 1] - r * c[k];
    next[c.size()] = c.back();
    c = std::move(next);
  }
  return CharPolyCoeffs{std::move(c)};
}

CharPolyCoeffs char_poly_from_spectrum(const Spectrum& s) {
  return char_poly_from_roots(s.eigenvalues);
}

CharPolyCoeffs char_poly_faddeev(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("char_poly_faddeev: matrix not square");
  }
  const std::size_t n = a.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix m(n, n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
    const Matrix am = a * m;
    c[n - k] = -trace(am) / static_cast<double>(k);
  }
  return CharPolyCoeffs{std::move(c)};
}

double eval_poly(const CharPolyCoeffs& c, double x) {
  double r = 0.0;
  for (std::size_t i = c.coeffs.size(); i-- > 0;) r = r * x + c.coeffs[i];
  return r;
}

std::vector<double> elem_sym_polys(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  std::size_t used = 0;
  for (double v : values) {
    ++used;
    for (std::size_t k = used; k >= 1; --k) e[k] += v * e[k - 1];
  }
  return std::vector<double>(e.begin() + 1, e.end());
}

std::vector<double> power_sums(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> p(n, 0.0);
  for (double v : values) {
    double pw = v;
    for (std::size_t k = 0; k < n; ++k) {
      p[k] += pw;
      pw *= v;
    }
  }
  return p;
}

}  // namespace gaincert
