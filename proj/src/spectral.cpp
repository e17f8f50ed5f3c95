#include "gaincert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gaincert/errors.hpp"

namespace gaincert {

namespace {

double off_diagonal_frobenius(const Matrix& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
  }
  return std::sqrt(2.0 * s);
}

}  // namespace

Spectrum sym_eigen_budget(const SymmetricMatrix& input, std::size_t max_sweeps) {
  const std::size_t n = input.dim();
  Matrix a = input.mat();
  Matrix v = Matrix::identity(n);

  const double norm = frobenius_norm(a);
  const double threshold = 1e-13 * norm;

  bool converged = (off_diagonal_frobenius(a) <= threshold);
  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = aip - s * (aiq + tau * aip);
          a(p, i) = a(i, p);
          a(i, q) = aiq + s * (aip - tau * aiq);
          a(q, i) = a(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
    converged = (off_diagonal_frobenius(a) <= threshold);
  }
  if (!converged) {
    throw NoConvergence("sym_eigen: off-diagonal norm above threshold after sweep budget");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

Spectrum sym_eigen(const SymmetricMatrix& a) { return sym_eigen_budget(a, 30); }

bool is_psd(const SymmetricMatrix& a, double tol) {
  if (tol < 0.0) throw std::invalid_argument("is_psd: tol must be nonnegative");
  const Spectrum s = sym_eigen(a);
  return s.eigenvalues.front() >= -tol * max_norm(a.mat());
}

}  // namespace gaincert
