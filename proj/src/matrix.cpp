#include "gaincert/matrix.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "gaincert/errors.hpp"

namespace gaincert {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: entry count does not match shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator+");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    out.entries()[i] = a.entries()[i] + b.entries()[i];
  }
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator-");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    out.entries()[i] = a.entries()[i] - b.entries()[i];
  }
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("operator*: inner dimensions do not match");
  }
  Matrix out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      out(i, j) = sum;
    }
  }
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i) out.entries()[i] = s * a.entries()[i];
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

double max_norm(const Matrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return std::sqrt(s);
}

double trace(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("trace: matrix not square");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

SymmetricMatrix::SymmetricMatrix(const Matrix& a) : m_(a.rows(), a.cols()) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("SymmetricMatrix: matrix not square");
  }
  if (a.rows() == 0) {
    throw std::invalid_argument("SymmetricMatrix: dimension must be at least 1");
  }
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    m_(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymmetricMatrix SymmetricMatrix::from_diag(const std::vector<double>& diag) {
  Matrix m(diag.size(), diag.size(), 0.0);
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return SymmetricMatrix(m);
}

SpdMatrix::SpdMatrix(SymmetricMatrix a) : m_(std::move(a)), chol_(cholesky(m_)) {}

Matrix cholesky(const SymmetricMatrix& a) {
  const std::size_t n = a.dim();
  const double pivot_floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_norm(a.mat());
  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= pivot_floor) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                " is not positive; matrix is not positive definite");
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

namespace {

// Solves L L^T X = B for one right-hand-side column set using the lower factor.
Matrix chol_solve(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows();
  Matrix x = b;
  for (std::size_t col = 0; col < b.cols(); ++col) {
    // forward: L y = b
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, col);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
      x(i, col) = s / l(i, i);
    }
    // backward: L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, col);
      x(ii, col) = s / l(ii, ii);
    }
  }
  return x;
}

}  // namespace

Matrix solve_spd(const SpdMatrix& a, const Matrix& b) {
  if (a.dim() != b.rows()) {
    throw std::invalid_argument("solve_spd: right-hand side has wrong row count");
  }
  Matrix x = chol_solve(a.chol(), b);
  // One refinement step keeps the residual near machine level even for
  // ill-conditioned instances.
  const Matrix r = b - a.sym().mat() * x;
  const Matrix dx = chol_solve(a.chol(), r);
  return x + dx;
}

}  // namespace gaincert
