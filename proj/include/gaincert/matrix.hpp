#pragma once

#include <cstddef>
#include <vector>

namespace gaincert {

// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const std::vector<double>& entries() const { return entries_; }
  std::vector<double>& entries() { return entries_; }

 private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> entries_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix transpose(const Matrix& a);
double max_norm(const Matrix& a);
double frobenius_norm(const Matrix& a);
double trace(const Matrix& a);

// Symmetric matrix. Construction symmetrizes the input as (A + A^T)/2, so the
// stored entries satisfy (i,j) == (j,i) exactly.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Matrix& a);
  static SymmetricMatrix from_diag(const std::vector<double>& diag);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

// Symmetric positive definite matrix, certified by a successful Cholesky
// factorization at construction. The lower factor is kept for solves.
class SpdMatrix {
 public:
  explicit SpdMatrix(SymmetricMatrix a);

  std::size_t dim() const { return m_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const SymmetricMatrix& sym() const { return m_; }
  const Matrix& chol() const { return chol_; }

 private:
  SymmetricMatrix m_;
  Matrix chol_;
};

// Lower-triangular Cholesky factor of a symmetric matrix. Throws
// NotPositiveDefinite if any pivot is at or below dim * eps * max|A_ij|.
Matrix cholesky(const SymmetricMatrix& a);

// Solves A X = B for SPD A via the cached Cholesky factor, with one step of
// iterative refinement.
Matrix solve_spd(const SpdMatrix& a, const Matrix& b);

}  // namespace gaincert
