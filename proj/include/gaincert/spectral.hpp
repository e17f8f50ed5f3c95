#pragma once

#include <vector>

#include "gaincert/matrix.hpp"

namespace gaincert {

// Eigendecomposition of a symmetric matrix: eigenvalues ascending, eigenvector
// columns aligned with them.
struct Spectrum {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

// Cyclic Jacobi eigensolver. Converged when the off-diagonal Frobenius norm
// drops to 1e-13 * ||A||_F; throws NoConvergence past the sweep budget.
Spectrum sym_eigen(const SymmetricMatrix& a);

// Same solver with an explicit sweep budget (sym_eigen uses 30).
Spectrum sym_eigen_budget(const SymmetricMatrix& a, std::size_t max_sweeps);

// True iff the smallest eigenvalue is at least -tol * max|A_ij|.
bool is_psd(const SymmetricMatrix& a, double tol);

}  // namespace gaincert
