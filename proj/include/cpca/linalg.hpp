#pragma once

#include <vector>

#include "cpca/matrix.hpp"
#include "cpca/rng.hpp"

namespace cpca {

// Thin singular value factorization A = U * diag(sigma) * V^T with
// sigma sorted non-increasing. U is n x m and V is p x m with
// m = min(n, p); zero singular directions keep zero columns.
struct Svd {
  Matrix u;
  Matrix v;
  Vector sigma;
};

// One-sided Jacobi. Accurate for the small dense panels used here.
Svd svd(const Matrix& a);

// Symmetric eigendecomposition A = Q * diag(w) * Q^T, eigenvalues
// sorted non-increasing. Input must be symmetric.
struct SymEig {
  Matrix q;
  Vector w;
};

SymEig sym_eigen(const Matrix& a);

// Least squares min ||A x - b||_2 via Householder QR with column
// rank diagnostics.
struct LstSq {
  Vector coef;
  bool rank_deficient = false;
  std::vector<std::size_t> dependent_cols;  // columns with negligible pivot
};

LstSq lstsq(const Matrix& a, const Vector& b);

// Cholesky-based SPD solve of A X = B; throws if A is not positive
// definite (within round-off).
Matrix spd_solve(const Matrix& a, const Matrix& b);
Vector spd_solve(const Matrix& a, const Vector& b);

double determinant(Matrix a);  // by value: LU destroys the copy

// Haar-distributed orthonormal frame (rows x cols, cols <= rows) from the
// QR factorization of an i.i.d. standard normal draw, with the R diagonal
// made positive so the result is a deterministic function of the stream.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace cpca
