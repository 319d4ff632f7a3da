#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpca/linalg.hpp"
#include "cpca/matrix.hpp"

namespace cpca {

// Validation failures carry a human-readable diagnostic and map to the
// CLI's exit code 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An n x p panel: rows are observations, columns are variables.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> column_ids;

  std::size_t n() const { return values.rows(); }
  std::size_t p() const { return values.cols(); }

  // n >= 2, p >= 1, finite entries; fills default ids when absent.
  void validate();
};

DataMatrix make_panel(Matrix values, std::vector<std::string> ids = {});

// One PCA pass. Loadings hold the top-r eigenvectors of X^T X / n;
// eigenvalues carry the full min(n, p) spectrum regardless of r.
struct PcaFactorization {
  Matrix scores;      // n x r, equal to X * loadings
  Matrix loadings;    // p x r, orthonormal columns
  Vector eigenvalues; // min(n, p), non-increasing
  std::size_t r = 0;
};

struct Centered {
  DataMatrix data;
  Vector means;
};

// Subtracts each column's mean; the means are kept for test-time reuse.
Centered center_columns(const DataMatrix& x);

// PCA of a centered panel via singular value factorization. Sign
// convention: the largest-magnitude entry of every loading column is
// positive (first such entry on exact ties).
PcaFactorization pca(const DataMatrix& x, std::size_t r);
PcaFactorization pca(const Matrix& x, std::size_t r);

// First r components of an existing factorization; lets one SVD serve
// both the rank selection and the final fit.
PcaFactorization truncate_pca(const PcaFactorization& f, std::size_t r);

// Entrywise absolute empirical correlation; rejects zero-variance
// columns by name.
Matrix correlation_abs(const DataMatrix& x);

}  // namespace cpca
