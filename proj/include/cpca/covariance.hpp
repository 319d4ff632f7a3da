#pragma once

#include <string>

#include "cpca/engine.hpp"
#include "cpca/matrix.hpp"

namespace cpca {

struct CovarianceEstimate {
  Matrix sigma;        // p x p, symmetric
  std::string method;  // cpca | pca | poet | sample
  double ridge = 0.0;  // diagonal added to restore definiteness
  bool psd_repaired = false;
};

// Low-rank common part + block per-cluster part + per-cluster noise
// diagonal, assembled from the fitted scores' sample variances.
CovarianceEstimate cpca_cov(const CpcaModel& model);

// Whole-panel PCA part plus a homoscedastic diagonal from the trailing
// spectrum. r = min(n, p) reproduces the sample covariance.
CovarianceEstimate pca_cov(const DataMatrix& x, std::size_t r);

// PCA part plus the entrywise soft-thresholded residual covariance with
// an untouched diagonal. `threshold` is on the residual correlation
// scale; poet_default_threshold gives 0.5 * sqrt(log(p) / n).
CovarianceEstimate poet_cov(const DataMatrix& x, std::size_t r, double threshold);
double poet_default_threshold(std::size_t n, std::size_t p);

CovarianceEstimate sample_cov(const DataMatrix& x);

// Squared Frobenius distance ||a - b||_F^2.
double frob_distance(const Matrix& a, const Matrix& b);

struct PrecisionResult {
  Matrix inverse;
  bool flagged = false;  // ridge was needed (indefinite or cond > 1e12)
  double ridge = 0.0;
};

PrecisionResult precision(const CovarianceEstimate& est);

}  // namespace cpca
