#pragma once

#include <string>
#include <vector>

#include "cpca/engine.hpp"
#include "cpca/matrix.hpp"

namespace cpca {

// Stacked regression design: the common scores followed by each
// cluster's scores, with the grouping kept alongside.
struct PcrDesign {
  Matrix x;                                // n x total columns
  std::vector<std::size_t> group_sizes;    // one entry per group
  std::vector<std::string> group_names;

  std::size_t groups() const { return group_sizes.size(); }
  std::size_t total_cols() const { return x.cols(); }
  std::size_t group_offset(std::size_t g) const;
};

PcrDesign make_design(const Matrix& g, const std::vector<Matrix>& f_blocks);
// Train-time design straight from the fitted model.
PcrDesign model_design(const CpcaModel& model);
// Test-time design: project the centered panel through the stored
// loadings, then the complement through each cluster's loadings.
PcrDesign model_design(const CpcaModel& model, const Matrix& x_new_centered);

struct OlsFit {
  Vector coef;
  double intercept = 0.0;  // training response mean
};

// Least squares on the stacked design with the response centered by its
// training mean. Rank deficiency is an error naming the dependent columns.
OlsFit fit_ols_pcr(const PcrDesign& design, const Vector& y);

Vector predict(const PcrDesign& design, const Vector& coef, double intercept);

struct GroupLassoFit {
  Vector coef;                  // stacked, groups in design order
  Vector alpha;                 // common-group block
  std::vector<Vector> beta;     // one block per cluster group
  double lambda = 0.0;
  double intercept = 0.0;
  Vector objective_trace;       // one entry per sweep, non-increasing
  std::vector<bool> active;     // per group
  bool converged = false;
  std::size_t sweeps = 0;
};

// (1/2n) ||y - X theta||^2 + lambda * sum_g ||theta_g||_2, solved by block
// coordinate descent; every block update is the exact block minimizer, so
// the objective never increases.
GroupLassoFit fit_group_lasso(const PcrDesign& design, const Vector& y, double lambda);

// Smallest lambda whose solution is exactly zero.
double lambda_max(const PcrDesign& design, const Vector& y);

// Cross-validated penalty from a 50-point log grid on
// [lambda_max * 1e-4, lambda_max], contiguous folds, ties to the
// larger (sparser) penalty.
double cv_lambda(const PcrDesign& design, const Vector& y, std::size_t folds);

// (1/n) sum (yhat_i - y_i)^2
double mspe(const Vector& y_hat, const Vector& y);

}  // namespace cpca
