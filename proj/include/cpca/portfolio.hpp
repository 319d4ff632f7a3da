#pragma once

#include <string>
#include <vector>

#include "cpca/covariance.hpp"
#include "cpca/engine.hpp"
#include "cpca/matrix.hpp"

namespace cpca {

// Global minimum-variance weights w = Sigma^-1 1 / (1^T Sigma^-1 1);
// short positions allowed.
Vector mvp_weights(const CovarianceEstimate& sigma);

struct PerformanceMetrics {
  double std_dev = 0.0;
  double information_ratio = 0.0;
  double sharpe_ratio = 0.0;
  bool defined = true;  // false when the series has no variation
};

PerformanceMetrics performance_metrics(const Vector& daily_returns, double risk_free);

enum class CovMethod { cpca, pca, poet, sample };

CovMethod cov_method_from_string(const std::string& s);
std::string to_string(CovMethod m);

struct BacktestConfig {
  CovMethod method = CovMethod::cpca;
  std::size_t window = 110;
  std::size_t refit_every = 1;   // weights refreshed every k days
  bool warm_start = true;        // reuse the previous window's partition
  double risk_free = 0.0;
  double tau = 0.95;
  double eta = 0.95;
  std::size_t max_iterations = 20;
};

struct BacktestResult {
  Vector series;                      // out-of-sample portfolio returns
  std::vector<Vector> weights;        // weights used on each day
  PerformanceMetrics metrics;
  std::size_t window = 0;
  std::string method;
  bool warm_start = false;
  std::vector<std::string> events;    // estimator failures, carried weights
};

// Daily walk-forward: for each day past the window, estimate the
// covariance on the trailing window and realize w^T r. An estimator
// failure keeps the previous weights and logs the event.
BacktestResult rolling_backtest(const DataMatrix& returns, const BacktestConfig& cfg);

}  // namespace cpca
