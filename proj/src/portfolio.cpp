#include "cpca/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cpca/kernels.hpp"
#include "cpca/select.hpp"

namespace cpca {

Vector mvp_weights(const CovarianceEstimate& sigma) {
  const std::size_t p = sigma.sigma.rows();
  const PrecisionResult prec = precision(sigma);
  Vector ones(p, 1.0);
  Vector w = mat_vec(prec.inverse, ones);
  const double denom = kern::active().sum(w.data(), p);
  if (!(denom > 0.0)) {
    throw InvalidInput("mvp_weights: 1' Sigma^-1 1 not positive; input escaped repair");
  }
  kern::active().scal(1.0 / denom, w.data(), p);
  return w;
}

PerformanceMetrics performance_metrics(const Vector& series, double risk_free) {
  if (series.empty()) throw InvalidInput("performance_metrics: empty series");
  const double n = static_cast<double>(series.size());
  const double mean = kern::active().sum(series.data(), series.size()) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  PerformanceMetrics out;
  out.std_dev = series.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  // a constant series leaves round-off dust, not variation
  if (out.std_dev <= 1e-13 * (1.0 + std::abs(mean))) {
    out.defined = false;
    out.information_ratio = 0.0;
    out.sharpe_ratio = 0.0;
    return out;
  }
  out.information_ratio = mean / out.std_dev;
  out.sharpe_ratio = (mean - risk_free) / out.std_dev;
  return out;
}

CovMethod cov_method_from_string(const std::string& s) {
  if (s == "cpca") return CovMethod::cpca;
  if (s == "pca") return CovMethod::pca;
  if (s == "poet") return CovMethod::poet;
  if (s == "sample") return CovMethod::sample;
  throw InvalidInput("unknown covariance method '" + s + "'");
}

std::string to_string(CovMethod m) {
  switch (m) {
    case CovMethod::cpca: return "cpca";
    case CovMethod::pca: return "pca";
    case CovMethod::poet: return "poet";
    case CovMethod::sample: return "sample";
  }
  return "?";
}


BacktestResult rolling_backtest(const DataMatrix& returns, const BacktestConfig& cfg) {
  DataMatrix input = returns;
  input.validate();
  const std::size_t total = input.n();
  const std::size_t p = input.p();
  if (cfg.window >= total) throw InvalidInput("rolling_backtest: window must be < total days");
  if (cfg.window < 4) throw InvalidInput("rolling_backtest: window too small");
  if (cfg.refit_every < 1) throw InvalidInput("rolling_backtest: refit_every must be >= 1");

  BacktestResult out;
  out.window = cfg.window;
  out.method = to_string(cfg.method);
  out.warm_start = cfg.warm_start && cfg.method == CovMethod::cpca;
  out.series.reserve(total - cfg.window);

  std::optional<Vector> current_w;
  std::optional<ClusterPartition> prev_partition;

  for (std::size_t day = cfg.window; day < total; ++day) {
    const bool refit = (day - cfg.window) % cfg.refit_every == 0 || !current_w;
    if (refit) {
      // trailing window [day - window, day)
      DataMatrix win;
      win.column_ids = input.column_ids;
      win.values = Matrix(cfg.window, p);
      for (std::size_t i = 0; i < cfg.window; ++i) {
        std::copy(input.values.row(day - cfg.window + i),
                  input.values.row(day - cfg.window + i) + p, win.values.row(i));
      }
      try {
        CovarianceEstimate est;
        switch (cfg.method) {
          case CovMethod::sample:
            est = sample_cov(win);
            break;
          case CovMethod::pca: {
            const Matrix c = center_columns(win).data.values;
            est = pca_cov(win, whole_panel_rank(c));
            break;
          }
          case CovMethod::poet: {
            const Matrix c = center_columns(win).data.values;
            est = poet_cov(win, whole_panel_rank(c), poet_default_threshold(cfg.window, p));
            break;
          }
          case CovMethod::cpca: {
            FitConfig fc;
            fc.tau = cfg.tau;
            fc.eta = cfg.eta;
            fc.max_iterations = cfg.max_iterations;
            if (out.warm_start && prev_partition) fc.initial_partition = &*prev_partition;
            CpcaModel model = fit(win, fc);
            prev_partition = model.partition;
            est = cpca_cov(model);
            break;
          }
        }
        current_w = mvp_weights(est);
      } catch (const std::exception& e) {
        out.events.push_back("day " + std::to_string(day) + ": " + e.what() +
                             (current_w ? " (carrying previous weights)" : " (equal weights)"));
        if (!current_w) current_w = Vector(p, 1.0 / static_cast<double>(p));
      }
    }
    out.weights.push_back(*current_w);
    out.series.push_back(kern::active().dot(current_w->data(), input.values.row(day), p));
  }

  out.metrics = performance_metrics(out.series, cfg.risk_free);
  return out;
}

}  // namespace cpca
