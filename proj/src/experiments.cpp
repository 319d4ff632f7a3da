#include "cpca/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "cpca/covariance.hpp"
#include "cpca/kernels.hpp"
#include "cpca/pcr.hpp"
#include "cpca/select.hpp"

namespace cpca {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix center_with(const Matrix& x, const Vector& means) {
  Matrix c = x;
  const auto& k = kern::active();
  for (std::size_t i = 0; i < c.rows(); ++i) k.axpy(-1.0, means.data(), c.row(i), c.cols());
  return c;
}

struct RepOutput {
  std::vector<SimRow> rows;
  RepDetail detail;
};

RepOutput run_replication(const SimOptions& opt, std::size_t rep) {
  RepOutput out;
  out.detail.rep = rep;
  const std::uint64_t seed_rep = Rng::derive(opt.seed, rep);

  SimPanel panel = gen_example(opt.example, seed_rep);
  const SimTruth& truth = panel.truth;

  FitConfig cfg;
  cfg.tau = opt.tau;
  cfg.eta = opt.eta;
  cfg.max_iterations = opt.max_iterations;
  cfg.seed = seed_rep;
  cfg.common_effect = truth.r_c > 0;

  const Centered ctr = center_columns(panel.train);
  const Matrix& x_train = ctr.data.values;
  const Matrix x_test = center_with(panel.test.values, ctr.means);

  CpcaModel m_f = fit(panel.train, cfg);
  CpcaModel m_i = fit_initial(panel.train, cfg);
  out.detail.converged = m_f.trace.converged;

  // Whole-panel PCA baseline.
  const auto pca_full = pca(x_train, std::min(x_train.rows(), x_train.cols()));
  const std::size_t r_pca = ratio_select(
      pca_full.eigenvalues, std::min(default_ratio_cap(x_train.rows(), x_train.cols()),
                                     pca_full.eigenvalues.size() - 1));
  const auto pca_fit = truncate_pca(pca_full, r_pca);

  const double msre_f = msre(recover(m_f, x_test), x_test);
  const double msre_i = msre(recover(m_i, x_test), x_test);
  const Matrix pca_scores_test = matmul(x_test, pca_fit.loadings);
  const double msre_p = msre(matmul_nt(pca_scores_test, pca_fit.loadings), x_test);

  const CovarianceEstimate cov_f = cpca_cov(m_f);
  const CovarianceEstimate cov_i = cpca_cov(m_i);
  const CovarianceEstimate cov_p = pca_cov(panel.train, r_pca);
  const CovarianceEstimate cov_poet =
      poet_cov(panel.train, r_pca, poet_default_threshold(panel.train.n(), panel.train.p()));
  const double ed_f = frob_distance(cov_f.sigma, truth.sigma_pop);
  const double ed_i = frob_distance(cov_i.sigma, truth.sigma_pop);
  const double ed_p = frob_distance(cov_p.sigma, truth.sigma_pop);
  const double ed_t = frob_distance(cov_poet.sigma, truth.sigma_pop);

  const double ari_f = adjusted_rand_index(m_f.partition.labels, truth.partition.labels);
  const double ari_i = adjusted_rand_index(m_i.partition.labels, truth.partition.labels);
  out.detail.initial_ari =
      adjusted_rand_index(m_f.trace.partitions.front(), truth.partition.labels);
  out.detail.final_ari = ari_f;

  // Separation property on components estimated over the true partition.
  {
    CpcaModel m_truth = fit_on_partition(panel.train, truth.partition, cfg);
    Matrix xc = x_train;
    if (m_truth.r_c > 0) xc = x_train - matmul_nt(matmul(x_train, m_truth.phi), m_truth.phi);
    out.detail.separation = separation_check(m_truth, xc).fraction_own_minimal;
  }

  out.detail.msre_cpca_f = msre_f;
  out.detail.msre_cpca_i = msre_i;
  out.detail.msre_pca = msre_p;
  out.detail.total_pcs_cpca_f = static_cast<double>(m_f.total_components());
  out.detail.ed_cpca_f = ed_f;
  out.detail.ed_pca = ed_p;
  out.detail.ed_poet = ed_t;

  double mspe_i_ols = kNaN, mspe_f_ols = kNaN, mspe_p_ols = kNaN;
  double mspe_i_g = kNaN, mspe_f_g = kNaN;
  if (opt.pcr) {
    Rng rng_y(Rng::derive(seed_rep, 7001));
    const Vector y_all = gen_pcr_response(truth, truth.scores, std::min(opt.example, 3), rng_y);
    const std::size_t n = truth.n;
    const Vector y_train(y_all.begin(), y_all.begin() + static_cast<std::ptrdiff_t>(n));
    const Vector y_test(y_all.begin() + static_cast<std::ptrdiff_t>(n), y_all.end());

    auto eval_model = [&](const CpcaModel& m, double& ols_out, double& lasso_out) {
      const PcrDesign dtr = model_design(m);
      const PcrDesign dte = model_design(m, x_test);
      try {
        const OlsFit ols = fit_ols_pcr(dtr, y_train);
        ols_out = mspe(predict(dte, ols.coef, ols.intercept), y_test);
      } catch (const InvalidInput&) {
        ols_out = kNaN;  // rank-deficient design on this draw
      }
      const double lam = cv_lambda(dtr, y_train, opt.cv_folds);
      const GroupLassoFit gl = fit_group_lasso(dtr, y_train, lam);
      lasso_out = mspe(predict(dte, gl.coef, gl.intercept), y_test);
    };
    eval_model(m_f, mspe_f_ols, mspe_f_g);
    eval_model(m_i, mspe_i_ols, mspe_i_g);

    const PcrDesign dtr_p = make_design(pca_fit.scores, {});
    const PcrDesign dte_p = make_design(pca_scores_test, {});
    try {
      const OlsFit ols = fit_ols_pcr(dtr_p, y_train);
      mspe_p_ols = mspe(predict(dte_p, ols.coef, ols.intercept), y_test);
    } catch (const InvalidInput&) {
      mspe_p_ols = kNaN;
    }
    out.detail.mspe_cpca_f = mspe_f_ols;
    out.detail.mspe_cpca_f_g = mspe_f_g;
    out.detail.mspe_pca = mspe_p_ols;
  }

  auto push = [&](const std::string& method, double n_pcs, double v_msre, double v_mspe,
                  double v_ed, double v_ari) {
    out.rows.push_back({rep, method, n_pcs, v_msre, v_mspe, v_ed, v_ari});
  };
  push("cpca_i", static_cast<double>(m_i.total_components()), msre_i, mspe_i_ols, ed_i, ari_i);
  push("cpca_f", static_cast<double>(m_f.total_components()), msre_f, mspe_f_ols, ed_f, ari_f);
  push("pca", static_cast<double>(r_pca), msre_p, mspe_p_ols, ed_p, kNaN);
  push("poet", static_cast<double>(r_pca), kNaN, kNaN, ed_t, kNaN);
  if (opt.pcr) {
    push("cpca_i_g", static_cast<double>(m_i.total_components()), kNaN, mspe_i_g, kNaN, ari_i);
    push("cpca_f_g", static_cast<double>(m_f.total_components()), kNaN, mspe_f_g, kNaN, ari_f);
  }
  return out;
}

}  // namespace

SimResults run_simulation(const SimOptions& opt) {
  if (opt.example < 1 || opt.example > 4) throw InvalidInput("simulate: example must be 1..4");
  if (opt.reps < 1) throw InvalidInput("simulate: reps must be >= 1");

  std::vector<RepOutput> outputs(opt.reps);
  const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
  if (jobs == 1) {
    for (std::size_t r = 0; r < opt.reps; ++r) outputs[r] = run_replication(opt, r);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t r = next.fetch_add(1);
        if (r >= opt.reps) return;
        outputs[r] = run_replication(opt, r);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(jobs, opt.reps); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SimResults res;
  for (auto& o : outputs) {
    for (auto& row : o.rows) res.rows.push_back(std::move(row));
    res.details.push_back(o.detail);
  }
  return res;
}

std::vector<MethodSummary> summarize(const SimResults& results) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SimRow*>> by_method;
  for (const auto& row : results.rows) {
    if (!by_method.count(row.method)) order.push_back(row.method);
    by_method[row.method].push_back(&row);
  }

  auto mean_se = [](const std::vector<const SimRow*>& rows, double SimRow::*field, double& mean,
                    double& se) {
    std::vector<double> vals;
    for (const auto* r : rows) {
      const double v = r->*field;
      if (std::isfinite(v)) vals.push_back(v);
    }
    if (vals.empty()) {
      mean = kNaN;
      se = kNaN;
      return;
    }
    double acc = 0.0;
    for (double v : vals) acc += v;
    mean = acc / static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    se = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
  };

  std::vector<MethodSummary> out;
  for (const auto& m : order) {
    MethodSummary s;
    s.method = m;
    const auto& rows = by_method[m];
    mean_se(rows, &SimRow::n_pcs, s.mean_n_pcs, s.se_n_pcs);
    mean_se(rows, &SimRow::msre, s.mean_msre, s.se_msre);
    mean_se(rows, &SimRow::mspe, s.mean_mspe, s.se_mspe);
    mean_se(rows, &SimRow::cov_ed, s.mean_cov_ed, s.se_cov_ed);
    mean_se(rows, &SimRow::ari_vs_truth, s.mean_ari, s.se_ari);
    out.push_back(s);
  }
  return out;
}

}  // namespace cpca
