#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpca/engine.hpp"
#include "cpca/simgen.hpp"

namespace cpca {

// One output row of the simulation harness; NaN marks a metric that a
// method does not produce.
struct SimRow {
  std::size_t rep = 0;
  std::string method;
  double n_pcs = 0.0;
  double msre = 0.0;
  double mspe = 0.0;
  double cov_ed = 0.0;
  double ari_vs_truth = 0.0;
};

// Per-replication quantities the acceptance suite consumes directly.
struct RepDetail {
  std::size_t rep = 0;
  double initial_ari = 0.0;      // hierarchical partition vs truth
  double final_ari = 0.0;        // converged partition vs truth
  double separation = 0.0;       // own-cluster-minimal fraction, truth-fitted
  double msre_cpca_f = 0.0;
  double msre_cpca_i = 0.0;
  double msre_pca = 0.0;
  double total_pcs_cpca_f = 0.0;
  double mspe_cpca_f = 0.0;
  double mspe_cpca_f_g = 0.0;
  double mspe_pca = 0.0;
  double ed_cpca_f = 0.0;
  double ed_pca = 0.0;
  double ed_poet = 0.0;
  bool converged = true;
};

struct SimOptions {
  int example = 1;          // 1..4
  bool pcr = false;         // Table-2 style run (adds MSPE and lasso rows)
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  double tau = 0.95;
  double eta = 0.95;
  std::size_t max_iterations = 20;
  std::size_t cv_folds = 10;
  std::size_t jobs = 1;
};

struct SimResults {
  std::vector<SimRow> rows;        // sorted by (rep, method order)
  std::vector<RepDetail> details;  // sorted by rep
};

SimResults run_simulation(const SimOptions& opt);

// Column-mean / standard-error summaries matching the result table.
struct MethodSummary {
  std::string method;
  double mean_n_pcs, se_n_pcs;
  double mean_msre, se_msre;
  double mean_mspe, se_mspe;
  double mean_cov_ed, se_cov_ed;
  double mean_ari, se_ari;
};

std::vector<MethodSummary> summarize(const SimResults& results);

}  // namespace cpca
