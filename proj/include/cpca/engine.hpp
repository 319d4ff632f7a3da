#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpca/cluster.hpp"
#include "cpca/matrix.hpp"
#include "cpca/pca.hpp"

namespace cpca {

// Per-cluster factorization of the final complement: scores f (n x r),
// loadings gamma over the member columns, residual variance sigma2.
struct ClusterComponents {
  std::vector<std::size_t> members;
  Matrix f;
  Matrix gamma;
  std::size_t r = 0;
  double sigma2 = 0.0;
};

struct IterationTrace {
  std::vector<double> ari;                              // per iteration
  std::vector<std::size_t> clusters_per_iter;           // J after each sweep
  std::vector<std::size_t> rc_per_iter;                 // common rank per iteration
  std::vector<std::vector<std::size_t>> partitions;     // labels, initial first
  std::size_t iterations = 0;
  bool converged = false;
};

// Common components plus per-cluster components of one fitted panel.
struct CpcaModel {
  Matrix g;    // n x r_c common scores (zero columns when no common effect)
  Matrix phi;  // p x r_c common loadings, orthonormal
  std::size_t r_c = 0;
  ClusterPartition partition;
  std::vector<ClusterComponents> clusters;  // indexed by cluster id - 1
  Vector means;
  std::vector<std::string> column_ids;
  IterationTrace trace;
  std::string variant;  // "cpca_f" or "cpca_i"

  std::size_t p() const { return phi.rows(); }
  std::size_t total_components() const;
};

struct FitConfig {
  double tau = 0.95;   // singleton threshold on normalized SSR
  double eta = 0.95;   // ARI stopping threshold
  std::size_t max_iterations = 20;
  std::size_t r_cap_common = 0;   // 0: floor(min(n, p) / 2)
  std::size_t r_cap_cluster = 0;  // 0: per-cluster floor(min(n, p_j) / 2)
  std::uint64_t seed = 0;         // provenance only; the fit is deterministic
  bool common_effect = true;      // false: cluster the panel directly
  const ClusterPartition* initial_partition = nullptr;  // warm start

  void validate() const;
};

struct InitialStep {
  Matrix g0;
  Matrix phi0;
  std::size_t r0 = 0;
  Matrix xc0;
  ClusterPartition partition0;
};

// Rank of a centered panel by the eigenvalue-ratio rule under the
// whole-panel cap (or an explicit one).
std::size_t whole_panel_rank(const Matrix& x_centered, std::size_t r_cap = 0);

// Whole-panel PCA with the ratio rule, complement, and a max-gap cut of
// the average-linkage tree on 1 - |corr| of the complement.
InitialStep initial_step(const Matrix& x_centered, std::size_t r_cap = 0);

struct TwoLayer {
  Matrix g;    // n x r_c
  Matrix phi;  // p x r_c, orthonormal
  Matrix xc;   // complement X - G Phi^T
  Matrix psi;  // n x Q stacked per-cluster scores
  Matrix h;    // Q x r_c second-layer loadings
  std::size_t r_c = 0;
  std::vector<std::size_t> per_cluster_rank;  // components stacked per cluster
};

// Per-cluster PCA stacked and re-factored: the second layer extracts the
// directions shared across clusters. Clusters need >= 2 members.
TwoLayer two_layer_pca(const Matrix& x_centered, const ClusterPartition& partition,
                       std::size_t r_cap_common = 0, std::size_t r_cap_cluster = 0);

// Full pipeline on a raw panel: center, initialize, alternate the
// two-layer refit with leave-one-out reassignment until the partitions
// agree (ARI >= eta), then extract final components. Non-convergence is
// flagged on the trace, not an error.
CpcaModel fit(const DataMatrix& x, const FitConfig& cfg);

// Initialization-only variant: whole-panel PCA for the common effect and
// one hierarchical clustering pass, no iterations.
CpcaModel fit_initial(const DataMatrix& x, const FitConfig& cfg);

// Components estimated on a caller-supplied partition, no reassignment.
CpcaModel fit_on_partition(const DataMatrix& x, const ClusterPartition& partition,
                           const FitConfig& cfg);

enum class RecoverMode { full, common_only };

// Two-stage recovery of a centered panel: common projection, then the
// per-cluster projection of what the common part leaves behind.
Matrix recover(const CpcaModel& model, const Matrix& x_new_centered,
               RecoverMode mode = RecoverMode::full);

// Mean squared recovering error ||a - b||_F^2 / (n p).
double msre(const Matrix& recovered, const Matrix& truth);

struct SeparationReport {
  double fraction_own_minimal = 0.0;
  Matrix pair_confusion;  // (l, d): share of cluster-l variables beaten by d
  Matrix pair_margin;     // (l, d): mean SSR_d - SSR_own over cluster l
  // cluster pairs whose components predict each other's variables about
  // as well as their own (mean margin below 0.05)
  std::vector<std::pair<std::size_t, std::size_t>> ambiguous_pairs;
};

// Finite-sample separation check: for every variable, is the normalized
// SSR against its own cluster's components strictly the smallest?
SeparationReport separation_check(const CpcaModel& model, const Matrix& xc);

}  // namespace cpca
