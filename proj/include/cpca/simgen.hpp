#pragma once

#include <cstdint>
#include <vector>

#include "cpca/cluster.hpp"
#include "cpca/matrix.hpp"
#include "cpca/pca.hpp"
#include "cpca/rng.hpp"

namespace cpca {

// Regression weight placed on each component of the last cluster in the
// PCR designs; the remaining cluster groups carry zero weight.
inline constexpr double kPcrBetaLast = 0.75;

// Realized factor scores for all 2n generated observations.
struct TrueScores {
  Matrix g;                 // 2n x r_c (zero columns when no common effect)
  std::vector<Matrix> f;    // per cluster, 2n x r_j
};

// Ground truth behind one generated panel: frames, eigenvalue draws, the
// population covariance, the partition, and the regression coefficients.
struct SimTruth {
  std::size_t n = 0;  // per half (train/test)
  std::size_t p = 0;
  std::size_t r_c = 0;
  std::size_t J = 0;
  std::vector<std::size_t> cluster_sizes;
  ClusterPartition partition;
  Matrix phi;                      // p x r_c orthonormal
  Vector delta;                    // common eigenvalues, descending
  std::vector<Matrix> psi;         // per-cluster orthonormal frames p_j x r_j
  std::vector<Vector> lambda;      // per-cluster eigenvalues, descending
  Vector sigma;                    // per-cluster noise standard deviation
  Matrix sigma_pop;                // population covariance
  TrueScores scores;
  Vector alpha;                    // PCR weights on the common components
  Vector beta;                     // stacked PCR weights, sum r_j entries
  double theta = 1.0;              // PCR noise standard deviation

  std::size_t total_rank() const;
};

struct SimPanel {
  DataMatrix train;
  DataMatrix test;
  SimTruth truth;
};

// The four synthetic designs: spiked common components over five or ten
// clusters of twenty variables with two cluster factors each; design 4
// drops the common effect entirely.
//   1: n=50, p=100, J=5     2: n=30, p=100, J=5
//   3: n=50, p=200, J=10    4: n=30, p=100, J=5, no common effect
SimPanel gen_example(int id, std::uint64_t seed);

// Response y_i = g_i' alpha + sum_j f_ij' beta_j + noise for all 2n rows
// (the alpha term is absent when the truth has no common effect).
Vector gen_pcr_response(const SimTruth& truth, const TrueScores& scores, int example, Rng& rng,
                        double noise_sd = 1.0);

// Fresh draws from the truth's population (new scores and noise).
Matrix sample_from_truth(const SimTruth& truth, std::size_t rows, Rng& rng);

// Small block-factor panel on a daily-returns scale, used by the
// portfolio backtests.
DataMatrix gen_block_panel(std::size_t days, std::size_t p, std::size_t clusters,
                           std::size_t r_common, std::uint64_t seed, double scale = 0.01);

}  // namespace cpca
