#pragma once

#include <cstddef>
#include <vector>

#include "cpca/matrix.hpp"

namespace cpca {

// Assignment of p variables to clusters 1..J. Labels are contiguous:
// every id in 1..J occurs at least once.
struct ClusterPartition {
  std::vector<std::size_t> labels;        // 1-based cluster ids, length p
  std::size_t J = 0;
  std::vector<bool> singleton_flags;      // variables split off by the tau rule

  std::size_t p() const { return labels.size(); }
  std::vector<std::size_t> members(std::size_t id) const;
  void validate() const;
};

// Relabels arbitrary ids to 1..J in order of first appearance.
ClusterPartition compact_partition(const std::vector<std::size_t>& raw_labels,
                                   const std::vector<bool>& flags = {});

// Agglomerative average-linkage merge tree. Leaves are 0..p-1; the t-th
// merge creates node p+t. Heights are non-decreasing.
struct Dendrogram {
  struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
  };
  std::size_t p = 0;
  std::vector<Merge> merges;  // p-1 entries
};

Dendrogram hierarchical_cluster(const Matrix& dissimilarity);

// Partition obtained by undoing the last J-1 merges.
ClusterPartition cut_at(const Dendrogram& dend, std::size_t J);

// Number of clusters at the largest height increment along the merge
// sequence; ties resolve to the smallest J, and J >= 2 always.
ClusterPartition cut_by_max_gap(const Dendrogram& dend);

struct LooDiagnostics {
  std::size_t donor_too_small = 0;     // candidate clusters skipped (< 2 members)
  std::size_t degenerate_columns = 0;  // zero-energy columns left in place
  std::size_t spawned = 0;             // singletons created by the tau rule
  std::size_t moved = 0;               // variables whose label changed
};

// One leave-one-out reassignment sweep over all variables in ascending
// column order, labels updated immediately. `xc` is the centered
// complement panel; `ranks[j-1]` is the component count for cluster j
// (0 = estimate from the cluster's spectrum). A variable whose best
// normalized SSR exceeds tau becomes its own cluster.
ClusterPartition loo_pcr_assign(const Matrix& xc, const ClusterPartition& current,
                                const std::vector<std::size_t>& ranks, double tau,
                                LooDiagnostics* diag = nullptr);

// Hubert-Arabie adjusted Rand index between two partitions of the same
// variables. 1 for identical partitions (up to relabeling).
double adjusted_rand_index(const ClusterPartition& a, const ClusterPartition& b);
double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

// SSR of the least-squares fit of y on mutually orthogonal score columns,
// divided by ||y||^2; always in [0, 1] for centered data.
double orthogonal_projection_nssr(const Matrix& scores, const Vector& y);

}  // namespace cpca
