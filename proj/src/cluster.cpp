#include "cpca/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "cpca/kernels.hpp"
#include "cpca/pca.hpp"
#include "cpca/select.hpp"

namespace cpca {

std::vector<std::size_t> ClusterPartition::members(std::size_t id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == id) out.push_back(i);
  }
  return out;
}

void ClusterPartition::validate() const {
  if (labels.empty()) throw InvalidInput("partition: empty");
  if (J == 0 || J > labels.size()) throw InvalidInput("partition: bad cluster count");
  std::vector<bool> seen(J, false);
  for (std::size_t l : labels) {
    if (l < 1 || l > J) throw InvalidInput("partition: label out of range");
    seen[l - 1] = true;
  }
  for (bool s : seen) {
    if (!s) throw InvalidInput("partition: unoccupied cluster id");
  }
}

ClusterPartition compact_partition(const std::vector<std::size_t>& raw,
                                   const std::vector<bool>& flags) {
  ClusterPartition out;
  out.labels.resize(raw.size());
  std::map<std::size_t, std::size_t> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(raw[i], remap.size() + 1);
    out.labels[i] = it->second;
  }
  out.J = remap.size();
  out.singleton_flags = flags.empty() ? std::vector<bool>(raw.size(), false) : flags;
  out.validate();
  return out;
}

Dendrogram hierarchical_cluster(const Matrix& d) {
  const std::size_t p = d.rows();
  if (d.cols() != p || p < 2) throw InvalidInput("hierarchical_cluster: need a square matrix, p >= 2");
  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(d(i, i)) > 1e-12) throw InvalidInput("hierarchical_cluster: nonzero diagonal");
    for (std::size_t j = 0; j < p; ++j) {
      if (d(i, j) < -1e-12) throw InvalidInput("hierarchical_cluster: negative dissimilarity");
      if (std::abs(d(i, j) - d(j, i)) > 1e-10) throw InvalidInput("hierarchical_cluster: asymmetric input");
    }
  }

  // Active-cluster Lance-Williams update for average linkage.
  struct Active {
    std::size_t node;   // dendrogram node id
    std::size_t size;
  };
  std::vector<Active> act(p);
  for (std::size_t i = 0; i < p; ++i) act[i] = {i, 1};
  Matrix dist = d;
  std::vector<bool> alive(p, true);

  Dendrogram out;
  out.p = p;
  out.merges.reserve(p - 1);

  for (std::size_t t = 0; t + 1 < p; ++t) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < p; ++j) {
        if (!alive[j]) continue;
        if (dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    out.merges.push_back({act[bi].node, act[bj].node, best});
    const double ni = static_cast<double>(act[bi].size);
    const double nj = static_cast<double>(act[bj].size);
    for (std::size_t kq = 0; kq < p; ++kq) {
      if (!alive[kq] || kq == bi || kq == bj) continue;
      const double merged = (ni * dist(bi, kq) + nj * dist(bj, kq)) / (ni + nj);
      dist(bi, kq) = merged;
      dist(kq, bi) = merged;
    }
    act[bi] = {p + t, act[bi].size + act[bj].size};
    alive[bj] = false;
  }
  return out;
}

ClusterPartition cut_at(const Dendrogram& dend, std::size_t J) {
  const std::size_t p = dend.p;
  if (J < 1 || J > p) throw InvalidInput("cut_at: J out of range");
  // union-find over the first p-J merges
  std::vector<std::size_t> parent(p + dend.merges.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t t = 0; t < p - J; ++t) {
    const auto& m = dend.merges[t];
    const std::size_t node = p + t;
    parent[find(m.left)] = node;
    parent[find(m.right)] = node;
  }
  std::vector<std::size_t> raw(p);
  for (std::size_t i = 0; i < p; ++i) raw[i] = find(i);
  return compact_partition(raw);
}

ClusterPartition cut_by_max_gap(const Dendrogram& dend) {
  const std::size_t p = dend.p;
  if (p == 2) return cut_at(dend, 2);
  // gap after merge t (1-based j): h_{j+1} - h_j, j = 1..p-2; keeping the
  // first j merges leaves p - j clusters. Ties go to the largest j, which
  // is the smallest J. Gaps early in the sequence (near-duplicate
  // variables merging at height ~0) would leave mostly singleton
  // clusters, which cannot carry components, so the search is limited to
  // cuts with J <= p/2.
  const std::size_t j_min = p - std::max<std::size_t>(2, p / 2);
  std::size_t best_j = std::max<std::size_t>(1, j_min);
  double best_gap = -1.0;
  for (std::size_t j = best_j; j + 1 <= dend.merges.size(); ++j) {
    const double gap = dend.merges[j].height - dend.merges[j - 1].height;
    if (gap >= best_gap) {
      best_gap = gap;
      best_j = j;
    }
  }
  // Among gaps within 10% of the winner, take the earliest: a cut that is
  // too fine is repaired by reassignment (clusters can merge), a cut that
  // is too coarse is not (they cannot split).
  for (std::size_t j = std::max<std::size_t>(1, j_min); j < best_j; ++j) {
    const double gap = dend.merges[j].height - dend.merges[j - 1].height;
    if (gap >= 0.9 * best_gap) {
      best_j = j;
      break;
    }
  }
  const std::size_t J = std::max<std::size_t>(2, p - best_j);
  return cut_at(dend, J);
}

double orthogonal_projection_nssr(const Matrix& scores, const Vector& y) {
  const auto& k = kern::active();
  const std::size_t n = y.size();
  const double tss = k.sumsq(y.data(), n);
  if (tss <= 0.0) return 0.0;
  double explained = 0.0;
  Vector col(n);
  for (std::size_t h = 0; h < scores.cols(); ++h) {
    for (std::size_t i = 0; i < n; ++i) col[i] = scores(i, h);
    const double ss = k.sumsq(col.data(), n);
    if (ss <= 0.0) continue;
    const double xy = k.dot(col.data(), y.data(), n);
    explained += xy * xy / ss;
  }
  const double ssr = std::max(0.0, tss - explained);
  return std::min(1.0, ssr / tss);
}

ClusterPartition loo_pcr_assign(const Matrix& xc, const ClusterPartition& current,
                                const std::vector<std::size_t>& ranks, double tau,
                                LooDiagnostics* diag) {
  current.validate();
  const std::size_t p = xc.cols();
  const std::size_t n = xc.rows();
  if (p != current.p()) throw InvalidInput("loo_pcr_assign: panel/partition size mismatch");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidInput("loo_pcr_assign: tau must be in (0, 1]");

  LooDiagnostics local;
  LooDiagnostics& dg = diag ? *diag : local;

  std::vector<std::size_t> labels = current.labels;
  std::vector<bool> flags(p, false);
  std::size_t max_id = current.J;

  std::vector<std::vector<std::size_t>> members(max_id + 1);
  for (std::size_t i = 0; i < p; ++i) members[labels[i]].push_back(i);

  std::vector<std::size_t> rank_hint(max_id + 1, 0);
  for (std::size_t j = 1; j <= current.J; ++j) {
    rank_hint[j] = (j - 1) < ranks.size() ? ranks[j - 1] : 0;
  }

  auto rank_for = [&](std::size_t id, const std::vector<std::size_t>& mem) -> std::size_t {
    std::size_t r = id < rank_hint.size() ? rank_hint[id] : 0;
    if (r == 0) {
      const Matrix sub = select_cols(xc, mem);
      const auto f = pca(sub, 1);
      r = iterative_ratio_select(f.eigenvalues, default_ratio_cap(n, mem.size()));
    }
    return std::clamp<std::size_t>(r, 1, std::min(n, mem.size()));
  };

  // Donor score fits are cached per cluster and invalidated when that
  // cluster's membership changes during the sweep.
  std::vector<std::optional<Matrix>> donor_cache(max_id + 1);

  const auto& krn = kern::active();
  for (std::size_t k = 0; k < p; ++k) {
    Vector y = xc.col(k);
    const double tss = krn.sumsq(y.data(), n);
    if (tss <= 1e-24) {
      ++dg.degenerate_columns;
      continue;
    }

    const std::size_t old_id = labels[k];
    double best_nssr = std::numeric_limits<double>::infinity();
    std::size_t best_id = 0;
    for (std::size_t j = 1; j <= max_id; ++j) {
      std::vector<std::size_t> mem;
      if (j == old_id) {
        mem.reserve(members[j].size());
        for (std::size_t v : members[j]) {
          if (v != k) mem.push_back(v);
        }
      } else {
        mem = members[j];
      }
      if (mem.size() < 2) {
        if (!members[j].empty()) ++dg.donor_too_small;
        continue;
      }
      double nssr;
      if (j == old_id) {
        const auto fit = pca(select_cols(xc, mem), rank_for(j, mem));
        nssr = orthogonal_projection_nssr(fit.scores, y);
      } else {
        if (!donor_cache[j]) {
          donor_cache[j] = pca(select_cols(xc, mem), rank_for(j, mem)).scores;
        }
        nssr = orthogonal_projection_nssr(*donor_cache[j], y);
      }
      if (nssr < best_nssr) {
        best_nssr = nssr;
        best_id = j;
      }
    }

    std::size_t new_id = old_id;
    if (best_id == 0) {
      // no usable candidate; variable stays put
    } else if (best_nssr > tau) {
      new_id = ++max_id;
      members.emplace_back();
      donor_cache.emplace_back();
      rank_hint.push_back(0);
      flags[k] = true;
      ++dg.spawned;
    } else {
      new_id = best_id;
    }

    if (new_id != old_id) {
      auto& old_mem = members[old_id];
      old_mem.erase(std::find(old_mem.begin(), old_mem.end(), k));
      members[new_id].push_back(k);
      std::sort(members[new_id].begin(), members[new_id].end());
      donor_cache[old_id].reset();
      donor_cache[new_id].reset();
      labels[k] = new_id;
      ++dg.moved;
    }
  }

  return compact_partition(labels, flags);
}

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) throw InvalidInput("adjusted_rand_index: length mismatch");
  if (a.empty()) throw InvalidInput("adjusted_rand_index: empty labels");
  const double n = static_cast<double>(a.size());

  std::map<std::pair<std::size_t, std::size_t>, double> cell;
  std::map<std::size_t, double> rowsum, colsum;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cell[{a[i], b[i]}] += 1.0;
    rowsum[a[i]] += 1.0;
    colsum[b[i]] += 1.0;
  }
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [k, v] : cell) sum_cells += comb2(v);
  for (const auto& [k, v] : rowsum) sum_rows += comb2(v);
  for (const auto& [k, v] : colsum) sum_cols += comb2(v);
  const double total = comb2(n);
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (std::abs(maximum - expected) < 1e-300) return 1.0;  // both degenerate
  return (sum_cells - expected) / (maximum - expected);
}

double adjusted_rand_index(const ClusterPartition& a, const ClusterPartition& b) {
  return adjusted_rand_index(a.labels, b.labels);
}

}  // namespace cpca
