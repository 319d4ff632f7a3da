#include "cpca/engine.hpp"

#include <algorithm>
#include <cmath>

#include "cpca/kernels.hpp"
#include "cpca/select.hpp"

namespace cpca {

std::size_t CpcaModel::total_components() const {
  std::size_t total = r_c;
  for (const auto& c : clusters) total += c.r;
  return total;
}

void FitConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidInput("fit: tau must be in (0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("fit: eta must be in (0, 1]");
  if (max_iterations < 1) throw InvalidInput("fit: max_iterations must be >= 1");
}

namespace {

// 1 - |corr| with zero-variance columns treated as maximally dissimilar,
// so a degenerate complement (e.g. exactly low-rank data) still clusters.
Matrix dissimilarity_abs_corr(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  Vector mu = col_means(x);
  Matrix c = x;
  const auto& k = kern::active();
  for (std::size_t i = 0; i < n; ++i) k.axpy(-1.0, mu.data(), c.row(i), p);
  Matrix g = matmul_tn(c, c);
  Matrix d(p, p, 1.0);
  for (std::size_t i = 0; i < p; ++i) d(i, i) = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    if (g(i, i) <= 1e-24) continue;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (g(j, j) <= 1e-24) continue;
      const double r = std::min(1.0, std::abs(g(i, j)) / std::sqrt(g(i, i) * g(j, j)));
      d(i, j) = 1.0 - r;
      d(j, i) = d(i, j);
    }
  }
  return d;
}

ClusterPartition cluster_panel(const Matrix& x) {
  return cut_by_max_gap(hierarchical_cluster(dissimilarity_abs_corr(x)));
}

// Two-layer machinery that also accepts singleton clusters: a singleton
// contributes its own column to the stacked score panel with a unit
// loading, so the common extraction still covers every variable.
TwoLayer two_layer_impl(const Matrix& x, const ClusterPartition& part, std::size_t cap_common,
                        std::size_t cap_cluster, bool allow_singletons,
                        double spike_min = kSpikeRatio) {
  part.validate();
  const std::size_t n = x.rows(), p = x.cols();
  if (part.p() != p) throw InvalidInput("two_layer_pca: panel/partition size mismatch");

  std::vector<Matrix> pi_blocks(part.J);
  std::vector<std::vector<std::size_t>> members(part.J);
  TwoLayer out;
  out.per_cluster_rank.resize(part.J);

  Matrix psi(n, 0);
  for (std::size_t j = 1; j <= part.J; ++j) {
    members[j - 1] = part.members(j);
    const auto& mem = members[j - 1];
    if (mem.size() < 2) {
      if (!allow_singletons) {
        throw InvalidInput("two_layer_pca: cluster " + std::to_string(j) +
                           " has fewer than 2 members");
      }
      Matrix col(n, 1);
      for (std::size_t i = 0; i < n; ++i) col(i, 0) = x(i, mem[0]);
      psi = hcat(psi, col);
      pi_blocks[j - 1] = Matrix(1, 1);
      pi_blocks[j - 1](0, 0) = 1.0;
      out.per_cluster_rank[j - 1] = 1;
      continue;
    }
    const Matrix sub = select_cols(x, mem);
    const auto full = pca(sub, std::min(n, mem.size()));
    const std::size_t cap =
        cap_cluster ? cap_cluster : default_ratio_cap(n, mem.size());
    std::size_t q = 1;
    if (full.eigenvalues.size() >= 2) {
      q = iterative_ratio_select(full.eigenvalues, std::min(cap, full.eigenvalues.size() - 1), 8,
                                 spike_min);
    }
    q = std::clamp<std::size_t>(q, 1, std::min(n, mem.size()));
    const auto fit = truncate_pca(full, q);
    psi = hcat(psi, fit.scores);
    pi_blocks[j - 1] = fit.loadings;
    out.per_cluster_rank[j - 1] = q;
  }

  const std::size_t q_total = psi.cols();
  // A component common to all variables must show up in every cluster's
  // own factorization, so the weakest substantive cluster bounds r_c.
  // Clusters below 4 members cannot express more than a direction or two
  // and are left out of the bound, like singletons.
  std::size_t shared_cap = q_total;
  for (std::size_t j = 0; j < part.J; ++j) {
    if (members[j].size() >= 4) shared_cap = std::min(shared_cap, out.per_cluster_rank[j]);
  }
  std::size_t r_c = 1;
  const auto second = pca(psi, std::min(n, q_total));
  if (second.eigenvalues.size() >= 2) {
    std::size_t cap = cap_common ? cap_common : default_ratio_cap(n, q_total);
    cap = std::max<std::size_t>(1, std::min(cap, shared_cap));
    r_c = ratio_select(second.eigenvalues, std::min(cap, second.eigenvalues.size() - 1));
  }
  r_c = std::clamp<std::size_t>(r_c, 1, std::min(n, q_total));
  const auto second_fit = truncate_pca(second, r_c);
  const Matrix& h = second_fit.loadings;  // q_total x r_c

  // phi = Pi * H with Pi the block-diagonal loading assembly
  Matrix phi(p, r_c);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < part.J; ++j) {
    const Matrix& pi = pi_blocks[j];
    for (std::size_t a = 0; a < pi.rows(); ++a) {
      const std::size_t row = members[j][a];
      for (std::size_t c = 0; c < r_c; ++c) {
        double acc = 0.0;
        for (std::size_t b = 0; b < pi.cols(); ++b) acc += pi(a, b) * h(offset + b, c);
        phi(row, c) = acc;
      }
    }
    offset += pi.cols();
  }

  out.g = second_fit.scores;  // = psi * H = X * phi
  out.phi = phi;
  out.r_c = r_c;
  out.xc = x - matmul_nt(out.g, phi);
  out.psi = std::move(psi);
  out.h = second_fit.loadings;
  return out;
}

struct FinalExtraction {
  std::vector<ClusterComponents> clusters;
};

FinalExtraction extract_cluster_components(const Matrix& xc, const ClusterPartition& part,
                                           std::size_t cap_cluster, double spike_min) {
  const std::size_t n = xc.rows();
  FinalExtraction out;
  out.clusters.resize(part.J);
  for (std::size_t j = 1; j <= part.J; ++j) {
    ClusterComponents& cc = out.clusters[j - 1];
    cc.members = part.members(j);
    const std::size_t pj = cc.members.size();
    if (pj == 1) {
      // A singleton cluster donates no component; its complement energy
      // is all residual variance.
      cc.r = 0;
      cc.gamma = Matrix(1, 0);
      cc.f = Matrix(n, 0);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += xc(i, cc.members[0]) * xc(i, cc.members[0]);
      cc.sigma2 = ss / static_cast<double>(n);
      continue;
    }
    const Matrix block = select_cols(xc, cc.members);
    const auto full = pca(block, std::min(n, pj));
    std::size_t r = 1;
    if (full.eigenvalues.size() >= 2) {
      const std::size_t cap = cap_cluster ? cap_cluster : default_ratio_cap(n, pj);
      r = iterative_ratio_select(full.eigenvalues, std::min(cap, full.eigenvalues.size() - 1), 8,
                                 spike_min);
    }
    r = std::clamp<std::size_t>(r, 1, std::min(n, pj));
    const auto fit = truncate_pca(full, r);
    cc.r = r;
    cc.f = fit.scores;
    cc.gamma = fit.loadings;
    const Matrix resid = block - matmul_nt(fit.scores, fit.loadings);
    cc.sigma2 = frob_sq(resid) / (static_cast<double>(n) * static_cast<double>(pj));
  }
  return out;
}

std::vector<std::size_t> complement_cluster_ranks(const Matrix& xc, const ClusterPartition& part,
                                                  std::size_t cap_cluster, double spike_min) {
  std::vector<std::size_t> ranks(part.J, 0);
  for (std::size_t j = 1; j <= part.J; ++j) {
    const auto mem = part.members(j);
    if (mem.size() < 2) {
      ranks[j - 1] = 1;
      continue;
    }
    const auto probe = pca(select_cols(xc, mem), 1);
    std::size_t r = 1;
    if (probe.eigenvalues.size() >= 2) {
      const std::size_t cap = cap_cluster ? cap_cluster : default_ratio_cap(xc.rows(), mem.size());
      r = iterative_ratio_select(probe.eigenvalues, std::min(cap, probe.eigenvalues.size() - 1), 8,
                                 spike_min);
    }
    ranks[j - 1] = std::clamp<std::size_t>(r, 1, std::min(xc.rows(), mem.size()));
  }
  return ranks;
}

}  // namespace

std::size_t whole_panel_rank(const Matrix& x, std::size_t r_cap) {
  const auto probe = pca(x, 1);
  if (probe.eigenvalues.size() < 2) return 1;
  const std::size_t cap = r_cap ? r_cap : default_ratio_cap(x.rows(), x.cols());
  return ratio_select(probe.eigenvalues, std::min(cap, probe.eigenvalues.size() - 1));
}

InitialStep initial_step(const Matrix& x, std::size_t r_cap) {
  InitialStep out;
  const auto full = pca(x, std::min(x.rows(), x.cols()));
  std::size_t r0 = 1;
  if (full.eigenvalues.size() >= 2) {
    const std::size_t cap = r_cap ? r_cap : default_ratio_cap(x.rows(), x.cols());
    r0 = ratio_select(full.eigenvalues, std::min(cap, full.eigenvalues.size() - 1));
  }
  const auto fit = truncate_pca(full, r0);
  out.r0 = r0;
  out.g0 = fit.scores;
  out.phi0 = fit.loadings;
  out.xc0 = x - matmul_nt(fit.scores, fit.loadings);
  out.partition0 = cluster_panel(out.xc0);
  return out;
}

TwoLayer two_layer_pca(const Matrix& x, const ClusterPartition& partition,
                       std::size_t r_cap_common, std::size_t r_cap_cluster) {
  return two_layer_impl(x, partition, r_cap_common, r_cap_cluster, /*allow_singletons=*/false);
}

namespace {

double cluster_spike_min(const FitConfig& cfg) { return cfg.common_effect ? kSpikeRatio : 2.0; }

CpcaModel fit_impl(const DataMatrix& x_raw, const FitConfig& cfg, bool iterate) {
  cfg.validate();
  DataMatrix input = x_raw;
  input.validate();
  Centered centered = center_columns(input);
  const Matrix& x = centered.data.values;
  const std::size_t n = x.rows(), p = x.cols();

  CpcaModel model;
  model.means = centered.means;
  model.column_ids = input.column_ids;
  model.variant = iterate ? "cpca_f" : "cpca_i";

  ClusterPartition part;
  Matrix xc;       // complement used for component extraction
  Matrix g0, phi0; // initial-variant common estimates

  if (cfg.initial_partition) {
    part = *cfg.initial_partition;
    part.validate();
    if (part.p() != p) throw InvalidInput("fit: warm-start partition size mismatch");
  }

  if (cfg.common_effect) {
    if (!cfg.initial_partition) {
      InitialStep init = initial_step(x, cfg.r_cap_common);
      part = init.partition0;
      g0 = init.g0;
      phi0 = init.phi0;
      xc = init.xc0;
    } else if (!iterate) {
      // initial-only variant warm-started: still needs a whole-panel pass
      InitialStep init = initial_step(x, cfg.r_cap_common);
      g0 = init.g0;
      phi0 = init.phi0;
      xc = init.xc0;
    }
  } else {
    if (!cfg.initial_partition) part = cluster_panel(x);
    xc = x;
  }
  model.trace.partitions.push_back(part.labels);

  if (iterate) {
    for (std::size_t s = 0; s < cfg.max_iterations; ++s) {
      if (cfg.common_effect) {
        TwoLayer tl = two_layer_impl(x, part, cfg.r_cap_common, cfg.r_cap_cluster,
                                     /*allow_singletons=*/true);
        xc = std::move(tl.xc);
        model.trace.rc_per_iter.push_back(tl.r_c);
      } else {
        model.trace.rc_per_iter.push_back(0);
      }
      const auto ranks =
          complement_cluster_ranks(xc, part, cfg.r_cap_cluster, cluster_spike_min(cfg));
      ClusterPartition next = loo_pcr_assign(xc, part, ranks, cfg.tau);
      const double ari = adjusted_rand_index(part, next);
      model.trace.ari.push_back(ari);
      model.trace.clusters_per_iter.push_back(next.J);
      model.trace.partitions.push_back(next.labels);
      part = std::move(next);
      ++model.trace.iterations;
      if (ari >= cfg.eta) {
        model.trace.converged = true;
        break;
      }
    }
  } else {
    model.trace.converged = true;  // nothing to converge
  }

  // Final extraction on the settled partition.
  if (cfg.common_effect) {
    if (iterate) {
      TwoLayer tl = two_layer_impl(x, part, cfg.r_cap_common, cfg.r_cap_cluster,
                                   /*allow_singletons=*/true);
      model.g = std::move(tl.g);
      model.phi = std::move(tl.phi);
      model.r_c = tl.r_c;
      xc = std::move(tl.xc);
    } else {
      model.g = std::move(g0);
      model.phi = std::move(phi0);
      model.r_c = model.phi.cols();
    }
  } else {
    model.g = Matrix(n, 0);
    model.phi = Matrix(p, 0);
    model.r_c = 0;
    xc = x;
  }

  model.partition = part;
  model.clusters =
      extract_cluster_components(xc, part, cfg.r_cap_cluster, cluster_spike_min(cfg)).clusters;
  return model;
}

}  // namespace

CpcaModel fit(const DataMatrix& x, const FitConfig& cfg) { return fit_impl(x, cfg, true); }

CpcaModel fit_initial(const DataMatrix& x, const FitConfig& cfg) {
  return fit_impl(x, cfg, false);
}

CpcaModel fit_on_partition(const DataMatrix& x_raw, const ClusterPartition& partition,
                           const FitConfig& cfg) {
  cfg.validate();
  partition.validate();
  DataMatrix input = x_raw;
  input.validate();
  if (partition.p() != input.p()) throw InvalidInput("fit_on_partition: partition size mismatch");
  Centered centered = center_columns(input);
  const Matrix& x = centered.data.values;

  CpcaModel model;
  model.means = centered.means;
  model.column_ids = input.column_ids;
  model.variant = "cpca_fixed";
  model.partition = partition;
  model.trace.partitions.push_back(partition.labels);
  model.trace.converged = true;

  Matrix xc;
  if (cfg.common_effect) {
    TwoLayer tl = two_layer_impl(x, partition, cfg.r_cap_common, cfg.r_cap_cluster,
                                 /*allow_singletons=*/true);
    model.g = std::move(tl.g);
    model.phi = std::move(tl.phi);
    model.r_c = tl.r_c;
    xc = std::move(tl.xc);
  } else {
    model.g = Matrix(x.rows(), 0);
    model.phi = Matrix(x.cols(), 0);
    model.r_c = 0;
    xc = x;
  }
  model.clusters =
      extract_cluster_components(xc, partition, cfg.r_cap_cluster, cluster_spike_min(cfg)).clusters;
  return model;
}

Matrix recover(const CpcaModel& model, const Matrix& x_new, RecoverMode mode) {
  const std::size_t p = model.phi.rows();
  if (x_new.cols() != p) throw InvalidInput("recover: column count mismatch");

  Matrix common(x_new.rows(), p);
  if (model.r_c > 0) {
    const Matrix scores = matmul(x_new, model.phi);
    common = matmul_nt(scores, model.phi);
  }
  if (mode == RecoverMode::common_only) return common;

  Matrix xc = x_new - common;
  Matrix out = common;
  for (const auto& cc : model.clusters) {
    if (cc.r == 0 || cc.members.empty()) continue;
    const Matrix block = select_cols(xc, cc.members);
    const Matrix f = matmul(block, cc.gamma);
    const Matrix rec = matmul_nt(f, cc.gamma);
    for (std::size_t i = 0; i < out.rows(); ++i) {
      for (std::size_t a = 0; a < cc.members.size(); ++a) out(i, cc.members[a]) += rec(i, a);
    }
  }
  return out;
}

double msre(const Matrix& recovered, const Matrix& truth) {
  if (recovered.rows() != truth.rows() || recovered.cols() != truth.cols()) {
    throw InvalidInput("msre: shape mismatch");
  }
  const Matrix diff = recovered - truth;
  return frob_sq(diff) / (static_cast<double>(truth.rows()) * static_cast<double>(truth.cols()));
}

SeparationReport separation_check(const CpcaModel& model, const Matrix& xc) {
  const std::size_t p = model.partition.p();
  if (xc.cols() != p) throw InvalidInput("separation check: panel/model size mismatch");
  const std::size_t J = model.partition.J;

  SeparationReport rep;
  rep.pair_confusion = Matrix(J, J);
  rep.pair_margin = Matrix(J, J);
  if (J == 1) {
    rep.fraction_own_minimal = 1.0;
    return rep;
  }

  Matrix beaten(J, J);  // counts
  Matrix margin(J, J);
  Vector cluster_size(J, 0.0);
  std::size_t own_min = 0;
  for (std::size_t m = 0; m < p; ++m) {
    const std::size_t own = model.partition.labels[m] - 1;
    cluster_size[own] += 1.0;
    Vector y = xc.col(m);
    Vector nssr(J, 1.0);
    for (std::size_t d = 0; d < J; ++d) {
      nssr[d] = orthogonal_projection_nssr(model.clusters[d].f, y);
    }
    bool strict = true;
    for (std::size_t d = 0; d < J; ++d) {
      if (d == own) continue;
      margin(own, d) += nssr[d] - nssr[own];
      if (nssr[d] <= nssr[own]) {
        strict = false;
        beaten(own, d) += 1.0;
      }
    }
    if (strict) ++own_min;
  }
  rep.fraction_own_minimal = static_cast<double>(own_min) / static_cast<double>(p);
  for (std::size_t l = 0; l < J; ++l) {
    for (std::size_t d = 0; d < J; ++d) {
      if (l == d || cluster_size[l] == 0.0) continue;
      rep.pair_confusion(l, d) = beaten(l, d) / cluster_size[l];
      rep.pair_margin(l, d) = margin(l, d) / cluster_size[l];
      if (rep.pair_margin(l, d) < 0.05) rep.ambiguous_pairs.emplace_back(l + 1, d + 1);
    }
  }
  return rep;
}

}  // namespace cpca
