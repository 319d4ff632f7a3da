#include "cpca/covariance.hpp"

#include <algorithm>
#include <cmath>

#include "cpca/kernels.hpp"
#include "cpca/linalg.hpp"

namespace cpca {

namespace {

Vector score_variances(const Matrix& scores) {
  // score columns are centered by construction; variance on the 1/n scale
  const std::size_t n = scores.rows();
  Vector v(scores.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = scores.row(i);
    for (std::size_t j = 0; j < scores.cols(); ++j) v[j] += row[j] * row[j];
  }
  for (double& x : v) x /= static_cast<double>(n);
  return v;
}

void add_weighted_outer(Matrix& sigma, const Matrix& loadings, const Vector& vars,
                        const std::vector<std::size_t>& cols) {
  // sigma[cols, cols] += loadings * diag(vars) * loadings^T
  for (std::size_t a = 0; a < cols.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      double acc = 0.0;
      for (std::size_t h = 0; h < vars.size(); ++h) acc += vars[h] * loadings(a, h) * loadings(b, h);
      sigma(cols[a], cols[b]) += acc;
    }
  }
}

void symmetrize(Matrix& s) {
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
}

Matrix centered_values(const DataMatrix& x) {
  Vector mu = col_means(x.values);
  Matrix c = x.values;
  const auto& k = kern::active();
  for (std::size_t i = 0; i < c.rows(); ++i) k.axpy(-1.0, mu.data(), c.row(i), c.cols());
  return c;
}

}  // namespace

CovarianceEstimate cpca_cov(const CpcaModel& model) {
  const std::size_t p = model.p();
  CovarianceEstimate out;
  out.method = "cpca";
  out.sigma = Matrix(p, p);

  if (model.r_c > 0) {
    const Vector gv = score_variances(model.g);
    std::vector<std::size_t> all(p);
    for (std::size_t i = 0; i < p; ++i) all[i] = i;
    add_weighted_outer(out.sigma, model.phi, gv, all);
  }
  for (const auto& cc : model.clusters) {
    if (cc.r > 0) {
      add_weighted_outer(out.sigma, cc.gamma, score_variances(cc.f), cc.members);
    }
    const double s2 = std::max(cc.sigma2, 1e-8);  // keeps the estimate positive definite
    for (std::size_t m : cc.members) out.sigma(m, m) += s2;
  }
  symmetrize(out.sigma);
  return out;
}

CovarianceEstimate pca_cov(const DataMatrix& x, std::size_t r) {
  DataMatrix input = x;
  input.validate();
  const std::size_t n = input.n(), p = input.p();
  if (r < 1 || r > std::min(n, p)) throw InvalidInput("pca_cov: r out of range");

  const Matrix c = centered_values(input);
  const auto f = pca(c, r);
  CovarianceEstimate out;
  out.method = "pca";
  out.sigma = Matrix(p, p);
  std::vector<std::size_t> all(p);
  for (std::size_t i = 0; i < p; ++i) all[i] = i;
  const Vector top(f.eigenvalues.begin(), f.eigenvalues.begin() + static_cast<std::ptrdiff_t>(r));
  add_weighted_outer(out.sigma, f.loadings, top, all);

  double tail = 0.0;
  for (std::size_t i = r; i < f.eigenvalues.size(); ++i) tail += f.eigenvalues[i];
  const double noise = tail / static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i) out.sigma(i, i) += noise;
  symmetrize(out.sigma);
  return out;
}

double poet_default_threshold(std::size_t n, std::size_t p) {
  // C * (1/sqrt(p) + sqrt(log(p) / n)) with C = 0.5, the reference
  // implementation's rate for the adaptive residual threshold.
  return 0.5 * (1.0 / std::sqrt(static_cast<double>(p)) +
                std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n)));
}

CovarianceEstimate poet_cov(const DataMatrix& x, std::size_t r, double threshold) {
  DataMatrix input = x;
  input.validate();
  const std::size_t n = input.n(), p = input.p();
  if (r < 1 || r > std::min(n, p)) throw InvalidInput("poet_cov: r out of range");
  if (threshold < 0.0) throw InvalidInput("poet_cov: threshold must be >= 0");

  const Matrix c = centered_values(input);
  Matrix s = matmul_tn(c, c);
  kern::active().scal(1.0 / static_cast<double>(n), s.data(), s.size());

  const auto f = pca(c, r);
  Matrix lowrank(p, p);
  std::vector<std::size_t> all(p);
  for (std::size_t i = 0; i < p; ++i) all[i] = i;
  const Vector top(f.eigenvalues.begin(), f.eigenvalues.begin() + static_cast<std::ptrdiff_t>(r));
  add_weighted_outer(lowrank, f.loadings, top, all);

  Matrix resid = s - lowrank;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) continue;
      const double scale = std::sqrt(std::max(resid(i, i), 0.0) * std::max(resid(j, j), 0.0));
      const double t = threshold * scale;
      const double v = resid(i, j);
      resid(i, j) = std::abs(v) <= t ? 0.0 : (v > 0.0 ? v - t : v + t);
    }
  }

  CovarianceEstimate out;
  out.method = "poet";
  out.sigma = lowrank + resid;
  symmetrize(out.sigma);

  const auto eig = sym_eigen(out.sigma);
  const double wmin = eig.w.back();
  if (wmin < 0.0) {
    out.psd_repaired = true;
    out.ridge = -wmin + 1e-10 * std::max(1.0, eig.w.front());
    for (std::size_t i = 0; i < p; ++i) out.sigma(i, i) += out.ridge;
  }
  return out;
}

CovarianceEstimate sample_cov(const DataMatrix& x) {
  DataMatrix input = x;
  input.validate();
  const Matrix c = centered_values(input);
  CovarianceEstimate out;
  out.method = "sample";
  out.sigma = matmul_tn(c, c);
  kern::active().scal(1.0 / static_cast<double>(input.n()), out.sigma.data(), out.sigma.size());
  symmetrize(out.sigma);
  return out;
}

double frob_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("frob_distance: shape mismatch");
  }
  const Matrix d = a - b;
  return frob_sq(d);
}

PrecisionResult precision(const CovarianceEstimate& est) {
  const std::size_t p = est.sigma.rows();
  if (est.sigma.cols() != p) throw InvalidInput("precision: matrix not square");

  const auto eig = sym_eigen(est.sigma);
  const double wmax = eig.w.front();
  const double wmin = eig.w.back();

  PrecisionResult out;
  double ridge = 0.0;
  if (wmin <= 0.0) ridge = -wmin + 1e-12 * std::max(1.0, wmax);
  const double cond_cap = 1e12;
  if ((wmax + ridge) / (wmin + ridge) > cond_cap) {
    ridge = std::max(ridge, (wmax - cond_cap * wmin) / (cond_cap - 1.0));
  }
  out.ridge = ridge;
  out.flagged = ridge > 0.0;

  Matrix a = est.sigma;
  if (ridge > 0.0) {
    for (std::size_t i = 0; i < p; ++i) a(i, i) += ridge;
  }
  out.inverse = spd_solve(a, Matrix::identity(p));
  symmetrize(out.inverse);
  return out;
}

}  // namespace cpca
