#include "cpca/pcr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpca/kernels.hpp"
#include "cpca/linalg.hpp"

namespace cpca {

std::size_t PcrDesign::group_offset(std::size_t g) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < g; ++i) off += group_sizes[i];
  return off;
}

PcrDesign make_design(const Matrix& g, const std::vector<Matrix>& f_blocks) {
  PcrDesign d;
  d.x = Matrix(0, 0);
  bool first = true;
  if (g.cols() > 0) {
    d.x = g;
    d.group_sizes.push_back(g.cols());
    d.group_names.push_back("common");
    first = false;
  }
  std::size_t j = 0;
  for (const auto& f : f_blocks) {
    ++j;
    if (f.cols() == 0) continue;
    d.x = first ? f : hcat(d.x, f);
    first = false;
    d.group_sizes.push_back(f.cols());
    d.group_names.push_back("cluster" + std::to_string(j));
  }
  if (d.x.cols() == 0) throw InvalidInput("pcr design: no predictor columns");
  return d;
}

PcrDesign model_design(const CpcaModel& model) {
  std::vector<Matrix> f;
  f.reserve(model.clusters.size());
  for (const auto& c : model.clusters) f.push_back(c.f);
  return make_design(model.g, f);
}

PcrDesign model_design(const CpcaModel& model, const Matrix& x_new) {
  if (x_new.cols() != model.p()) throw InvalidInput("pcr design: column count mismatch");
  Matrix g_new(x_new.rows(), 0);
  Matrix xc = x_new;
  if (model.r_c > 0) {
    g_new = matmul(x_new, model.phi);
    xc = x_new - matmul_nt(g_new, model.phi);
  }
  std::vector<Matrix> f;
  f.reserve(model.clusters.size());
  for (const auto& c : model.clusters) {
    f.push_back(matmul(select_cols(xc, c.members), c.gamma));
  }
  return make_design(g_new, f);
}

OlsFit fit_ols_pcr(const PcrDesign& design, const Vector& y) {
  if (design.x.rows() != y.size()) throw InvalidInput("fit_ols_pcr: length mismatch");
  if (design.x.rows() <= design.x.cols()) {
    throw InvalidInput("fit_ols_pcr: need more observations than predictors");
  }
  const double mean = kern::active().sum(y.data(), y.size()) / static_cast<double>(y.size());
  Vector yc = y;
  for (double& v : yc) v -= mean;

  LstSq ls = lstsq(design.x, yc);
  if (ls.rank_deficient) {
    std::string cols;
    for (std::size_t c : ls.dependent_cols) cols += (cols.empty() ? "" : ", ") + std::to_string(c);
    throw InvalidInput("fit_ols_pcr: rank-deficient design, dependent columns {" + cols + "}");
  }
  return {ls.coef, mean};
}

Vector predict(const PcrDesign& design, const Vector& coef, double intercept) {
  Vector out = mat_vec(design.x, coef);
  for (double& v : out) v += intercept;
  return out;
}

namespace {

struct GroupWork {
  std::size_t offset;
  std::size_t size;
  SymEig gram;   // eigen-decomposition of X_g^T X_g / n
};

// Exact minimizer of (1/2n)||r - X_g t||^2 + lambda ||t||_2 given the
// eigendecomposition of X_g^T X_g / n. z = (1/n) X_g^T r.
Vector block_minimizer(const GroupWork& gw, const Vector& z, double lambda) {
  const std::size_t m = gw.size;
  Vector zt(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += gw.gram.q(j, i) * z[j];
    zt[i] = acc;
  }
  const double eig_tol = gw.gram.w.empty() ? 0.0 : std::max(1e-14 * std::max(gw.gram.w[0], 0.0), 0.0);
  double znorm_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (gw.gram.w[i] <= eig_tol) zt[i] = 0.0;  // z lies in the row space
    znorm_sq += zt[i] * zt[i];
  }
  if (std::sqrt(znorm_sq) <= lambda || znorm_sq == 0.0) return Vector(m, 0.0);

  if (lambda == 0.0) {
    Vector tt(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (gw.gram.w[i] > eig_tol) tt[i] = zt[i] / gw.gram.w[i];
    }
    Vector t(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += gw.gram.q(i, j) * tt[j];
      t[i] = acc;
    }
    return t;
  }

  // psi(t) = sum z_i^2 / (w_i t + lambda)^2 - 1, strictly decreasing; the
  // root is the norm of the minimizer.
  auto psi = [&](double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (zt[i] == 0.0) continue;
      const double den = gw.gram.w[i] * t + lambda;
      acc += zt[i] * zt[i] / (den * den);
    }
    return acc - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (psi(hi) > 0.0 && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t_norm = 0.5 * (lo + hi);

  Vector tt(m);
  for (std::size_t i = 0; i < m; ++i) {
    tt[i] = t_norm * zt[i] / (gw.gram.w[i] * t_norm + lambda);
  }
  Vector t(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += gw.gram.q(i, j) * tt[j];
    t[i] = acc;
  }
  return t;
}

}  // namespace

GroupLassoFit fit_group_lasso(const PcrDesign& design, const Vector& y, double lambda) {
  if (design.x.rows() != y.size()) throw InvalidInput("fit_group_lasso: length mismatch");
  if (lambda < 0.0) throw InvalidInput("fit_group_lasso: lambda must be >= 0");
  const std::size_t n = design.x.rows();
  const std::size_t pc = design.x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& k = kern::active();

  const double mean = k.sum(y.data(), n) * inv_n;
  Vector yc = y;
  for (double& v : yc) v -= mean;

  std::vector<GroupWork> work;
  work.reserve(design.groups());
  for (std::size_t g = 0; g < design.groups(); ++g) {
    GroupWork gw;
    gw.offset = design.group_offset(g);
    gw.size = design.group_sizes[g];
    Matrix sub(design.x.rows(), gw.size);
    for (std::size_t i = 0; i < design.x.rows(); ++i) {
      const double* src = design.x.row(i) + gw.offset;
      std::copy(src, src + gw.size, sub.row(i));
    }
    Matrix gram = matmul_tn(sub, sub);
    k.scal(inv_n, gram.data(), gram.size());
    gw.gram = sym_eigen(gram);
    work.push_back(std::move(gw));
  }

  Vector coef(pc, 0.0);
  Vector resid = yc;  // y - X coef
  Vector fitted(n, 0.0);

  auto objective = [&]() {
    double obj = 0.5 * inv_n * k.sumsq(resid.data(), n);
    for (std::size_t g = 0; g < design.groups(); ++g) {
      const double ns =
          std::sqrt(k.sumsq(coef.data() + work[g].offset, work[g].size));
      obj += lambda * ns;
    }
    return obj;
  };

  GroupLassoFit out;
  out.lambda = lambda;
  out.intercept = mean;
  const std::size_t max_sweeps = 10000;
  double max_change = 0.0;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    max_change = 0.0;
    for (std::size_t g = 0; g < design.groups(); ++g) {
      const GroupWork& gw = work[g];
      // partial residual r = resid + X_g theta_g
      Vector z(gw.size, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double* xi = design.x.row(i) + gw.offset;
        double partial = resid[i];
        partial += k.dot(xi, coef.data() + gw.offset, gw.size);
        k.axpy(partial, xi, z.data(), gw.size);
      }
      k.scal(inv_n, z.data(), gw.size);

      const Vector t = block_minimizer(gw, z, lambda);
      double change = 0.0;
      for (std::size_t c = 0; c < gw.size; ++c) {
        change = std::max(change, std::abs(t[c] - coef[gw.offset + c]));
      }
      if (change > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double* xi = design.x.row(i) + gw.offset;
          double delta = 0.0;
          for (std::size_t c = 0; c < gw.size; ++c) {
            delta += xi[c] * (t[c] - coef[gw.offset + c]);
          }
          resid[i] -= delta;
        }
        for (std::size_t c = 0; c < gw.size; ++c) coef[gw.offset + c] = t[c];
      }
      max_change = std::max(max_change, change);
    }
    out.objective_trace.push_back(objective());
    ++out.sweeps;
    if (max_change < 1e-8) {
      out.converged = true;
      break;
    }
  }

  out.coef = coef;
  out.active.resize(design.groups());
  std::size_t g0 = 0;
  if (!design.group_names.empty() && design.group_names[0] == "common") {
    out.alpha.assign(coef.begin(), coef.begin() + static_cast<std::ptrdiff_t>(design.group_sizes[0]));
    g0 = 1;
  }
  for (std::size_t g = g0; g < design.groups(); ++g) {
    const std::size_t off = design.group_offset(g);
    out.beta.emplace_back(coef.begin() + static_cast<std::ptrdiff_t>(off),
                          coef.begin() + static_cast<std::ptrdiff_t>(off + design.group_sizes[g]));
  }
  for (std::size_t g = 0; g < design.groups(); ++g) {
    const std::size_t off = design.group_offset(g);
    double ns = 0.0;
    for (std::size_t c = 0; c < design.group_sizes[g]; ++c) ns += coef[off + c] * coef[off + c];
    out.active[g] = ns > 0.0;
  }
  return out;
}

double lambda_max(const PcrDesign& design, const Vector& y) {
  const std::size_t n = design.x.rows();
  if (n != y.size()) throw InvalidInput("lambda_max: length mismatch");
  const auto& k = kern::active();
  const double mean = k.sum(y.data(), n) / static_cast<double>(n);
  Vector yc = y;
  for (double& v : yc) v -= mean;
  Vector xty = mat_tvec(design.x, yc);
  k.scal(1.0 / static_cast<double>(n), xty.data(), xty.size());
  double best = 0.0;
  for (std::size_t g = 0; g < design.groups(); ++g) {
    const std::size_t off = design.group_offset(g);
    const double ns = std::sqrt(k.sumsq(xty.data() + off, design.group_sizes[g]));
    best = std::max(best, ns);
  }
  return best;
}

double cv_lambda(const PcrDesign& design, const Vector& y, std::size_t folds) {
  const std::size_t n = design.x.rows();
  if (folds < 2) throw InvalidInput("cv_lambda: folds must be >= 2");
  if (n < folds) throw InvalidInput("cv_lambda: more folds than observations");

  const double lmax = lambda_max(design, y);
  if (lmax <= 0.0) return 0.0;
  const std::size_t grid_n = 50;
  Vector grid(grid_n);
  const double lmin = lmax * 1e-4;
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(grid_n - 1);
    grid[i] = lmax * std::pow(lmin / lmax, f);  // descending
  }

  Vector cv_err(grid_n, 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * n / folds;
    const std::size_t hi = (f + 1) * n / folds;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(n - (hi - lo));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < lo || i >= hi) train_rows.push_back(i);
    }
    PcrDesign train = design;
    train.x = Matrix(train_rows.size(), design.x.cols());
    Vector y_train(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      std::copy(design.x.row(train_rows[i]), design.x.row(train_rows[i]) + design.x.cols(),
                train.x.row(i));
      y_train[i] = y[train_rows[i]];
    }
    for (std::size_t gi = 0; gi < grid_n; ++gi) {
      const GroupLassoFit fit = fit_group_lasso(train, y_train, grid[gi]);
      double err = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double pred =
            kern::active().dot(design.x.row(i), fit.coef.data(), design.x.cols()) + fit.intercept;
        const double d = pred - y[i];
        err += d * d;
      }
      cv_err[gi] += err / static_cast<double>(hi - lo);
    }
  }

  std::size_t best = 0;  // grid is descending; ties keep the larger lambda
  for (std::size_t gi = 1; gi < grid_n; ++gi) {
    if (cv_err[gi] < cv_err[best] - 1e-12) best = gi;
  }
  return grid[best];
}

double mspe(const Vector& y_hat, const Vector& y) {
  if (y_hat.size() != y.size()) throw InvalidInput("mspe: length mismatch");
  if (y.empty()) throw InvalidInput("mspe: empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y_hat[i] - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(y.size());
}

}  // namespace cpca
