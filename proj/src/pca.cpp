#include "cpca/pca.hpp"

#include <cmath>

#include "cpca/kernels.hpp"

namespace cpca {

void DataMatrix::validate() {
  if (values.rows() < 2) throw InvalidInput("panel: need at least 2 observations");
  if (values.cols() < 1) throw InvalidInput("panel: need at least 1 variable");
  if (!values.all_finite()) throw InvalidInput("panel: non-finite entries");
  if (column_ids.empty()) {
    column_ids.resize(values.cols());
    for (std::size_t j = 0; j < values.cols(); ++j) column_ids[j] = "v" + std::to_string(j + 1);
  } else if (column_ids.size() != values.cols()) {
    throw InvalidInput("panel: column id count does not match column count");
  }
}

DataMatrix make_panel(Matrix values, std::vector<std::string> ids) {
  DataMatrix d{std::move(values), std::move(ids)};
  d.validate();
  return d;
}

Centered center_columns(const DataMatrix& x) {
  if (!x.values.all_finite()) throw InvalidInput("center_columns: non-finite entries");
  Centered out;
  out.means = col_means(x.values);
  out.data.values = x.values;
  out.data.column_ids = x.column_ids;
  const auto& k = kern::active();
  for (std::size_t i = 0; i < out.data.values.rows(); ++i) {
    k.axpy(-1.0, out.means.data(), out.data.values.row(i), out.means.size());
  }
  return out;
}

PcaFactorization pca(const Matrix& x, std::size_t r) {
  const std::size_t m = std::min(x.rows(), x.cols());
  if (r < 1 || r > m) throw InvalidInput("pca: r out of range");

  Svd f = svd(x);
  PcaFactorization out;
  out.r = r;
  out.eigenvalues.resize(m);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (std::size_t i = 0; i < m; ++i) out.eigenvalues[i] = f.sigma[i] * f.sigma[i] * inv_n;

  out.loadings = Matrix(x.cols(), r);
  for (std::size_t j = 0; j < r; ++j) {
    // sign rule: first entry of largest magnitude made positive
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < x.cols(); ++i) {
      const double mag = std::abs(f.v(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double flip = f.v(arg, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < x.cols(); ++i) out.loadings(i, j) = flip * f.v(i, j);
  }
  out.scores = matmul(x, out.loadings);
  return out;
}

PcaFactorization pca(const DataMatrix& x, std::size_t r) { return pca(x.values, r); }

PcaFactorization truncate_pca(const PcaFactorization& f, std::size_t r) {
  if (r < 1 || r > f.loadings.cols()) throw InvalidInput("truncate_pca: r out of range");
  PcaFactorization out;
  out.r = r;
  out.eigenvalues = f.eigenvalues;
  out.loadings = Matrix(f.loadings.rows(), r);
  out.scores = Matrix(f.scores.rows(), r);
  for (std::size_t i = 0; i < f.loadings.rows(); ++i) {
    for (std::size_t j = 0; j < r; ++j) out.loadings(i, j) = f.loadings(i, j);
  }
  for (std::size_t i = 0; i < f.scores.rows(); ++i) {
    for (std::size_t j = 0; j < r; ++j) out.scores(i, j) = f.scores(i, j);
  }
  return out;
}

Matrix correlation_abs(const DataMatrix& x) {
  const Matrix& v = x.values;
  const std::size_t n = v.rows(), p = v.cols();
  if (n < 2) throw InvalidInput("correlation_abs: need at least 2 rows");

  Vector mu = col_means(v);
  Matrix c = v;
  const auto& k = kern::active();
  for (std::size_t i = 0; i < n; ++i) k.axpy(-1.0, mu.data(), c.row(i), p);

  Matrix g = matmul_tn(c, c);  // p x p Gram of centered columns
  Vector sd(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (g(j, j) <= 0.0) {
      const std::string id = j < x.column_ids.size() ? x.column_ids[j] : "v" + std::to_string(j + 1);
      throw InvalidInput("correlation_abs: zero-variance column '" + id + "'");
    }
    sd[j] = std::sqrt(g(j, j));
  }
  Matrix out(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) {
        out(i, j) = 1.0;
      } else {
        const double r = std::abs(g(i, j)) / (sd[i] * sd[j]);
        out(i, j) = std::min(r, 1.0);
      }
    }
  }
  return out;
}

}  // namespace cpca
