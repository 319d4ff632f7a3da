#include "cpca/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "cpca/kernels.hpp"

namespace cpca {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace

bool Matrix::all_finite() const {
  for (double v : a_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: shape mismatch");
  const auto& k = kern::active();
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      if (ai[l] != 0.0) k.axpy(ai[l], b.row(l), ci, b.cols());
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: shape mismatch");
  const auto& k = kern::active();
  Matrix c(a.cols(), b.cols());
  for (std::size_t l = 0; l < a.rows(); ++l) {
    const double* al = a.row(l);
    const double* bl = b.row(l);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      if (al[i] != 0.0) k.axpy(al[i], bl, c.row(i), b.cols());
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: shape mismatch");
  const auto& k = kern::active();
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      c(i, j) = k.dot(a.row(i), b.row(j), a.cols());
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

Vector mat_vec(const Matrix& a, const Vector& x) {
  require(a.cols() == x.size(), "mat_vec: shape mismatch");
  const auto& k = kern::active();
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = k.dot(a.row(i), x.data(), a.cols());
  return y;
}

Vector mat_tvec(const Matrix& a, const Vector& x) {
  require(a.rows() == x.size(), "mat_tvec: shape mismatch");
  const auto& k = kern::active();
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] != 0.0) k.axpy(x[i], a.row(i), y.data(), a.cols());
  }
  return y;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix -: shape mismatch");
  Matrix c = a;
  kern::active().sub(c.data(), b.data(), c.size());
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix +: shape mismatch");
  Matrix c = a;
  kern::active().axpy(1.0, b.data(), c.data(), c.size());
  return c;
}

Matrix& operator-=(Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix -=: shape mismatch");
  kern::active().sub(a.data(), b.data(), a.size());
  return a;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix +=: shape mismatch");
  kern::active().axpy(1.0, b.data(), a.data(), a.size());
  return a;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  kern::active().scal(s, c.data(), c.size());
  return c;
}

Vector col_means(const Matrix& a) {
  Vector mu(a.cols(), 0.0);
  const auto& k = kern::active();
  for (std::size_t i = 0; i < a.rows(); ++i) k.axpy(1.0, a.row(i), mu.data(), a.cols());
  const double inv = a.rows() ? 1.0 / static_cast<double>(a.rows()) : 0.0;
  k.scal(inv, mu.data(), mu.size());
  return mu;
}

double frob_sq(const Matrix& a) { return kern::active().sumsq(a.data(), a.size()); }

Matrix select_cols(const Matrix& a, const std::vector<std::size_t>& idx) {
  Matrix out(a.rows(), idx.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* src = a.row(i);
    double* dst = out.row(i);
    for (std::size_t j = 0; j < idx.size(); ++j) dst[j] = src[idx[j]];
  }
  return out;
}

void scatter_cols(Matrix& a, const std::vector<std::size_t>& idx, const Matrix& block) {
  require(block.rows() == a.rows() && block.cols() == idx.size(), "scatter_cols: shape mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = a.row(i);
    const double* src = block.row(i);
    for (std::size_t j = 0; j < idx.size(); ++j) dst[idx[j]] = src[j];
  }
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.empty() && a.rows() == 0) return b;
  if (b.empty() && b.rows() == 0) return a;
  require(a.rows() == b.rows(), "hcat: row mismatch");
  Matrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = c.row(i);
    const double* ra = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = ra[j];
    const double* rb = b.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) dst[a.cols() + j] = rb[j];
  }
  return c;
}

}  // namespace cpca
