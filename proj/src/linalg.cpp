#include "cpca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpca/kernels.hpp"

namespace cpca {

namespace {

// Column-major workspace so Jacobi rotations touch contiguous memory.
struct ColMat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;
  ColMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double* col(std::size_t j) { return a.data() + j * rows; }
  const double* col(std::size_t j) const { return a.data() + j * rows; }
};

ColMat to_colmajor(const Matrix& m, bool transposed) {
  if (!transposed) {
    ColMat w(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double* c = w.col(j);
      for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
    }
    return w;
  }
  ColMat w(m.cols(), m.rows());
  for (std::size_t j = 0; j < m.rows(); ++j) {
    double* c = w.col(j);
    const double* r = m.row(j);
    for (std::size_t i = 0; i < m.cols(); ++i) c[i] = r[i];
  }
  return w;
}

Matrix from_colmajor(const ColMat& w) {
  Matrix m(w.rows, w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    const double* c = w.col(j);
    for (std::size_t i = 0; i < w.rows; ++i) m(i, j) = c[i];
  }
  return m;
}

}  // namespace

Svd svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  if (!a.all_finite()) throw std::invalid_argument("svd: non-finite input");

  const bool transposed = a.cols() > a.rows();
  ColMat w = to_colmajor(a, transposed);  // rows >= cols from here on
  const std::size_t m = w.cols;
  ColMat v(m, m);
  for (std::size_t j = 0; j < m; ++j) v.col(j)[j] = 1.0;

  const auto& k = kern::active();
  const double eps = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        double* cp = w.col(p);
        double* cq = w.col(q);
        const double app = k.sumsq(cp, w.rows);
        const double aqq = k.sumsq(cq, w.rows);
        const double apq = k.dot(cp, cq, w.rows);
        if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        k.rot(cp, cq, c, s, w.rows);
        k.rot(v.col(p), v.col(q), c, s, m);
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  Vector sigma(m);
  for (std::size_t j = 0; j < m; ++j) sigma[j] = std::sqrt(k.sumsq(w.col(j), w.rows));

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  const double tiny = sigma.empty() ? 0.0 : sigma[order[0]] * 1e-300;
  ColMat u(w.rows, m);
  ColMat vs(m, m);
  Vector s_sorted(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t src = order[j];
    s_sorted[j] = sigma[src];
    const double inv = sigma[src] > tiny && sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
    const double* wc = w.col(src);
    double* uc = u.col(j);
    for (std::size_t i = 0; i < w.rows; ++i) uc[i] = wc[i] * inv;
    const double* vc = v.col(src);
    double* tc = vs.col(j);
    for (std::size_t i = 0; i < m; ++i) tc[i] = vc[i];
  }

  Svd out;
  out.sigma = std::move(s_sorted);
  if (!transposed) {
    out.u = from_colmajor(u);
    out.v = from_colmajor(vs);
  } else {
    out.u = from_colmajor(vs);
    out.v = from_colmajor(u);
  }
  return out;
}

SymEig sym_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eigen: not square");
  const std::size_t n = a.rows();
  Matrix w = a;
  Matrix q = Matrix::identity(n);

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
    if (off <= 1e-26 * (1.0 + frob_sq(w))) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apq = w(p, r);
        if (apq == 0.0) continue;
        const double app = w(p, p);
        const double aqq = w(r, r);
        if (std::abs(apq) <= 1e-16 * (std::abs(app) + std::abs(aqq))) continue;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        // W <- J^T W J with J the (p, r) rotation
        for (std::size_t i = 0; i < n; ++i) {
          const double wip = w(i, p);
          const double wir = w(i, r);
          w(i, p) = c * wip - s * wir;
          w(i, r) = s * wip + c * wir;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double wpi = w(p, i);
          const double wri = w(r, i);
          w(p, i) = c * wpi - s * wri;
          w(r, i) = s * wpi + c * wri;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double qip = q(i, p);
          const double qir = q(i, r);
          q(i, p) = c * qip - s * qir;
          q(i, r) = s * qip + c * qir;
        }
      }
    }
  }

  Vector w_diag(n);
  for (std::size_t i = 0; i < n; ++i) w_diag[i] = w(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w_diag[i] > w_diag[j]; });

  SymEig out;
  out.w.resize(n);
  out.q = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.w[j] = w_diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.q(i, j) = q(i, order[j]);
  }
  return out;
}

LstSq lstsq(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("lstsq: shape mismatch");
  if (a.rows() < a.cols()) throw std::invalid_argument("lstsq: underdetermined system");
  const std::size_t n = a.rows(), p = a.cols();

  // Householder QR on a column-major copy; b transformed in place.
  ColMat r = to_colmajor(a, false);
  Vector y = b;
  Vector diag(p, 0.0);
  const auto& k = kern::active();

  for (std::size_t j = 0; j < p; ++j) {
    double* cj = r.col(j) + j;
    const std::size_t len = n - j;
    double norm = std::sqrt(k.sumsq(cj, len));
    if (norm == 0.0) {
      diag[j] = 0.0;
      continue;
    }
    if (cj[0] > 0.0) norm = -norm;
    for (std::size_t i = 0; i < len; ++i) cj[i] /= norm;
    cj[0] -= 1.0;
    // apply the reflector H = I + v v^T / v0 (v0 = cj[0] < 0) to the
    // remaining columns and to y
    for (std::size_t jj = j + 1; jj < p; ++jj) {
      double* c2 = r.col(jj) + j;
      const double tau = k.dot(cj, c2, len) / cj[0];
      k.axpy(tau, cj, c2, len);
    }
    double* yj = y.data() + j;
    const double tau = k.dot(cj, yj, len) / cj[0];
    k.axpy(tau, cj, yj, len);
    diag[j] = norm;
  }

  LstSq out;
  double maxdiag = 0.0;
  for (double d : diag) maxdiag = std::max(maxdiag, std::abs(d));
  const double tol = maxdiag * 1e-10;
  for (std::size_t j = 0; j < p; ++j) {
    if (std::abs(diag[j]) <= tol) {
      out.rank_deficient = true;
      out.dependent_cols.push_back(j);
    }
  }

  out.coef.assign(p, 0.0);
  for (std::size_t jj = p; jj-- > 0;) {
    if (std::abs(diag[jj]) <= tol) {
      out.coef[jj] = 0.0;
      continue;
    }
    double acc = y[jj];
    for (std::size_t l = jj + 1; l < p; ++l) acc -= r.col(l)[jj] * out.coef[l];
    out.coef[jj] = acc / diag[jj];
  }
  return out;
}

namespace {

// Lower Cholesky factor; throws on non-PD input.
Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("cholesky: not square");
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = a(i, j);
      acc -= kern::active().dot(l.row(i), l.row(j), j);
      if (i == j) {
        if (acc <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
        l(i, i) = std::sqrt(acc);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return l;
}

}  // namespace

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("spd_solve: shape mismatch");
  const Matrix l = cholesky(a);
  const std::size_t n = a.rows(), m = b.cols();
  Matrix x = b;
  // forward: L z = b
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = x(i, c);
      for (std::size_t j = 0; j < i; ++j) acc -= l(i, j) * x(j, c);
      x(i, c) = acc / l(i, i);
    }
  }
  // backward: L^T x = z
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = x(i, c);
      for (std::size_t j = i + 1; j < n; ++j) acc -= l(j, i) * x(j, c);
      x(i, c) = acc / l(i, i);
    }
  }
  return x;
}

Vector spd_solve(const Matrix& a, const Vector& b) {
  Matrix bm(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) bm(i, 0) = b[i];
  Matrix x = spd_solve(a, bm);
  Vector out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
  return out;
}

double determinant(Matrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: not square");
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t piv = j;
    for (std::size_t i = j + 1; i < n; ++i) {
      if (std::abs(a(i, j)) > std::abs(a(piv, j))) piv = i;
    }
    if (a(piv, j) == 0.0) return 0.0;
    if (piv != j) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(j, c), a(piv, c));
      det = -det;
    }
    det *= a(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      const double f = a(i, j) / a(j, j);
      for (std::size_t c = j; c < n; ++c) a(i, c) -= f * a(j, c);
    }
  }
  return det;
}

Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  if (cols > rows) throw std::invalid_argument("random_orthonormal: cols > rows");
  if (cols == 0) return Matrix(rows, 0);
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.normal();

  // Modified Gram-Schmidt with a second pass for orthogonality to 1e-10.
  // Normalization keeps the R diagonal positive, so the frame is a
  // deterministic function of the stream.
  const auto& k = kern::active();
  Matrix qt = transpose(g);  // work on rows for contiguity
  for (std::size_t j = 0; j < cols; ++j) {
    double* qj = qt.row(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double proj = k.dot(qt.row(i), qj, rows);
        k.axpy(-proj, qt.row(i), qj, rows);
      }
    }
    const double norm = std::sqrt(k.sumsq(qj, rows));
    if (norm == 0.0) throw std::runtime_error("random_orthonormal: degenerate draw");
    k.scal(1.0 / norm, qj, rows);
  }
  return transpose(qt);
}

}  // namespace cpca
