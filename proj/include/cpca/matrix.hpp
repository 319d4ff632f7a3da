#pragma once

#include <cstddef>
#include <vector>

namespace cpca {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  std::size_t size() const { return a_.size(); }

  Vector col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = a_[i * cols_ + j];
    return v;
  }

  void set_col(std::size_t j, const Vector& v) {
    for (std::size_t i = 0; i < rows_; ++i) a_[i * cols_ + j] = v[i];
  }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// C = A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Vector mat_vec(const Matrix& a, const Vector& x);
Vector mat_tvec(const Matrix& a, const Vector& x);  // A^T x

Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix& operator-=(Matrix& a, const Matrix& b);
Matrix& operator+=(Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Vector col_means(const Matrix& a);
double frob_sq(const Matrix& a);

// Columns of `a` selected by `idx`, in order.
Matrix select_cols(const Matrix& a, const std::vector<std::size_t>& idx);

// Writes `block` into the columns of `a` selected by `idx`.
void scatter_cols(Matrix& a, const std::vector<std::size_t>& idx, const Matrix& block);

Matrix hcat(const Matrix& a, const Matrix& b);

}  // namespace cpca
