#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mesp/errors.hpp"

namespace mesp {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw InputError("matrix dimensions must be nonnegative");
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<size_t>(i) * cols_, static_cast<size_t>(cols_)};
  }
  std::span<double> row(int i) {
    return {data_.data() + static_cast<size_t>(i) * cols_, static_cast<size_t>(cols_)};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
double inf_norm(const Matrix& a);  // max absolute entry

// Symmetric matrix of order n >= 1. Entries are symmetrized on construction
// and stay exactly symmetric as stored.
class SymMatrix {
 public:
  explicit SymMatrix(int n) : m_(check_order(n), n) {}

  // Symmetrize a square matrix: (a + a^T) / 2 stored in both triangles.
  static SymMatrix from(const Matrix& a);
  static SymMatrix diag(std::span<const double> d);

  int order() const { return m_.rows(); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Matrix& mat() const { return m_; }
  SymMatrix principal_submatrix(std::span<const int> idx) const;

 private:
  static int check_order(int n) {
    if (n < 1) throw InputError("symmetric matrix order must be at least 1");
    return n;
  }
  Matrix m_;
};

double inf_norm(const SymMatrix& a);

// small vector helpers
double dot(std::span<const double> a, std::span<const double> b);
double inf_norm(std::span<const double> v);
std::vector<double> vec_sub(std::span<const double> a, std::span<const double> b);
std::vector<double> vec_add_scaled(std::span<const double> a, double t, std::span<const double> d);

}  // namespace mesp
