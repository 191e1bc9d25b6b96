#include "mesp/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace mesp {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  // ikj order keeps the inner loop contiguous
  for (int i = 0; i < a.rows(); ++i) {
    double* oi = out.row(i).data();
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k).data();
      for (int j = 0; j < b.cols(); ++j) oi[j] += aik * bk[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != static_cast<int>(x.size())) throw InputError("matvec: dimension mismatch");
  std::vector<double> out(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    const double* r = a.row(i).data();
    for (int j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
  return out;
}

double inf_norm(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

SymMatrix SymMatrix::from(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("symmetric matrix must be square");
  SymMatrix s(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s.m_(i, j) = v;
      s.m_(j, i) = v;
    }
  }
  return s;
}

SymMatrix SymMatrix::diag(std::span<const double> d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.order(); ++i) s.m_(i, i) = d[i];
  return s;
}

SymMatrix SymMatrix::principal_submatrix(std::span<const int> idx) const {
  SymMatrix out(static_cast<int>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j <= i; ++j) out.set(static_cast<int>(i), static_cast<int>(j), m_(idx[i], idx[j]));
  return out;
}

double inf_norm(const SymMatrix& a) { return inf_norm(a.mat()); }

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

std::vector<double> vec_sub(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

std::vector<double> vec_add_scaled(std::span<const double> a, double t, std::span<const double> d) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * d[i];
  return out;
}

}  // namespace mesp
