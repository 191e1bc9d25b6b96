#include "mesp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mesp/constants.hpp"

namespace mesp {

namespace {

double frobenius(const SymMatrix& m) {
  double acc = 0.0;
  for (double v : m.mat().data()) acc += v * v;
  return std::sqrt(acc);
}

double offdiag_frobenius(const Matrix& a) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

// one Jacobi rotation zeroing a(p,q), accumulating into q_mat columns
void rotate(Matrix& a, Matrix& q_mat, int p, int q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const int n = a.rows();

  const double app = a(p, p), aqq = a(q, q);
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(p, k) = a(k, p);
    a(k, q) = s * akp + c * akq;
    a(q, k) = a(k, q);
  }
  for (int k = 0; k < n; ++k) {
    const double vkp = q_mat(k, p), vkq = q_mat(k, q);
    q_mat(k, p) = c * vkp - s * vkq;
    q_mat(k, q) = s * vkp + c * vkq;
  }
}

// deterministic eigenvector sign: largest-magnitude entry positive
void normalize_column_signs(Matrix& q_mat) {
  for (int j = 0; j < q_mat.cols(); ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < q_mat.rows(); ++i) {
      const double mag = std::fabs(q_mat(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (q_mat(arg, j) < 0.0)
      for (int i = 0; i < q_mat.rows(); ++i) q_mat(i, j) = -q_mat(i, j);
  }
}

}  // namespace

EigDecomp eig_sym(const SymMatrix& m) {
  for (double v : m.mat().data())
    if (!std::isfinite(v)) throw InputError("eig_sym: non-finite matrix entry");

  const int n = m.order();
  Matrix a = m.mat();
  Matrix q_mat = Matrix::identity(n);

  const double target = tol::kJacobiOffdiag * frobenius(m);
  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps; ++sweep) {
    if (offdiag_frobenius(a) <= target) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) rotate(a, q_mat, p, q);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });

  EigDecomp out;
  out.lambda.resize(n);
  out.Q = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.lambda[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.Q(i, j) = q_mat(i, order[j]);
  }
  normalize_column_signs(out.Q);
  return out;
}

double ldet_pd(const SymMatrix& m) {
  const EigDecomp eig = eig_sym(m);
  const double lmax = eig.lambda.front();
  const double lmin = eig.lambda.back();
  if (!(lmax > 0.0) || lmin <= tol::kPdRel * lmax)
    throw DomainError("ldet_pd: matrix not positive definite", lmin);
  double acc = 0.0;
  for (double l : eig.lambda) acc += std::log(l);
  return acc;
}

std::optional<Cholesky> Cholesky::factor(const SymMatrix& m) {
  const int n = m.order();
  Matrix l(n, n);
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
  if (!(max_diag > 0.0)) return std::nullopt;
  const double pivot_floor = tol::kPdRel * max_diag;

  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double v = m(i, j);
      const double* li = l.row(i).data();
      const double* lj = l.row(j).data();
      for (int k = 0; k < j; ++k) v -= li[k] * lj[k];
      l(i, j) = v / ljj;
    }
  }
  return Cholesky(std::move(l));
}

double Cholesky::ldet() const {
  double acc = 0.0;
  for (int i = 0; i < l_.rows(); ++i) acc += std::log(l_(i, i));
  return 2.0 * acc;
}

std::vector<double> Cholesky::solve(std::span<const double> rhs) const {
  const int n = l_.rows();
  std::vector<double> y(rhs.begin(), rhs.end());
  for (int i = 0; i < n; ++i) {
    double v = y[i];
    const double* li = l_.row(i).data();
    for (int k = 0; k < i; ++k) v -= li[k] * y[k];
    y[i] = v / l_(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = y[i];
    for (int k = i + 1; k < n; ++k) v -= l_(k, i) * y[k];
    y[i] = v / l_(i, i);
  }
  return y;
}

Matrix Cholesky::solve(const Matrix& rhs) const {
  const int n = l_.rows();
  Matrix x(n, rhs.cols());
  std::vector<double> col(n);
  for (int j = 0; j < rhs.cols(); ++j) {
    for (int i = 0; i < n; ++i) col[i] = rhs(i, j);
    const std::vector<double> sol = solve(col);
    for (int i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  return x;
}

SymMatrix Cholesky::inverse() const {
  return SymMatrix::from(solve(Matrix::identity(l_.rows())));
}

Matrix solve_pd(const SymMatrix& m, const Matrix& b) {
  if (m.order() != b.rows()) throw InputError("solve_pd: dimension mismatch");
  const auto chol = Cholesky::factor(m);
  if (!chol) throw DomainError("solve_pd: matrix not positive definite");
  Matrix x = chol->solve(b);
  // one refinement pass to hold the residual contract
  Matrix r = b;
  const Matrix mx = matmul(m.mat(), x);
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) -= mx(i, j);
  const Matrix dx = chol->solve(r);
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) += dx(i, j);
  return x;
}

std::vector<double> solve_pd(const SymMatrix& m, std::span<const double> b) {
  Matrix rhs(m.order(), 1);
  for (int i = 0; i < m.order(); ++i) rhs(i, 0) = b[i];
  const Matrix x = solve_pd(m, rhs);
  std::vector<double> out(m.order());
  for (int i = 0; i < m.order(); ++i) out[i] = x(i, 0);
  return out;
}

std::optional<double> try_ldet_submatrix(const SymMatrix& c, std::span<const int> idx) {
  const SymMatrix sub = c.principal_submatrix(idx);
  const auto chol = Cholesky::factor(sub);
  if (!chol) return std::nullopt;
  return chol->ldet();
}

SymMatrix cdc(const SymMatrix& c, std::span<const double> x) {
  const int n = c.order();
  // (C Diag(x)) C with the scaling fused into the accumulation
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    double* oi = out.row(i).data();
    const double* ci = c.mat().row(i).data();
    for (int k = 0; k < n; ++k) {
      const double w = ci[k] * x[k];
      if (w == 0.0) continue;
      const double* ck = c.mat().row(k).data();
      for (int j = 0; j < n; ++j) oi[j] += w * ck[j];
    }
  }
  return SymMatrix::from(out);
}

SymMatrix sandwich_diag(std::span<const double> d, const SymMatrix& s) {
  SymMatrix out(s.order());
  for (int i = 0; i < s.order(); ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, d[i] * s(i, j) * d[j]);
  return out;
}

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw InputError("hadamard: order mismatch");
  SymMatrix out(a.order());
  for (int i = 0; i < a.order(); ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, a(i, j) * b(i, j));
  return out;
}

SymMatrix add_to_diag(SymMatrix s, std::span<const double> d) {
  for (int i = 0; i < s.order(); ++i) s.set(i, i, s(i, i) + d[i]);
  return s;
}

}  // namespace mesp
