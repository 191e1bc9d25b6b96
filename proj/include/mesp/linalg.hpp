#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mesp/matrix.hpp"

namespace mesp {

// Eigendecomposition of a symmetric matrix: lambda descending, Q orthonormal
// with columns ordered to match lambda.
struct EigDecomp {
  std::vector<double> lambda;
  Matrix Q;
};

// Cyclic Jacobi rotations; converges when the off-diagonal Frobenius norm
// drops below kJacobiOffdiag * ||M||_F. Deterministic for fixed input.
EigDecomp eig_sym(const SymMatrix& m);

// log-determinant of a positive definite matrix, via the spectrum.
// Throws DomainError (carrying lambda_min) unless lambda_min > kPdRel * lambda_1.
double ldet_pd(const SymMatrix& m);

// Solve M X = B for positive definite M. One step of iterative refinement
// keeps the residual within kSolveResidual * (1 + ||B||_inf).
Matrix solve_pd(const SymMatrix& m, const Matrix& b);
std::vector<double> solve_pd(const SymMatrix& m, std::span<const double> b);

// Cholesky factorization with a positive-pivot guard. factor() returns
// nullopt when the matrix is not numerically PD; objective evaluations use
// that as their -inf domain signal instead of throwing in hot loops.
class Cholesky {
 public:
  static std::optional<Cholesky> factor(const SymMatrix& m);

  int order() const { return l_.rows(); }
  double ldet() const;
  std::vector<double> solve(std::span<const double> rhs) const;
  Matrix solve(const Matrix& rhs) const;
  SymMatrix inverse() const;

 private:
  explicit Cholesky(Matrix l) : l_(std::move(l)) {}
  Matrix l_;
};

// ldet of a principal submatrix; nullopt when not numerically PD.
std::optional<double> try_ldet_submatrix(const SymMatrix& c, std::span<const int> idx);

// structured products used throughout the bound modules
SymMatrix cdc(const SymMatrix& c, std::span<const double> x);                    // C Diag(x) C
SymMatrix sandwich_diag(std::span<const double> d, const SymMatrix& s);          // Diag(d) S Diag(d)
SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b);
SymMatrix add_to_diag(SymMatrix s, std::span<const double> d);

}  // namespace mesp
