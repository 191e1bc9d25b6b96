#pragma once

#include <span>

#include "mesp/report.hpp"

namespace mesp {

// C = F F^T restricted to the numerical-rank eigenspace: F is n x k with
// k = r = #{eigenvalues > kRankRel * lambda_1}. Deterministic.
struct Factorization {
  Matrix f;  // n x k
  int k = 0;
  int r = 0;
};
Factorization factorize(const SymMatrix& c);

// The unique truncation index of the spectrum split: the first h in 0..s-1
// with lambda_h > mean(tail) >= lambda_{h+1} (lambda_0 = +inf, 1-based tail
// beyond h). Throws DomainError when the tail mass vanishes before s.
int truncation_index(std::span<const double> lambda, int s);

// Truncated-spectrum log-det surrogate: sum of logs of the `head` largest
// eigenvalues plus (s - head) times the log of the mean of the rest.
// weights is its gradient spectrum: 1/lambda_i up to head, constant after.
struct SpectrumValue {
  int head = 0;
  double value = 0.0;
  std::vector<double> weights;
};
SpectrumValue truncated_logdet(std::span<const double> lambda, int s);

// Weighted Gram matrix F^T Diag(scaling o x) F (k x k).
SymMatrix weighted_gram(std::span<const double> x, const ScalingVector& scaling,
                        const Factorization& fact);

// Objective value; -inf when the weighted Gram matrix has numerical rank < s.
double ddfact_value(std::span<const double> x, const ScalingVector& scaling,
                    const Factorization& fact, int s);

// gradient in x (the directional-derivative vector of the objective)
std::vector<double> ddfact_grad_x(std::span<const double> x, const ScalingVector& scaling,
                                  const Factorization& fact, int s);

// gradient in log-scaling coordinates
std::vector<double> ddfact_grad_log_scaling(std::span<const double> x,
                                            const ScalingVector& scaling,
                                            const Factorization& fact, int s);

BoundReport solve_ddfact(const Instance& inst, const ScalingVector& scaling,
                         const SolveOptions& options = {});

// Factorization bound of the complementary instance plus ldet C, reported
// as a bound on the original problem. scaling applies to the complementary
// program. Throws DomainError when C is numerically singular.
BoundReport solve_ddfact_complement(const Instance& inst, const ScalingVector& scaling,
                                    const SolveOptions& options = {});

}  // namespace mesp
