#pragma once

#include <span>

#include "mesp/report.hpp"

namespace mesp {

// Kernel of the linx objective:
//   Diag(scaling) C Diag(x) C Diag(scaling) + Diag(e - x).
SymMatrix linx_kernel(std::span<const double> x, const ScalingVector& scaling,
                      const SymMatrix& c);

// 0.5 * ldet(kernel) - sum_i x_i log gamma_i; -inf when the kernel is not PD.
double linx_value(std::span<const double> x, const ScalingVector& scaling,
                  const SymMatrix& c);

// gradient in x (throws DomainError when the kernel is not PD)
std::vector<double> linx_grad_x(std::span<const double> x, const ScalingVector& scaling,
                                const SymMatrix& c);

// gradient and Hessian of the objective in log-scaling coordinates
std::vector<double> linx_grad_log_scaling(std::span<const double> x,
                                          const ScalingVector& scaling,
                                          const SymMatrix& c);
SymMatrix linx_hessian_log_scaling(std::span<const double> x, const ScalingVector& scaling,
                                   const SymMatrix& c);

// Certified solve of the linx relaxation over the instance polytope.
BoundReport solve_linx(const Instance& inst, const ScalingVector& scaling,
                       const SolveOptions& options = {});

}  // namespace mesp
