#pragma once

#include <optional>
#include <span>
#include <string>

#include "mesp/instance.hpp"

namespace mesp {

// A point of the lifted relaxation: x paired with its second-moment proxy X.
struct BqpPoint {
  std::vector<double> x;
  SymMatrix X;
  BqpPoint(std::vector<double> x_in, SymMatrix x_mat)
      : x(std::move(x_in)), X(std::move(x_mat)) {}
};

struct MembershipReport {
  struct Violation {
    std::string condition;
    double residual;
  };
  std::vector<Violation> violations;
  bool member() const { return violations.empty(); }
};

// Checks each lifted-set condition individually: X - x x^T PSD, diag(X) = x,
// e^T x = s, X e = s x, and A x <= b when constraints are given.
MembershipReport bqp_membership(const BqpPoint& p, int s,
                                const std::optional<Constraints>& cons = std::nullopt);

// Kernel (Diag(scaling) C Diag(scaling)) o X + Diag(e - x).
SymMatrix bqp_kernel(const BqpPoint& p, const ScalingVector& scaling, const SymMatrix& c);

// ldet(kernel) - 2 sum_i x_i log gamma_i; -inf when the kernel is not PD.
double bqp_value(const BqpPoint& p, const ScalingVector& scaling, const SymMatrix& c);

// gradient and Hessian in log-scaling coordinates at a fixed point
std::vector<double> bqp_grad_log_scaling(const BqpPoint& p, const ScalingVector& scaling,
                                         const SymMatrix& c);
SymMatrix bqp_hessian_log_scaling(const BqpPoint& p, const ScalingVector& scaling,
                                  const SymMatrix& c);

}  // namespace mesp
