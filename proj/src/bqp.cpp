#include "mesp/bqp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mesp/constants.hpp"
#include "mesp/linalg.hpp"

namespace mesp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

MembershipReport bqp_membership(const BqpPoint& p, int s,
                                const std::optional<Constraints>& cons) {
  const int n = static_cast<int>(p.x.size());
  if (p.X.order() != n) throw InputError("bqp_membership: x and X orders differ");

  MembershipReport report;
  auto violated = [&](const std::string& cond, double residual) {
    report.violations.push_back({cond, residual});
  };

  // X - x x^T PSD
  {
    SymMatrix shifted(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) shifted.set(i, j, p.X(i, j) - p.x[i] * p.x[j]);
    const double lmin = eig_sym(shifted).lambda.back();
    if (lmin < -1e-8) violated("X - x x^T is not PSD", -lmin);
  }
  // diag(X) = x
  {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(p.X(i, i) - p.x[i]));
    if (worst > 1e-9) violated("diag(X) != x", worst);
  }
  // e^T x = s
  {
    double sum = 0.0;
    for (double v : p.x) sum += v;
    const double resid = std::fabs(sum - s);
    if (resid > 1e-9) violated("e^T x != s", resid);
  }
  // X e = s x
  {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += p.X(i, j);
      worst = std::max(worst, std::fabs(row - s * p.x[i]));
    }
    if (worst > 1e-8) violated("X e != s x", worst);
  }
  // A x <= b
  if (cons) {
    double worst = 0.0;
    for (int r = 0; r < cons->count(); ++r) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += cons->a(r, j) * p.x[j];
      worst = std::max(worst, lhs - cons->b[r]);
    }
    if (worst > 1e-9) violated("A x > b", worst);
  }
  return report;
}

SymMatrix bqp_kernel(const BqpPoint& p, const ScalingVector& scaling, const SymMatrix& c) {
  const int n = c.order();
  SymMatrix f = hadamard(sandwich_diag(scaling.values(), c), p.X);
  std::vector<double> slack(n);
  for (int i = 0; i < n; ++i) slack[i] = 1.0 - p.x[i];
  return add_to_diag(std::move(f), slack);
}

double bqp_value(const BqpPoint& p, const ScalingVector& scaling, const SymMatrix& c) {
  const auto chol = Cholesky::factor(bqp_kernel(p, scaling, c));
  if (!chol) return kNegInf;
  return chol->ldet() - 2.0 * dot(p.x, scaling.logs());
}

std::vector<double> bqp_grad_log_scaling(const BqpPoint& p, const ScalingVector& scaling,
                                         const SymMatrix& c) {
  const auto chol = Cholesky::factor(bqp_kernel(p, scaling, c));
  if (!chol) throw DomainError("bqp_grad_log_scaling: kernel not positive definite");
  const SymMatrix finv = chol->inverse();
  const int n = c.order();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = 2.0 * (1.0 - (1.0 - p.x[i]) * finv(i, i) - p.x[i]);
  return g;
}

SymMatrix bqp_hessian_log_scaling(const BqpPoint& p, const ScalingVector& scaling,
                                  const SymMatrix& c) {
  const auto chol = Cholesky::factor(bqp_kernel(p, scaling, c));
  if (!chol) throw DomainError("bqp_hessian_log_scaling: kernel not positive definite");
  const SymMatrix finv = chol->inverse();
  const int n = c.order();
  // limit form, PSD for all x <= e: H_ij = 4 (delta_ij u_i Finv_ii - u_i u_j Finv_ij^2)
  SymMatrix h(n);
  for (int i = 0; i < n; ++i) {
    const double ui = 1.0 - p.x[i];
    for (int j = 0; j <= i; ++j) {
      const double uj = 1.0 - p.x[j];
      double v = -4.0 * ui * uj * finv(i, j) * finv(i, j);
      if (i == j) v += 4.0 * ui * finv(i, i);
      h.set(i, j, v);
    }
  }
  return h;
}

}  // namespace mesp
