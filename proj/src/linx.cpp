#include "mesp/linx.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mesp/linalg.hpp"

namespace mesp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::optional<Cholesky> factor_kernel(std::span<const double> x, const ScalingVector& scaling,
                                      const SymMatrix& c) {
  return Cholesky::factor(linx_kernel(x, scaling, c));
}

}  // namespace

SymMatrix linx_kernel(std::span<const double> x, const ScalingVector& scaling,
                      const SymMatrix& c) {
  const int n = c.order();
  SymMatrix f = sandwich_diag(scaling.values(), cdc(c, x));
  std::vector<double> slack(n);
  for (int i = 0; i < n; ++i) slack[i] = 1.0 - x[i];
  return add_to_diag(std::move(f), slack);
}

double linx_value(std::span<const double> x, const ScalingVector& scaling, const SymMatrix& c) {
  const auto chol = factor_kernel(x, scaling, c);
  if (!chol) return kNegInf;
  return 0.5 * chol->ldet() - dot(x, scaling.logs());
}

std::vector<double> linx_grad_x(std::span<const double> x, const ScalingVector& scaling,
                                const SymMatrix& c) {
  const auto chol = factor_kernel(x, scaling, c);
  if (!chol) throw DomainError("linx_grad_x: kernel not positive definite");
  const int n = c.order();
  const SymMatrix finv = chol->inverse();
  const SymMatrix finv_scaled = sandwich_diag(scaling.values(), finv);
  const Matrix p = matmul(finv_scaled.mat(), c.mat());

  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double quad = 0.0;  // (C Diag(g) Finv Diag(g) C)_ii
    for (int k = 0; k < n; ++k) quad += c(i, k) * p(k, i);
    g[i] = 0.5 * (quad - finv(i, i)) - scaling.log(i);
  }
  return g;
}

std::vector<double> linx_grad_log_scaling(std::span<const double> x,
                                          const ScalingVector& scaling, const SymMatrix& c) {
  const auto chol = factor_kernel(x, scaling, c);
  if (!chol) throw DomainError("linx_grad_log_scaling: kernel not positive definite");
  const SymMatrix finv = chol->inverse();
  const int n = c.order();
  // with A the scaled quadratic part, A F^{-1} = I - Diag(e-x) F^{-1}
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = 1.0 - (1.0 - x[i]) * finv(i, i) - x[i];
  return g;
}

SymMatrix linx_hessian_log_scaling(std::span<const double> x, const ScalingVector& scaling,
                                   const SymMatrix& c) {
  const auto chol = factor_kernel(x, scaling, c);
  if (!chol) throw DomainError("linx_hessian_log_scaling: kernel not positive definite");
  const SymMatrix finv = chol->inverse();
  const int n = c.order();
  // limit form with u = e - x; well-defined for all x <= e and PSD:
  //   H_ij = 2 (delta_ij u_i Finv_ii - u_i u_j Finv_ij^2)
  SymMatrix h(n);
  for (int i = 0; i < n; ++i) {
    const double ui = 1.0 - x[i];
    for (int j = 0; j <= i; ++j) {
      const double uj = 1.0 - x[j];
      double v = -2.0 * ui * uj * finv(i, j) * finv(i, j);
      if (i == j) v += 2.0 * ui * finv(i, i);
      h.set(i, j, v);
    }
  }
  return h;
}

namespace {

// shared evaluator for the solver: caches the kernel factorization at the
// current iterate and provides the 1-D restriction used by line searches
class LinxModel {
 public:
  LinxModel(const SymMatrix& c, const ScalingVector& scaling) : c_(c), scaling_(scaling) {}

  relax::Objective objective() const {
    relax::Objective obj;
    obj.f = [this](std::span<const double> x) { return linx_value(x, scaling_, c_); };
    obj.grad = [this](std::span<const double> x) { return linx_grad_x(x, scaling_, c_); };
    obj.line = [this](std::span<const double> x, std::span<const double> d) {
      return line_restriction(x, d);
    };
    return obj;
  }

 private:
  std::function<double(double)> line_restriction(std::span<const double> x,
                                                 std::span<const double> d) const {
    const int n = c_.order();
    // F(x + t d) = F(x) + t E with E = Diag(g) C Diag(d) C Diag(g) - Diag(d)
    SymMatrix f0 = linx_kernel(x, scaling_, c_);
    SymMatrix e = sandwich_diag(scaling_.values(), cdc(c_, d));
    std::vector<double> neg_d(n);
    for (int i = 0; i < n; ++i) neg_d[i] = -d[i];
    e = add_to_diag(std::move(e), neg_d);

    const double base = -dot(x, scaling_.logs());
    const double slope = -dot(d, scaling_.logs());
    return [n, f0 = std::move(f0), e = std::move(e), base, slope](double t) {
      SymMatrix ft(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) ft.set(i, j, f0(i, j) + t * e(i, j));
      const auto chol = Cholesky::factor(ft);
      if (!chol) return kNegInf;
      return 0.5 * chol->ldet() + base + t * slope;
    };
  }

  const SymMatrix& c_;
  const ScalingVector& scaling_;
};

}  // namespace

BoundReport solve_linx(const Instance& inst, const ScalingVector& scaling,
                       const SolveOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const relax::Polytope poly(inst.n(), inst.s(), inst.constraints(), options.lo, options.hi);
  const LinxModel model(inst.C(), scaling);

  relax::MaximizeOptions mopts;
  mopts.tol = options.tol;
  mopts.max_iter = options.max_iter;
  mopts.warm = options.warm;
  relax::SolveReport rep = relax::maximize(poly, model.objective(), mopts);

  BoundReport out;
  out.method = "linx";
  out.value = rep.value;
  out.gap = rep.gap;
  out.bound = rep.value + rep.gap;
  out.x = std::move(rep.x);
  out.scaling = scaling;
  out.iterations = rep.iterations;
  out.converged = rep.converged;
  out.active = std::move(rep.active);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace mesp
