#include "mesp/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mesp/ddfact.hpp"
#include "mesp/linx.hpp"

namespace mesp {

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Linx: return "linx";
    case BoundKind::Ddfact: return "ddfact";
    case BoundKind::DdfactComp: return "ddfact-comp";
  }
  return "?";
}

std::optional<BoundKind> bound_kind_from_string(const std::string& name) {
  if (name == "linx") return BoundKind::Linx;
  if (name == "ddfact") return BoundKind::Ddfact;
  if (name == "ddfact-comp") return BoundKind::DdfactComp;
  return std::nullopt;
}

BoundReport solve_bound(BoundKind kind, const Instance& inst, const ScalingVector& scaling,
                        const SolveOptions& options) {
  switch (kind) {
    case BoundKind::Linx: return solve_linx(inst, scaling, options);
    case BoundKind::Ddfact: return solve_ddfact(inst, scaling, options);
    case BoundKind::DdfactComp: return solve_ddfact_complement(inst, scaling, options);
  }
  throw InputError("unknown bound kind");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The bound problem the optimizers actually touch. Complementary runs are
// rebased onto the complement instance once, so every inner solve is a plain
// linx/ddfact solve plus a constant offset.
struct ScalingProblem {
  BoundKind inner_kind;
  Instance inst;
  double offset = 0.0;
  std::optional<Factorization> fact;
  SolveOptions solve_options;
  bool normalize = false;  // project out the flat uniform direction (ddfact)

  static ScalingProblem make(BoundKind kind, const Instance& original,
                             const ScalingOptions& options) {
    SolveOptions sopts;
    sopts.tol = options.inner_tol;
    sopts.max_iter = options.inner_max_iter;
    sopts.lo = options.lo;
    sopts.hi = options.hi;

    if (kind == BoundKind::DdfactComp) {
      auto [comp, offset] = complement(original);
      if (!sopts.lo.empty() || !sopts.hi.empty()) {
        const int n = original.n();
        std::vector<double> lo = sopts.lo.empty() ? std::vector<double>(n, 0.0) : sopts.lo;
        std::vector<double> hi = sopts.hi.empty() ? std::vector<double>(n, 1.0) : sopts.hi;
        sopts.lo.resize(n);
        sopts.hi.resize(n);
        for (int i = 0; i < n; ++i) {
          sopts.lo[i] = 1.0 - hi[i];
          sopts.hi[i] = 1.0 - lo[i];
        }
      }
      ScalingProblem p{BoundKind::Ddfact, std::move(comp), offset, std::nullopt, sopts, true};
      p.fact = factorize(p.inst.C());
      return p;
    }
    ScalingProblem p{kind, original, 0.0, std::nullopt, sopts, kind == BoundKind::Ddfact};
    if (kind == BoundKind::Ddfact) p.fact = factorize(p.inst.C());
    return p;
  }

  struct Eval {
    double value = 0.0;               // certified bound incl. offset
    std::vector<double> grad;         // envelope gradient in log scaling
    relax::ActiveSet active;
  };

  Eval evaluate(const ScalingVector& scaling, const relax::ActiveSet* warm) const {
    SolveOptions sopts = solve_options;
    sopts.warm = warm;
    BoundReport rep = inner_kind == BoundKind::Linx ? solve_linx(inst, scaling, sopts)
                                                    : solve_ddfact(inst, scaling, sopts);
    Eval ev;
    ev.value = rep.bound + offset;
    ev.grad = inner_kind == BoundKind::Linx
                  ? linx_grad_log_scaling(rep.x, scaling, inst.C())
                  : ddfact_grad_log_scaling(rep.x, scaling, *fact, inst.s());
    ev.active = std::move(rep.active);
    return ev;
  }

  // second derivative of the bound along the uniform-scaling line at the
  // inner optimum; closed form only for linx
  std::optional<double> uniform_curvature(std::span<const double> x,
                                          const ScalingVector& scaling) const {
    if (inner_kind != BoundKind::Linx) return std::nullopt;
    const SymMatrix h = linx_hessian_log_scaling(x, scaling, inst.C());
    double acc = 0.0;
    for (int i = 0; i < h.order(); ++i)
      for (int j = 0; j < h.order(); ++j) acc += h(i, j);
    return acc;
  }

  Instance solved_instance() const { return inst; }
};

void normalize_logs(std::vector<double>& logs) {
  double mean = 0.0;
  for (double t : logs) mean += t;
  mean /= static_cast<double>(logs.size());
  for (double& t : logs) t -= mean;
}

std::vector<double> apply_inverse_hessian(const Matrix& hinv, std::span<const double> g) {
  std::vector<double> d(g.size(), 0.0);
  for (int i = 0; i < hinv.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < hinv.cols(); ++j) acc += hinv(i, j) * g[j];
    d[i] = -acc;
  }
  return d;
}

void bfgs_update(Matrix& hinv, std::span<const double> step, std::span<const double> ygrad) {
  const int n = hinv.rows();
  const double sy = dot(step, ygrad);
  double snorm = 0.0, ynorm = 0.0;
  for (double v : step) snorm += v * v;
  for (double v : ygrad) ynorm += v * v;
  if (!(sy > 1e-12 * std::sqrt(snorm * ynorm))) return;  // curvature check

  const double rho = 1.0 / sy;
  std::vector<double> hy(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += hinv(i, j) * ygrad[j];
    hy[i] = acc;
  }
  const double yhy = dot(ygrad, hy);
  // H <- H - rho (H y s^T + s y^T H) + rho^2 (y^T H y) s s^T + rho s s^T
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      hinv(i, j) += -rho * (hy[i] * step[j] + step[i] * hy[j]) +
                    (rho * rho * yhy + rho) * step[i] * step[j];
}

}  // namespace

ScalingResult optimize_vector_scaling(BoundKind kind, const Instance& inst,
                                      const ScalingVector& start, int max_steps,
                                      const ScalingOptions& options) {
  if (start.size() != inst.n()) throw InputError("scaling vector size differs from n");
  const ScalingProblem problem = ScalingProblem::make(kind, inst, options);

  std::vector<double> t(start.logs().begin(), start.logs().end());
  if (problem.normalize) normalize_logs(t);

  ScalingVector ups = ScalingVector::from_logs(t);
  ScalingProblem::Eval cur = problem.evaluate(ups, nullptr);

  ScalingResult result;
  result.best = ups;
  result.best_value = cur.value;
  result.trace.push_back({0, cur.value, inf_norm(cur.grad)});
  result.status = ScalingStatus::Converged;

  const int n = inst.n();
  Matrix hinv = Matrix::identity(n);

  for (int step_idx = 1; step_idx <= max_steps; ++step_idx) {
    if (inf_norm(cur.grad) <= options.grad_tol) break;

    std::vector<double> dir = apply_inverse_hessian(hinv, cur.grad);
    double descent = dot(dir, cur.grad);
    if (!(descent < 0.0)) {  // reset to steepest descent
      hinv = Matrix::identity(n);
      for (size_t i = 0; i < dir.size(); ++i) dir[i] = -cur.grad[i];
      descent = dot(dir, cur.grad);
    }

    // Armijo backtracking; failed bound evaluations count as rejections
    bool accepted = false;
    std::vector<double> t_next;
    ScalingProblem::Eval next;
    double alpha = 1.0;
    for (int halving = 0; halving < 30 && !accepted; ++halving, alpha *= 0.5) {
      std::vector<double> trial(t);
      for (int i = 0; i < n; ++i) trial[i] += alpha * dir[i];
      if (problem.normalize) normalize_logs(trial);
      try {
        const ScalingVector trial_ups = ScalingVector::from_logs(trial);
        ScalingProblem::Eval ev = problem.evaluate(trial_ups, &cur.active);
        if (ev.value <= cur.value + 1e-4 * alpha * descent) {
          accepted = true;
          t_next = std::move(trial);
          next = std::move(ev);
        }
      } catch (const std::exception&) {
        // trial outside the bound's domain: shrink
      }
    }
    if (!accepted) break;  // line-search stall: local flatness

    std::vector<double> delta(n), ydelta(n);
    for (int i = 0; i < n; ++i) {
      delta[i] = t_next[i] - t[i];
      ydelta[i] = next.grad[i] - cur.grad[i];
    }
    bfgs_update(hinv, delta, ydelta);

    t = std::move(t_next);
    cur = std::move(next);
    result.trace.push_back({step_idx, cur.value, inf_norm(cur.grad)});
    if (cur.value < result.best_value) {
      result.best_value = cur.value;
      result.best = ScalingVector::from_logs(t);
    }
    if (step_idx == max_steps) result.status = ScalingStatus::BudgetExhausted;
  }
  return result;
}

ScalarScalingResult optimize_scalar_scaling(BoundKind kind, const Instance& inst, double gamma0,
                                            const ScalingOptions& options) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  const ScalingProblem problem = ScalingProblem::make(kind, inst, options);
  const int n = inst.n();

  struct Probe {
    double value, d1, d2;
    bool has_d2;
  };
  relax::ActiveSet warm;
  auto probe = [&](double t) {
    const ScalingVector ups = ScalingVector::uniform(n, std::exp(t));
    SolveOptions sopts = problem.solve_options;
    sopts.warm = warm.vertices.empty() ? nullptr : &warm;
    BoundReport rep = problem.inner_kind == BoundKind::Linx
                          ? solve_linx(problem.inst, ups, sopts)
                          : solve_ddfact(problem.inst, ups, sopts);
    warm = rep.active;
    const std::vector<double> g =
        problem.inner_kind == BoundKind::Linx
            ? linx_grad_log_scaling(rep.x, ups, problem.inst.C())
            : ddfact_grad_log_scaling(rep.x, ups, *problem.fact, problem.inst.s());
    double d1 = 0.0;
    for (double v : g) d1 += v;
    if (!std::isfinite(d1)) throw NumericalError("scalar scaling: non-finite derivative");
    const auto d2 = problem.uniform_curvature(rep.x, ups);
    return Probe{rep.bound + problem.offset, d1, d2.value_or(0.0), d2.has_value()};
  };

  double t = std::log(gamma0);
  double lo = -kInf, hi = kInf;
  ScalarScalingResult out;
  Probe cur = probe(t);
  out.value = cur.value;
  out.derivative = cur.d1;
  out.gamma = std::exp(t);

  for (int iter = 1; iter <= tol::kNewtonMaxIter; ++iter) {
    out.iterations = iter;
    if (std::fabs(cur.d1) < tol::kNewtonDeriv) {
      out.converged = true;
      break;
    }
    // bracket the stationary point of the convex profile
    if (cur.d1 > 0.0)
      hi = std::min(hi, t);
    else
      lo = std::max(lo, t);

    double t_next;
    if (cur.has_d2 && cur.d2 > 1e-14) {
      t_next = t - cur.d1 / cur.d2;
      const double cap = 1.0;  // damped step
      t_next = std::clamp(t_next, t - cap, t + cap);
    } else {
      t_next = t - (cur.d1 > 0.0 ? 0.25 : -0.25);  // derivative-sign step
    }
    if (std::isfinite(lo) && std::isfinite(hi) && (t_next <= lo || t_next >= hi))
      t_next = 0.5 * (lo + hi);

    t = t_next;
    cur = probe(t);
    out.gamma = std::exp(t);
    out.value = cur.value;
    out.derivative = cur.d1;
  }
  return out;
}

ScalarScalingResult optimize_scalar_scaling_bqp(const BqpPoint& p, const SymMatrix& c,
                                                double gamma0) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  const int n = c.order();

  auto probe = [&](double t) {
    const ScalingVector ups = ScalingVector::uniform(n, std::exp(t));
    const double value = bqp_value(p, ups, c);
    const std::vector<double> g = bqp_grad_log_scaling(p, ups, c);
    const SymMatrix h = bqp_hessian_log_scaling(p, ups, c);
    double d1 = 0.0;
    for (double v : g) d1 += v;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d2 += h(i, j);
    if (!std::isfinite(d1)) throw NumericalError("scalar scaling: non-finite derivative");
    return std::array<double, 3>{value, d1, d2};
  };

  double t = std::log(gamma0);
  double lo = -kInf, hi = kInf;
  auto cur = probe(t);
  ScalarScalingResult out;
  out.gamma = std::exp(t);
  out.value = cur[0];
  out.derivative = cur[1];

  for (int iter = 1; iter <= tol::kNewtonMaxIter; ++iter) {
    out.iterations = iter;
    if (std::fabs(cur[1]) < tol::kNewtonDeriv) {
      out.converged = true;
      break;
    }
    if (cur[1] > 0.0)
      hi = std::min(hi, t);
    else
      lo = std::max(lo, t);
    double t_next = cur[2] > 1e-14 ? t - cur[1] / cur[2] : t - (cur[1] > 0.0 ? 0.25 : -0.25);
    t_next = std::clamp(t_next, t - 1.0, t + 1.0);
    if (std::isfinite(lo) && std::isfinite(hi) && (t_next <= lo || t_next >= hi))
      t_next = 0.5 * (lo + hi);
    t = t_next;
    cur = probe(t);
    out.gamma = std::exp(t);
    out.value = cur[0];
    out.derivative = cur[1];
  }
  return out;
}

}  // namespace mesp
