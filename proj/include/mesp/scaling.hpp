#pragma once

#include "mesp/bqp.hpp"
#include "mesp/report.hpp"

namespace mesp {

enum class BoundKind { Linx, Ddfact, DdfactComp };

std::string to_string(BoundKind kind);
std::optional<BoundKind> bound_kind_from_string(const std::string& name);

// Dispatch to the matching certified solver.
BoundReport solve_bound(BoundKind kind, const Instance& inst, const ScalingVector& scaling,
                        const SolveOptions& options = {});

struct ScalingOptions {
  double inner_tol = tol::kFwInnerScaling;
  int inner_max_iter = tol::kFwMaxIter;
  double grad_tol = 1e-6;
  std::vector<double> lo, hi;  // pins forwarded to the inner solves
};

struct TracePoint {
  int iteration;
  double value;
  double grad_norm;
};

enum class ScalingStatus { Converged, BudgetExhausted };

struct ScalingResult {
  ScalingVector best;
  double best_value = 0.0;
  std::vector<TracePoint> trace;
  ScalingStatus status = ScalingStatus::Converged;
};

// Quasi-Newton (BFGS on log scaling) minimization of the certified bound,
// with Armijo backtracking and the envelope gradient evaluated at the inner
// optimum. Monotone: best_value never exceeds the value at start.
ScalingResult optimize_vector_scaling(BoundKind kind, const Instance& inst,
                                      const ScalingVector& start, int max_steps,
                                      const ScalingOptions& options = {});

struct ScalarScalingResult {
  double gamma = 1.0;
  double value = 0.0;
  double derivative = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Safeguarded Newton on t = log gamma for the bound along the uniform-scaling
// line; stops when |d value/dt| < kNewtonDeriv or the iteration budget runs out.
ScalarScalingResult optimize_scalar_scaling(BoundKind kind, const Instance& inst,
                                            double gamma0,
                                            const ScalingOptions& options = {});

// Same Newton iteration for the lifted objective at a fixed member point
// (no inner solve involved).
ScalarScalingResult optimize_scalar_scaling_bqp(const BqpPoint& p, const SymMatrix& c,
                                                double gamma0);

}  // namespace mesp
