#pragma once

#include "mesp/scaling.hpp"

namespace mesp {

enum class ScalingMode { Scalar, Vector };  // CLI names: o, g

struct ProbeRecord {
  int index;           // original index
  int fixed_to;        // 0 or 1
  std::string method;
  double bound;        // certified probe bound (-inf when the pin is infeasible)
  double margin;       // lb - bound
};

struct FixResult {
  std::vector<int> fix0, fix1;  // original indices, sorted
  double lb = 0.0;
  std::vector<ProbeRecord> probes;
  int rounds = 0;
  std::vector<std::string> notes;
};

struct ProbeOptions {
  std::vector<double> lo, hi;  // pins already in force
  double tol = tol::kProbeGap;
  int max_iter = tol::kFwMaxIter;
};

// Single fixing pass with one bound method at a fixed scaling. For each free
// index j, a gradient-linearization screen selects candidates; a candidate is
// fixed only when re-solving the relaxation with x_j pinned yields a certified
// bound below lb - kFixMargin (and the probe gap is within kProbeGap).
// An infeasible pin fixes j directly.
FixResult probe_fix(const Instance& inst, double lb, BoundKind method,
                    const ScalingVector& scaling, const ProbeOptions& options = {});

// Round-robin over linx, ddfact, and complementary ddfact: re-optimize the
// scaling for the current shrunken instance (scalar: Newton; vector: up to
// kBfgsFixSteps BFGS steps from gamma* e), probe, apply fixes by deleting
// fix0 indices and pinning fix1 indices, refresh the heuristic lower bound,
// and repeat until a full round fixes nothing or the budget is exhausted.
FixResult iterate_fixing(const Instance& inst, double lb, ScalingMode mode,
                         int budget_rounds = 20);

}  // namespace mesp
