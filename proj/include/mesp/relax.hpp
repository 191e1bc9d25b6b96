#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mesp/constants.hpp"
#include "mesp/instance.hpp"
#include "mesp/lp.hpp"

namespace mesp::relax {

// Feasible region { e^T x = s, lo <= x <= hi, A x <= b }. The box defaults
// to [0,1]^n; per-variable pins (lo_j = hi_j) are how fixing and probing
// constrain coordinates. Construction runs a phase-1 check and throws
// InfeasibleError when the region is empty.
class Polytope {
 public:
  Polytope(int n, int s, const std::optional<Constraints>& cons,
           std::vector<double> lo = {}, std::vector<double> hi = {});

  int n() const { return n_; }
  int s() const { return s_; }
  bool has_side_constraints() const { return problem_.rows.rows() > 1; }
  std::span<const double> lo() const { return problem_.lo; }
  std::span<const double> hi() const { return problem_.hi; }
  const lp::Problem& problem() const { return problem_; }

  bool contains(std::span<const double> x, double tolerance = tol::kFeas) const;

 private:
  int n_, s_;
  lp::Problem problem_;
};

// Vertex maximizing c^T x. Without side constraints this is the greedy
// top-s fill of the box (ties to the lowest index); otherwise the simplex.
std::vector<double> lp_oracle(const Polytope& poly, std::span<const double> c);

// Objective for maximize(): concave f with gradient, plus an optional
// specialized one-dimensional restriction builder used by line searches
// (returns t -> f(x + t d)).
struct Objective {
  std::function<double(std::span<const double>)> f;
  std::function<std::vector<double>(std::span<const double>)> grad;
  std::function<std::function<double(double)>(std::span<const double>,
                                              std::span<const double>)>
      line;  // optional
};

// Iterate kept as an explicit convex combination of polytope vertices so
// away steps and warm starts are possible.
struct ActiveSet {
  std::vector<std::vector<double>> vertices;
  std::vector<double> weights;
  std::vector<double> combination() const;
};

struct MaximizeOptions {
  double tol = tol::kFwTol;
  int max_iter = tol::kFwMaxIter;
  const ActiveSet* warm = nullptr;
};

// value/gap certificate at the returned point: for every feasible x',
// f(x') <= value + gap by concavity. gap is recomputed at the final iterate.
struct SolveReport {
  std::vector<double> x;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  ActiveSet active;
};

SolveReport maximize(const Polytope& poly, const Objective& obj,
                     const MaximizeOptions& options = {});

}  // namespace mesp::relax
