#pragma once

#include <span>
#include <vector>

#include "mesp/matrix.hpp"

namespace mesp::lp {

// max c^T x subject to row constraints (== or <=) and variable bounds.
// Dense bounded-variable primal simplex with Bland's rule; intended for
// n <= a few hundred and a handful of rows.
struct Problem {
  int n = 0;
  std::vector<double> lo, hi;  // size n; lo finite, hi may be +inf
  Matrix rows;                 // R x n
  std::vector<double> rhs;     // R
  std::vector<bool> eq;        // R: true -> equality, false -> "<="
};

enum class Status { Optimal, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double value = 0.0;
};

Result solve_max(const Problem& p, std::span<const double> c);

}  // namespace mesp::lp
