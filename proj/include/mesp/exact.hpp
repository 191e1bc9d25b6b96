#pragma once

#include "mesp/constants.hpp"
#include "mesp/instance.hpp"

namespace mesp {

// Exhaustive-enumeration result. z is the optimal ldet (natural log);
// optima holds every feasible s-subset within kTie of z.
struct ExactResult {
  double z = 0.0;
  std::vector<std::vector<int>> optima;
  long long count_feasible = 0;
  bool feasible = false;  // false when no subset satisfies the constraints
};

// Brute-force CMESP solve by lexicographic subset enumeration. Refuses with
// InputError when C(n,s) exceeds the budget. Singular submatrices score -inf.
ExactResult solve_exact(const Instance& inst, long long budget = tol::kEnumBudget);

}  // namespace mesp
