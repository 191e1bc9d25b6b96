#pragma once

#include <optional>

#include "mesp/instance.hpp"

namespace mesp {

// A feasible candidate solution: index set of size s with its ldet value.
struct Incumbent {
  std::vector<int> set;  // strictly increasing
  double value = 0.0;
  bool feasible = false;
};

// Forward selection maximizing incremental ldet, with a greedy
// feasibility-completion check under the side constraints. Singular
// additions score -inf. Ties break to the lowest index. Returns nullopt
// when no feasible completion is found.
std::optional<Incumbent> greedy_construct(const Instance& inst);

// Best-improvement single-swap local search; stops when no feasible swap
// improves the value by more than kSwapImprove. Deterministic. rounds_out,
// when given, receives the number of swap rounds performed.
Incumbent local_search(const Instance& inst, const Incumbent& start, int* rounds_out = nullptr);

// greedy_construct then local_search
std::optional<Incumbent> heuristic_solution(const Instance& inst);

}  // namespace mesp
