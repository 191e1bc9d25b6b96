#include "mesp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mesp/constants.hpp"

namespace mesp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_violation(const Instance& inst, std::span<const int> set) {
  if (!inst.constraints()) return 0.0;
  const Constraints& cons = *inst.constraints();
  double worst = 0.0;
  for (int r = 0; r < cons.count(); ++r) {
    double lhs = 0.0;
    for (int j : set) lhs += cons.a(r, j);
    worst = std::max(worst, lhs - cons.b[r]);
  }
  return worst;
}

// Greedy completion attempt: grow the partial set to size s, each step adding
// the index that minimizes the worst constraint violation (ties to the lowest
// index), then test feasibility of the completed set. A failed attempt only
// rejects the candidate, it does not prove infeasibility.
bool completion_feasible(const Instance& inst, std::vector<int> partial) {
  if (!inst.constraints()) return true;
  const int n = inst.n();
  std::vector<char> used(n, 0);
  for (int j : partial) used[j] = 1;
  while (static_cast<int>(partial.size()) < inst.s()) {
    int best = -1;
    double best_violation = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      partial.push_back(j);
      const double v = max_violation(inst, partial);
      partial.pop_back();
      if (v < best_violation - 1e-15) {
        best_violation = v;
        best = j;
      }
    }
    if (best < 0) return false;
    partial.push_back(best);
    used[best] = 1;
  }
  std::sort(partial.begin(), partial.end());
  return max_violation(inst, partial) <= tol::kFeas;
}

}  // namespace

std::optional<Incumbent> greedy_construct(const Instance& inst) {
  const int n = inst.n();
  std::vector<int> set;
  std::vector<char> used(n, 0);

  for (int step = 0; step < inst.s(); ++step) {
    int best = -1;
    double best_value = kNegInf;
    bool best_finite = false;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      std::vector<int> trial(set);
      trial.insert(std::lower_bound(trial.begin(), trial.end(), j), j);
      if (!completion_feasible(inst, trial)) continue;
      const auto v = try_ldet_submatrix(inst.C(), trial);
      if (v) {
        if (!best_finite || *v > best_value) {
          best_finite = true;
          best_value = *v;
          best = j;
        }
      } else if (best < 0) {
        best = j;  // singular addition: kept only if nothing finite shows up
      }
    }
    if (best < 0) return std::nullopt;
    set.insert(std::lower_bound(set.begin(), set.end(), best), best);
    used[best] = 1;
  }

  const auto value = try_ldet_submatrix(inst.C(), set);
  if (!value) return std::nullopt;
  Incumbent inc;
  inc.set = std::move(set);
  inc.value = *value;
  inc.feasible = inst.feasible_set(inc.set);
  if (!inc.feasible) return std::nullopt;
  return inc;
}

Incumbent local_search(const Instance& inst, const Incumbent& start, int* rounds_out) {
  if (static_cast<int>(start.set.size()) != inst.s())
    throw InputError("local_search: start set has the wrong cardinality");
  if (!inst.feasible_set(start.set)) throw InputError("local_search: start is infeasible");

  Incumbent cur = start;
  const auto v0 = try_ldet_submatrix(inst.C(), cur.set);
  cur.value = v0 ? *v0 : kNegInf;
  cur.feasible = true;
  if (rounds_out) *rounds_out = 0;

  const int n = inst.n();
  for (int round = 0; round < tol::kMaxSwapRounds; ++round) {
    if (rounds_out) *rounds_out = round;
    double best_value = cur.value;
    int best_out = -1, best_in = -1;
    std::vector<char> used(n, 0);
    for (int j : cur.set) used[j] = 1;

    for (int oi = 0; oi < inst.s(); ++oi) {
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        std::vector<int> trial(cur.set);
        trial.erase(trial.begin() + oi);
        trial.insert(std::lower_bound(trial.begin(), trial.end(), j), j);
        if (!inst.feasible_set(trial)) continue;
        const auto v = try_ldet_submatrix(inst.C(), trial);
        if (v && *v > best_value + tol::kSwapImprove) {
          best_value = *v;
          best_out = oi;
          best_in = j;
        }
      }
    }
    if (best_out < 0) break;
    std::vector<int> next(cur.set);
    next.erase(next.begin() + best_out);
    next.insert(std::lower_bound(next.begin(), next.end(), best_in), best_in);
    cur.set = std::move(next);
    cur.value = best_value;
  }
  return cur;
}

std::optional<Incumbent> heuristic_solution(const Instance& inst) {
  const auto start = greedy_construct(inst);
  if (!start) return std::nullopt;
  return local_search(inst, *start);
}

}  // namespace mesp
