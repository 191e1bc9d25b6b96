#include "mesp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mesp {

namespace {

// C(n,s) with saturation at the budget
long long choose_capped(int n, int s, long long cap) {
  long long acc = 1;
  for (int i = 1; i <= s; ++i) {
    acc = acc * (n - s + i) / i;
    if (acc > cap) return cap + 1;
  }
  return acc;
}

bool next_combination(std::vector<int>& idx, int n) {
  const int s = static_cast<int>(idx.size());
  int i = s - 1;
  while (i >= 0 && idx[i] == n - s + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

}  // namespace

ExactResult solve_exact(const Instance& inst, long long budget) {
  const int n = inst.n();
  const int s = inst.s();
  if (choose_capped(n, s, budget) > budget)
    throw InputError("solve_exact: subset count exceeds the enumeration budget");

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  ExactResult result;
  result.z = kNegInf;

  std::vector<int> idx(s);
  for (int i = 0; i < s; ++i) idx[i] = i;

  // running best plus any set within the tie band of the current best;
  // the band is re-filtered against the final z at the end
  std::vector<std::pair<double, std::vector<int>>> near_best;
  do {
    if (!inst.feasible_set(idx)) continue;
    ++result.count_feasible;
    const auto value = try_ldet_submatrix(inst.C(), idx);
    const double v = value ? *value : kNegInf;
    if (v == kNegInf) continue;
    if (v > result.z) result.z = v;
    if (v >= result.z - tol::kTie) {
      near_best.emplace_back(v, idx);
      if (near_best.size() > 4096) {
        std::erase_if(near_best,
                      [&](const auto& p) { return p.first < result.z - tol::kTie; });
      }
    }
  } while (next_combination(idx, n));

  result.feasible = result.count_feasible > 0;
  if (result.z > kNegInf)
    for (auto& [v, set] : near_best)
      if (v >= result.z - tol::kTie) result.optima.push_back(std::move(set));
  return result;
}

}  // namespace mesp
