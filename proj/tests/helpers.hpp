#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "mesp/bqp.hpp"
#include "mesp/instance.hpp"
#include "mesp/rng.hpp"

namespace mesp::testing {

inline SymMatrix c2() {
  Matrix m(2, 2);
  m(0, 0) = 2;
  m(0, 1) = 1;
  m(1, 0) = 1;
  m(1, 1) = 2;
  return SymMatrix::from(m);
}

inline SymMatrix diag_matrix(std::vector<double> d) { return SymMatrix::diag(d); }

// random PD covariance C = G G^T + delta I
inline SymMatrix random_pd(Rng& rng, int n, double delta = 0.1) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Matrix c = matmul(g, transpose(g));
  for (int i = 0; i < n; ++i) c(i, i) += delta;
  return SymMatrix::from(c);
}

// random feasible point of { e^T x = s, 0 <= x <= 1 } via a normalized mix
// of random subset indicators
inline std::vector<double> random_simplex_point(Rng& rng, int n, int s, int mixes = 6) {
  std::vector<double> x(n, 0.0);
  for (int m = 0; m < mixes; ++m) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    for (int i = 0; i < s; ++i) x[perm[i]] += 1.0 / mixes;
  }
  return x;
}

// central finite differences of a scalar function
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double rel_err_inf(std::span<const double> got, std::span<const double> want) {
  double diff = 0.0, scale = 1.0;
  for (size_t i = 0; i < got.size(); ++i) {
    diff = std::max(diff, std::fabs(got[i] - want[i]));
    scale = std::max(scale, std::fabs(want[i]));
  }
  return diff / scale;
}

// exhaustive LP oracle over { e^T x = s, 0 <= x <= 1, A x <= b }: enumerates
// candidate vertices as basic solutions of tight-constraint subsets (desk
// scale only). Used to cross-check the simplex.
double brute_force_lp_max(int n, int s, const std::optional<Constraints>& cons,
                          std::span<const double> c);

// feasible binary subsets by enumeration
std::vector<std::vector<int>> feasible_subsets(const Instance& inst);

// random point of the lifted set: convex combination of integer lifts
inline BqpPoint random_member_point(Rng& rng, const Instance& inst, int lifts = 6) {
  const std::vector<std::vector<int>> sets = feasible_subsets(inst);
  const int n = inst.n();
  std::vector<double> x(n, 0.0);
  Matrix xx(n, n);
  std::vector<double> w(lifts);
  double total = 0.0;
  for (double& v : w) {
    v = 0.05 + rng.uniform();
    total += v;
  }
  for (double& v : w) v /= total;
  for (int l = 0; l < lifts; ++l) {
    const auto& set = sets[rng.uniform_int(0, static_cast<int>(sets.size()) - 1)];
    for (int i : set) {
      x[i] += w[l];
      for (int j : set) xx(i, j) += w[l];
    }
  }
  return BqpPoint(std::move(x), SymMatrix::from(xx));
}

inline ScalingVector random_scaling(Rng& rng, int n, double lo = 0.5, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& g : v) g = rng.uniform(lo, hi);
  return ScalingVector::from_values(std::move(v));
}

}  // namespace mesp::testing
