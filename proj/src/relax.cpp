#include "mesp/relax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mesp/errors.hpp"
#include "mesp/rng.hpp"

namespace mesp::relax {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// golden-section maximization of a concave restriction on [0, hi];
// -inf probes (domain failures) simply lose every comparison, which shrinks
// the step back into the domain
std::pair<double, double> golden_max(const std::function<double(double)>& phi, double hi,
                                     double f0) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0, b = hi;
  double best_t = 0.0, best_v = f0;

  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  const double span_tol = 1e-10 * std::max(1.0, hi);
  for (int it = 0; it < 80 && (b - a) > span_tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = phi(x1);
    }
  }
  if (f1 > best_v) {
    best_v = f1;
    best_t = x1;
  }
  if (f2 > best_v) {
    best_v = f2;
    best_t = x2;
  }
  const double fh = phi(hi);
  if (fh > best_v) {
    best_v = fh;
    best_t = hi;
  }
  return {best_t, best_v};
}

}  // namespace

std::vector<double> ActiveSet::combination() const {
  if (vertices.empty()) return {};
  std::vector<double> x(vertices.front().size(), 0.0);
  for (size_t k = 0; k < vertices.size(); ++k)
    for (size_t i = 0; i < x.size(); ++i) x[i] += weights[k] * vertices[k][i];
  return x;
}

Polytope::Polytope(int n, int s, const std::optional<Constraints>& cons,
                   std::vector<double> lo, std::vector<double> hi)
    : n_(n), s_(s) {
  if (n < 1 || s < 0) throw InputError("polytope: bad dimensions");
  if (lo.empty()) lo.assign(n, 0.0);
  if (hi.empty()) hi.assign(n, 1.0);
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
    throw InputError("polytope: bound vectors have the wrong size");

  const int m = cons ? cons->count() : 0;
  problem_.n = n;
  problem_.lo = std::move(lo);
  problem_.hi = std::move(hi);
  problem_.rows = Matrix(m + 1, n);
  problem_.rhs.assign(m + 1, 0.0);
  problem_.eq.assign(m + 1, false);
  for (int j = 0; j < n; ++j) problem_.rows(0, j) = 1.0;
  problem_.rhs[0] = static_cast<double>(s);
  problem_.eq[0] = true;
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) problem_.rows(r + 1, j) = cons->a(r, j);
    problem_.rhs[r + 1] = cons->b[r];
  }

  const std::vector<double> zero(n, 0.0);
  if (lp::solve_max(problem_, zero).status != lp::Status::Optimal)
    throw InfeasibleError("polytope is empty");
}

bool Polytope::contains(std::span<const double> x, double tolerance) const {
  if (static_cast<int>(x.size()) != n_) return false;
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (x[j] < problem_.lo[j] - tolerance || x[j] > problem_.hi[j] + tolerance) return false;
    sum += x[j];
  }
  if (std::fabs(sum - s_) > tolerance * std::max(1.0, static_cast<double>(s_))) return false;
  for (int r = 1; r < problem_.rows.rows(); ++r) {
    double lhs = 0.0;
    for (int j = 0; j < n_; ++j) lhs += problem_.rows(r, j) * x[j];
    if (lhs > problem_.rhs[r] + tolerance) return false;
  }
  return true;
}

std::vector<double> lp_oracle(const Polytope& poly, std::span<const double> c) {
  const int n = poly.n();
  if (static_cast<int>(c.size()) != n) throw InputError("lp_oracle: cost size mismatch");

  if (!poly.has_side_constraints()) {
    // greedy fill of the box under e^T x = s; ties break to the lowest index
    std::vector<double> x(poly.lo().begin(), poly.lo().end());
    double budget = poly.s();
    for (double v : x) budget -= v;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return c[i] > c[j]; });
    for (int j : order) {
      if (budget <= 0.0) break;
      const double room = poly.hi()[j] - x[j];
      const double take = std::min(room, budget);
      x[j] += take;
      budget -= take;
    }
    return x;
  }

  const lp::Result res = lp::solve_max(poly.problem(), c);
  if (res.status != lp::Status::Optimal)
    throw InfeasibleError("lp_oracle: polytope solve failed");
  return res.x;
}

namespace {

// deterministic spread of vertices whose average serves as the interior start;
// the ramp rotations cover every coordinate evenly
ActiveSet initial_active_set(const Polytope& poly, int extra_random_rounds) {
  const int n = poly.n();
  ActiveSet active;
  std::vector<double> cost(n);
  auto push_vertex = [&](const std::vector<double>& v) {
    for (const auto& w : active.vertices)
      if (w == v) return;
    active.vertices.push_back(v);
  };
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) cost[i] = static_cast<double>((i + k) % n) + 1.0;
    push_vertex(lp_oracle(poly, cost));
  }
  Rng rng(0x9e3779b97f4a7c15ULL);
  for (int round = 0; round < extra_random_rounds; ++round)
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) cost[i] = rng.uniform(-1.0, 1.0);
      push_vertex(lp_oracle(poly, cost));
    }
  active.weights.assign(active.vertices.size(), 1.0 / active.vertices.size());
  return active;
}

void prune_weights(ActiveSet& active) {
  double total = 0.0;
  for (size_t k = 0; k < active.vertices.size();) {
    if (active.weights[k] <= 1e-14) {
      active.vertices.erase(active.vertices.begin() + k);
      active.weights.erase(active.weights.begin() + k);
    } else {
      total += active.weights[k];
      ++k;
    }
  }
  if (total > 0.0)
    for (double& w : active.weights) w /= total;
}

}  // namespace

SolveReport maximize(const Polytope& poly, const Objective& obj, const MaximizeOptions& options) {
  ActiveSet active;
  if (options.warm && !options.warm->vertices.empty()) {
    active = *options.warm;
    // pins may have changed since the warm start was taken
    for (size_t k = 0; k < active.vertices.size();) {
      if (!poly.contains(active.vertices[k]))
        active.weights[k] = 0.0, ++k;
      else
        ++k;
    }
    prune_weights(active);
  }

  double fx = kNegInf;
  std::vector<double> x;
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (active.vertices.empty()) active = initial_active_set(poly, attempt);
    x = active.combination();
    fx = obj.f(x);
    if (fx > kNegInf) break;
    active = ActiveSet{};  // retry with a wider vertex spread
    if (attempt == 3)
      throw NumericalError("maximize: objective undefined at every computed start");
  }

  SolveReport report;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const std::vector<double> g = obj.grad(x);
    const std::vector<double> toward = lp_oracle(poly, g);
    const double gap = dot(g, toward) - dot(g, x);
    if (gap <= options.tol) break;

    // away vertex: the active vertex the gradient likes least
    size_t away = 0;
    double away_score = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < active.vertices.size(); ++k) {
      const double sc = dot(g, active.vertices[k]);
      if (sc < away_score) {
        away_score = sc;
        away = k;
      }
    }
    const double gap_away = dot(g, x) - away_score;

    bool away_step = false;
    std::vector<double> dir;
    double step_cap = 1.0;
    if (gap_away > gap && active.vertices.size() > 1 && active.weights[away] < 1.0 - 1e-12) {
      away_step = true;
      dir = vec_sub(x, active.vertices[away]);
      step_cap = active.weights[away] / (1.0 - active.weights[away]);
    } else {
      dir = vec_sub(toward, x);
    }

    std::function<double(double)> phi;
    if (obj.line)
      phi = obj.line(x, dir);
    else
      phi = [&](double t) { return obj.f(vec_add_scaled(x, t, dir)); };

    auto [t_star, f_star] = golden_max(phi, step_cap, fx);
    if (!(f_star > fx) || t_star <= 0.0) {
      if (!away_step) break;  // no progress along the steepest available direction
      // fall back to the plain direction before giving up
      dir = vec_sub(toward, x);
      step_cap = 1.0;
      if (obj.line)
        phi = obj.line(x, dir);
      else
        phi = [&](double t) { return obj.f(vec_add_scaled(x, t, dir)); };
      std::tie(t_star, f_star) = golden_max(phi, step_cap, fx);
      if (!(f_star > fx) || t_star <= 0.0) break;
      away_step = false;
    }

    if (away_step) {
      for (double& w : active.weights) w *= 1.0 + t_star;
      active.weights[away] -= t_star;
    } else {
      for (double& w : active.weights) w *= 1.0 - t_star;
      bool found = false;
      for (size_t k = 0; k < active.vertices.size(); ++k) {
        if (active.vertices[k] == toward) {
          active.weights[k] += t_star;
          found = true;
          break;
        }
      }
      if (!found) {
        active.vertices.push_back(toward);
        active.weights.push_back(t_star);
      }
    }
    prune_weights(active);
    std::vector<double> x_next = active.combination();
    const double fx_next = obj.f(x_next);
    if (fx_next == kNegInf) break;  // numerical edge; report the last finite iterate honestly
    x = std::move(x_next);
    fx = fx_next;
  }

  // certificate at the returned iterate
  const std::vector<double> g = obj.grad(x);
  const std::vector<double> toward = lp_oracle(poly, g);
  report.gap = std::max(0.0, dot(g, toward) - dot(g, x));
  report.x = std::move(x);
  report.value = fx;
  report.iterations = it;
  report.converged = report.gap <= options.tol;
  report.active = std::move(active);
  return report;
}

}  // namespace mesp::relax
