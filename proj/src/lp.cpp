#include "mesp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mesp/constants.hpp"
#include "mesp/errors.hpp"

namespace mesp::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRatioTol = 1e-11;

enum class VarState { Lower, Upper, Basic };

// Dense tableau with bounded variables: structural columns, one slack per
// "<=" row, one artificial per row. Bland's rule (lowest entering index,
// lowest basic variable index on ratio ties) keeps the iteration cycle-free.
struct Tableau {
  int rows = 0, vars = 0, n = 0, art0 = 0;
  Matrix t;                 // rows x vars, kept row-reduced on the basis
  std::vector<double> b;    // transformed right-hand side
  std::vector<int> basis;   // row -> basic variable
  std::vector<VarState> state;
  std::vector<double> lo, hi;

  double rest(int v) const { return state[v] == VarState::Upper ? hi[v] : lo[v]; }

  std::vector<double> basic_values() const {
    std::vector<double> xb(b);
    for (int v = 0; v < vars; ++v) {
      if (state[v] == VarState::Basic) continue;
      const double rv = rest(v);
      if (rv == 0.0) continue;
      for (int r = 0; r < rows; ++r) xb[r] -= t(r, v) * rv;
    }
    return xb;
  }

  void pivot(int row, int col) {
    const double piv = t(row, col);
    const double inv = 1.0 / piv;
    for (int j = 0; j < vars; ++j) t(row, j) *= inv;
    t(row, col) = 1.0;
    b[row] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < vars; ++j) t(r, j) -= f * t(row, j);
      t(r, col) = 0.0;
      b[r] -= f * b[row];
    }
  }

  // returns true when optimal for the given costs
  bool run(const std::vector<double>& c) {
    for (long iter = 0; iter < 200000; ++iter) {
      const std::vector<double> xb = basic_values();

      // reduced costs d_v = c_v - c_B^T T(:,v)
      int enter = -1;
      double enter_dir = 0.0;
      for (int v = 0; v < vars; ++v) {
        if (state[v] == VarState::Basic) continue;
        double d = c[v];
        for (int r = 0; r < rows; ++r) {
          const double cb = c[basis[r]];
          if (cb != 0.0) d -= cb * t(r, v);
        }
        if (state[v] == VarState::Lower && d > tol::kLpPivot && hi[v] > lo[v]) {
          enter = v;
          enter_dir = 1.0;
          break;  // Bland: lowest index
        }
        if (state[v] == VarState::Upper && d < -tol::kLpPivot && hi[v] > lo[v]) {
          enter = v;
          enter_dir = -1.0;
          break;
        }
      }
      if (enter < 0) return true;

      // ratio test against basic variable bounds; the entering variable's own
      // span is the bound-flip candidate
      double step = hi[enter] < kInf ? hi[enter] - lo[enter] : kInf;
      int leave = -1;
      bool leave_to_upper = false;
      for (int r = 0; r < rows; ++r) {
        const double rate = -t(r, enter) * enter_dir;  // d(x_basic[r]) / d(step)
        if (std::fabs(rate) <= kRatioTol) continue;
        const int u = basis[r];
        double limit;
        bool to_upper;
        if (rate > 0.0) {
          if (hi[u] >= kInf) continue;
          limit = (hi[u] - xb[r]) / rate;
          to_upper = true;
        } else {
          limit = (lo[u] - xb[r]) / rate;
          to_upper = false;
        }
        limit = std::max(limit, 0.0);
        if (limit < step - 1e-12 || (limit < step + 1e-12 && leave >= 0 && u < basis[leave])) {
          step = limit;
          leave = r;
          leave_to_upper = to_upper;
        }
      }

      if (step >= kInf) throw NumericalError("lp: unbounded direction");

      if (leave < 0) {
        // bound flip
        state[enter] = enter_dir > 0.0 ? VarState::Upper : VarState::Lower;
        continue;
      }
      const int leaving = basis[leave];
      pivot(leave, enter);
      basis[leave] = enter;
      state[enter] = VarState::Basic;
      state[leaving] = leave_to_upper ? VarState::Upper : VarState::Lower;
    }
    throw NumericalError("lp: pivot limit exceeded");
  }
};

}  // namespace

Result solve_max(const Problem& p, std::span<const double> c) {
  const int n = p.n;
  const int m = p.rows.rows();
  if (static_cast<int>(c.size()) != n) throw InputError("lp: cost size mismatch");
  if (p.rows.cols() != n && m > 0) throw InputError("lp: row width mismatch");

  int n_slack = 0;
  for (int r = 0; r < m; ++r)
    if (!p.eq[r]) ++n_slack;

  Tableau tab;
  tab.rows = m;
  tab.n = n;
  tab.art0 = n + n_slack;
  tab.vars = n + n_slack + m;
  tab.t = Matrix(m, tab.vars);
  tab.b = p.rhs;
  tab.lo.assign(tab.vars, 0.0);
  tab.hi.assign(tab.vars, kInf);
  tab.state.assign(tab.vars, VarState::Lower);
  tab.basis.resize(m);

  for (int v = 0; v < n; ++v) {
    tab.lo[v] = p.lo[v];
    tab.hi[v] = p.hi[v];
    if (!std::isfinite(tab.lo[v])) throw InputError("lp: lower bounds must be finite");
    if (tab.hi[v] < tab.lo[v]) return {Status::Infeasible, {}, 0.0};
  }

  int slack = n;
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) tab.t(r, j) = p.rows(r, j);
    if (!p.eq[r]) tab.t(r, slack++) = 1.0;
  }

  // artificials: one per row, sign-normalized so each starts basic at >= 0
  for (int r = 0; r < m; ++r) {
    double res = tab.b[r];
    for (int v = 0; v < n; ++v) res -= tab.t(r, v) * tab.lo[v];
    if (res < 0.0) {
      for (int j = 0; j < tab.vars; ++j) tab.t(r, j) = -tab.t(r, j);
      tab.b[r] = -tab.b[r];
    }
    tab.t(r, tab.art0 + r) = 1.0;
    tab.basis[r] = tab.art0 + r;
    tab.state[tab.art0 + r] = VarState::Basic;
  }

  // phase 1: drive the artificials to zero
  std::vector<double> c1(tab.vars, 0.0);
  for (int r = 0; r < m; ++r) c1[tab.art0 + r] = -1.0;
  tab.run(c1);

  double rhs_scale = 1.0;
  for (double v : p.rhs) rhs_scale = std::max(rhs_scale, std::fabs(v));
  {
    const std::vector<double> xb = tab.basic_values();
    double art_sum = 0.0;
    for (int r = 0; r < m; ++r) {
      const int v = tab.basis[r];
      if (v >= tab.art0) art_sum += std::fabs(xb[r]);
    }
    for (int v = tab.art0; v < tab.vars; ++v)
      if (tab.state[v] != VarState::Basic) art_sum += tab.rest(v);
    if (art_sum > tol::kFeas * rhs_scale * 10.0) return {Status::Infeasible, {}, 0.0};
  }

  // phase 2: pin the artificials and switch to the real objective
  for (int v = tab.art0; v < tab.vars; ++v) tab.hi[v] = 0.0;
  std::vector<double> c2(tab.vars, 0.0);
  for (int v = 0; v < n; ++v) c2[v] = c[v];
  tab.run(c2);

  const std::vector<double> xb = tab.basic_values();
  Result out;
  out.status = Status::Optimal;
  out.x.assign(n, 0.0);
  for (int v = 0; v < n; ++v) out.x[v] = tab.rest(v);
  for (int r = 0; r < m; ++r)
    if (tab.basis[r] < n) out.x[tab.basis[r]] = xb[r];
  for (int v = 0; v < n; ++v) out.x[v] = std::clamp(out.x[v], p.lo[v], p.hi[v]);

  // defensive residual check against the original rows
  for (int r = 0; r < m; ++r) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += p.rows(r, j) * out.x[j];
    const double resid = p.eq[r] ? std::fabs(lhs - p.rhs[r]) : std::max(0.0, lhs - p.rhs[r]);
    if (resid > 1e-7 * rhs_scale)
      throw NumericalError("lp: solution failed the residual check");
  }
  out.value = dot(out.x, c);
  return out;
}

}  // namespace mesp::lp
