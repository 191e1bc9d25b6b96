#include "mesp/fixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mesp/ddfact.hpp"
#include "mesp/heuristics.hpp"
#include "mesp/linx.hpp"

namespace mesp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> default_box(const std::vector<double>& v, int n, double fill) {
  if (!v.empty()) return v;
  return std::vector<double>(n, fill);
}

struct PinnedSolve {
  bool feasible = true;
  BoundReport report;
};

PinnedSolve solve_pinned(BoundKind method, const Instance& inst, const ScalingVector& scaling,
                         std::vector<double> lo, std::vector<double> hi, double tolerance,
                         int max_iter) {
  PinnedSolve out;
  SolveOptions opts;
  opts.tol = tolerance;
  opts.max_iter = max_iter;
  opts.lo = std::move(lo);
  opts.hi = std::move(hi);
  try {
    out.report = solve_bound(method, inst, scaling, opts);
  } catch (const InfeasibleError&) {
    out.feasible = false;
  }
  return out;
}

}  // namespace

FixResult probe_fix(const Instance& inst, double lb, BoundKind method,
                    const ScalingVector& scaling, const ProbeOptions& options) {
  FixResult result;
  result.lb = lb;
  result.rounds = 1;
  if (lb == kNegInf) return result;  // nothing can be certified against -inf

  const int n = inst.n();
  const std::vector<double> base_lo = default_box(options.lo, n, 0.0);
  const std::vector<double> base_hi = default_box(options.hi, n, 1.0);

  // The screen works in the solved program's coordinates. For the
  // complementary method that is the complement instance, where the pin
  // x_j = v becomes x_j = 1 - v.
  const bool comp = method == BoundKind::DdfactComp;
  std::optional<Instance> comp_inst;
  if (comp) comp_inst = complement(inst).first;  // DomainError when C is singular
  const Instance& screen_inst = comp ? *comp_inst : inst;

  auto to_screen_box = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    if (!comp) return std::make_pair(lo, hi);
    std::vector<double> lo_c(n), hi_c(n);
    for (int i = 0; i < n; ++i) {
      lo_c[i] = 1.0 - hi[i];
      hi_c[i] = 1.0 - lo[i];
    }
    return std::make_pair(std::move(lo_c), std::move(hi_c));
  };

  // The screen runs at unit scaling regardless of the probe scaling: a
  // linearization at an optimized scaling is flat across coordinates and
  // would admit different probe candidates per scaling mode, making fix
  // counts incomparable across modes. Probes themselves use the caller's
  // scaling. The screen stays sound: it linearizes a valid concave bound.
  const ScalingVector unit = ScalingVector::ones(n);
  const PinnedSolve base =
      solve_pinned(method, inst, unit, base_lo, base_hi, options.tol, options.max_iter);
  if (!base.feasible) throw InfeasibleError("probe_fix: base polytope is empty");
  const BoundReport& rep = base.report;

  std::optional<Factorization> screen_fact;
  if (method != BoundKind::Linx) screen_fact = factorize(screen_inst.C());
  const std::vector<double> grad =
      method == BoundKind::Linx
          ? linx_grad_x(rep.x, unit, inst.C())
          : ddfact_grad_x(rep.x, unit, *screen_fact, screen_inst.s());

  for (int j = 0; j < n; ++j) {
    if (base_lo[j] >= base_hi[j]) continue;  // already pinned by the caller
    for (int pin = 0; pin <= 1; ++pin) {
      std::vector<double> lo = base_lo, hi = base_hi;
      lo[j] = hi[j] = static_cast<double>(pin);

      bool pin_feasible = true;
      try {
        auto [slo, shi] = to_screen_box(lo, hi);
        const relax::Polytope pinned(n, screen_inst.s(), screen_inst.constraints(),
                                     std::move(slo), std::move(shi));
        // linearization screen: f <= f(x*) + g^T (v - x*) over the pinned region
        const std::vector<double> vtx = relax::lp_oracle(pinned, grad);
        const double screen = rep.value + dot(grad, vtx) - dot(grad, rep.x) + rep.offset;
        if (screen >= lb - tol::kFixMargin) continue;  // cannot fix; skip the probe
      } catch (const InfeasibleError&) {
        pin_feasible = false;  // the pin excludes every feasible point
      }

      if (pin_feasible) {
        const PinnedSolve probe =
            solve_pinned(method, inst, scaling, lo, hi, options.tol, options.max_iter);
        if (probe.feasible) {
          const BoundReport& pr = probe.report;
          const bool certified = pr.gap <= tol::kProbeGap && pr.bound < lb - tol::kFixMargin;
          if (!certified) continue;
          result.probes.push_back({j, 1 - pin, to_string(method), pr.bound, lb - pr.bound});
        } else {
          pin_feasible = false;
        }
      }
      if (!pin_feasible)
        result.probes.push_back({j, 1 - pin, to_string(method), kNegInf,
                                 std::numeric_limits<double>::infinity()});

      // probing x_j = 1 below lb proves x_j = 0 in every optimum, and vice versa
      if (pin == 1)
        result.fix0.push_back(j);
      else
        result.fix1.push_back(j);
      break;  // this j is decided
    }
  }
  return result;
}

namespace {

// fixing working state: surviving original indices, pins, contracted data
struct Shrinking {
  std::vector<int> alive;    // original index per local column
  std::vector<char> pinned;  // local flags (x = 1)
  Instance inst;
  double lb;
  bool decided = false;  // survivors shrank to exactly s columns

  static Shrinking start(const Instance& inst, double lb) {
    Shrinking s{std::vector<int>(inst.n()), std::vector<char>(inst.n(), 0), inst, lb, false};
    for (int i = 0; i < inst.n(); ++i) s.alive[i] = i;
    return s;
  }

  std::vector<double> lo() const {
    std::vector<double> v(alive.size(), 0.0);
    for (size_t i = 0; i < alive.size(); ++i)
      if (pinned[i]) v[i] = 1.0;
    return v;
  }
  std::vector<double> hi() const { return std::vector<double>(alive.size(), 1.0); }

  int free_count() const {
    int c = 0;
    for (char p : pinned)
      if (!p) ++c;
    return c;
  }

  enum class ApplyOutcome { Ok, Decided, Stopped };

  ApplyOutcome apply(const std::vector<int>& fix0_local, const std::vector<int>& fix1_local,
                     std::vector<std::string>& notes) {
    for (int j : fix1_local) pinned[j] = 1;
    if (fix0_local.empty()) return ApplyOutcome::Ok;

    std::vector<char> drop(alive.size(), 0);
    for (int j : fix0_local) drop[j] = 1;
    std::vector<int> keep;
    for (size_t i = 0; i < alive.size(); ++i)
      if (!drop[i]) keep.push_back(static_cast<int>(i));

    if (static_cast<int>(keep.size()) < inst.s()) {
      notes.push_back("contraction stopped: fewer survivors than s, lower bound was invalid");
      return ApplyOutcome::Stopped;
    }

    std::vector<int> new_alive;
    std::vector<char> new_pinned;
    for (int i : keep) {
      new_alive.push_back(alive[i]);
      new_pinned.push_back(pinned[i]);
    }
    if (static_cast<int>(keep.size()) == inst.s()) {
      // cardinality now forces every survivor; keep the pre-contraction
      // instance so the survivor value can still be evaluated
      if (inst.feasible_set(keep)) {
        const auto v = try_ldet_submatrix(inst.C(), keep);
        if (v) lb = std::max(lb, *v);
      } else {
        notes.push_back("forced survivor set violates the side constraints");
      }
      alive = std::move(new_alive);
      pinned.assign(alive.size(), 1);
      decided = true;
      return ApplyOutcome::Decided;
    }

    const SymMatrix c_new = inst.C().principal_submatrix(keep);
    std::optional<Constraints> cons_new;
    if (inst.constraints()) {
      const Constraints& old = *inst.constraints();
      Constraints c{Matrix(old.a.rows(), static_cast<int>(keep.size())), old.b};
      for (int r = 0; r < old.a.rows(); ++r)
        for (size_t i = 0; i < keep.size(); ++i)
          c.a(r, static_cast<int>(i)) = old.a(r, keep[i]);
      cons_new = std::move(c);
    }
    try {
      inst = Instance(c_new, inst.s(), std::move(cons_new));
    } catch (const std::exception& e) {
      notes.push_back(std::string("contraction stopped: ") + e.what());
      return ApplyOutcome::Stopped;
    }
    alive = std::move(new_alive);
    pinned = std::move(new_pinned);
    return ApplyOutcome::Ok;
  }
};

}  // namespace

FixResult iterate_fixing(const Instance& inst, double lb, ScalingMode mode, int budget_rounds) {
  FixResult result;
  result.lb = lb;

  Shrinking state = Shrinking::start(inst, lb);
  std::vector<int> fix0_orig, fix1_orig;

  const BoundKind methods[] = {BoundKind::Linx, BoundKind::Ddfact, BoundKind::DdfactComp};
  bool stopped = false;
  for (int round = 0; round < budget_rounds && !stopped; ++round) {
    bool any_fix = false;
    for (BoundKind method : methods) {
      if (state.decided || state.free_count() == 0) break;

      ScalingOptions sopts;
      sopts.lo = state.lo();
      sopts.hi = state.hi();

      // per-method scaling refresh on the current shrunken instance
      ScalingVector scaling = ScalingVector::ones(state.inst.n());
      try {
        if (method == BoundKind::Linx) {
          const ScalarScalingResult o = optimize_scalar_scaling(method, state.inst, 1.0, sopts);
          scaling = ScalingVector::uniform(state.inst.n(), o.gamma);
        }
        if (mode == ScalingMode::Vector) {
          const ScalingResult g =
              optimize_vector_scaling(method, state.inst, scaling, tol::kBfgsFixSteps, sopts);
          scaling = g.best;
        }
      } catch (const DomainError& e) {
        result.notes.push_back(to_string(method) + std::string(" unavailable: ") + e.what());
        continue;  // e.g. complementation on a singular contracted matrix
      }

      ProbeOptions popts;
      popts.lo = sopts.lo;
      popts.hi = sopts.hi;
      FixResult pass;
      try {
        pass = probe_fix(state.inst, state.lb, method, scaling, popts);
      } catch (const DomainError& e) {
        result.notes.push_back(to_string(method) + std::string(" unavailable: ") + e.what());
        continue;
      }

      for (const ProbeRecord& pr : pass.probes) {
        ProbeRecord mapped = pr;
        mapped.index = state.alive[pr.index];
        result.probes.push_back(mapped);
      }
      for (int j : pass.fix0) fix0_orig.push_back(state.alive[j]);
      for (int j : pass.fix1) fix1_orig.push_back(state.alive[j]);
      any_fix = any_fix || !pass.fix0.empty() || !pass.fix1.empty();

      const auto outcome = pass.fix0.empty() && pass.fix1.empty()
                               ? Shrinking::ApplyOutcome::Ok
                               : state.apply(pass.fix0, pass.fix1, result.notes);
      if (outcome == Shrinking::ApplyOutcome::Stopped) {
        stopped = true;
        break;
      }
      if (outcome == Shrinking::ApplyOutcome::Decided || state.free_count() == 0) break;

      // refresh the lower bound on the contracted instance
      if (const auto inc = heuristic_solution(state.inst))
        state.lb = std::max(state.lb, inc->value);
    }
    result.rounds = round + 1;
    if (!any_fix || state.decided || state.free_count() == 0) break;
  }

  // survivors forced by cardinality count as fixed to 1
  if (state.decided)
    for (int orig : state.alive)
      fix1_orig.push_back(orig);

  std::sort(fix0_orig.begin(), fix0_orig.end());
  fix0_orig.erase(std::unique(fix0_orig.begin(), fix0_orig.end()), fix0_orig.end());
  std::sort(fix1_orig.begin(), fix1_orig.end());
  fix1_orig.erase(std::unique(fix1_orig.begin(), fix1_orig.end()), fix1_orig.end());
  result.fix0 = std::move(fix0_orig);
  result.fix1 = std::move(fix1_orig);
  result.lb = state.lb;
  return result;
}

}  // namespace mesp
