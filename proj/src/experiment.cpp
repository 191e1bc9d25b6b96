#include "mesp/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

#include "mesp/heuristics.hpp"

namespace mesp {

std::string to_string(ScalingChoice c) {
  switch (c) {
    case ScalingChoice::None: return "none";
    case ScalingChoice::Scalar: return "o";
    case ScalingChoice::Vector: return "g";
  }
  return "?";
}

std::optional<ScalingChoice> scaling_choice_from_string(const std::string& name) {
  if (name == "none") return ScalingChoice::None;
  if (name == "o") return ScalingChoice::Scalar;
  if (name == "g") return ScalingChoice::Vector;
  return std::nullopt;
}

BoundReport compute_bound(const Instance& inst, BoundKind method, ScalingChoice scaling,
                          int scaling_steps, double tolerance) {
  SolveOptions opts;
  opts.tol = tolerance;

  switch (scaling) {
    case ScalingChoice::None:
      return solve_bound(method, inst, ScalingVector::ones(inst.n()), opts);
    case ScalingChoice::Scalar: {
      const ScalarScalingResult o = optimize_scalar_scaling(method, inst, 1.0);
      return solve_bound(method, inst, ScalingVector::uniform(inst.n(), o.gamma), opts);
    }
    case ScalingChoice::Vector: {
      // scalar optimum first, then the quasi-Newton vector refinement from there
      double gamma = 1.0;
      if (method == BoundKind::Linx) gamma = optimize_scalar_scaling(method, inst, 1.0).gamma;
      const ScalingResult g = optimize_vector_scaling(
          method, inst, ScalingVector::uniform(inst.n(), gamma), scaling_steps);
      return solve_bound(method, inst, g.best, opts);
    }
  }
  throw InputError("unknown scaling choice");
}

namespace {

struct RowTask {
  int s;
  BoundKind method;
  ScalingChoice scaling;
  const Instance* inst;
  double lb;
};

struct RowOutcome {
  bool ok = false;
  double ub = 0.0, gap = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  std::string error;
};

std::string sanitize_csv(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string format_real(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

void run_experiment(const SymMatrix& c, const ExperimentConfig& config, std::ostream& out) {
  if (config.s_lo < 1 || config.s_hi >= c.order() || config.s_lo > config.s_hi)
    throw InputError("experiment: s range must satisfy 1 <= lo <= hi < n");
  if (config.methods.empty() || config.scalings.empty())
    throw InputError("experiment: need at least one method and one scaling");

  // instances and lower bounds are prepared sequentially so every row is a
  // pure function of its task; constraint generation draws from the row seed
  struct PerS {
    std::optional<Instance> inst;
    double lb = -std::numeric_limits<double>::infinity();
    std::string error;
  };
  std::map<int, PerS> prepared;
  for (int s = config.s_lo; s <= config.s_hi; ++s) {
    PerS& slot = prepared[s];
    try {
      Instance inst(c, s, config.constraints);
      if (config.gen_constraints > 0) {
        const auto base_best = heuristic_solution(inst);
        if (!base_best) throw NumericalError("no heuristic solution to cut off");
        inst = generate_side_constraints(inst, config.gen_constraints, config.seed,
                                         base_best->set);
      }
      if (const auto inc = heuristic_solution(inst)) slot.lb = inc->value;
      slot.inst = std::move(inst);
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  }

  std::vector<RowTask> tasks;
  for (int s = config.s_lo; s <= config.s_hi; ++s)
    for (BoundKind method : config.methods)
      for (ScalingChoice scaling : config.scalings)
        tasks.push_back({s, method, scaling, nullptr, 0.0});

  std::vector<RowOutcome> outcomes(tasks.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (size_t i = cursor.fetch_add(1); i < tasks.size(); i = cursor.fetch_add(1)) {
      const RowTask& task = tasks[i];
      RowOutcome& row = outcomes[i];
      const PerS& slot = prepared.at(task.s);
      if (!slot.inst) {
        row.error = sanitize_csv(slot.error);
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const BoundReport rep = compute_bound(*slot.inst, task.method, task.scaling,
                                              config.scaling_steps, config.tol);
        row.ok = true;
        row.ub = rep.bound;
        row.gap = rep.bound - slot.lb;
        row.iters = rep.iterations;
      } catch (const std::exception& e) {
        row.error = sanitize_csv(e.what());
      }
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  };

  unsigned thread_count = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                             : std::thread::hardware_concurrency();
  thread_count = std::max(1u, std::min<unsigned>(thread_count, tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // the ratio column needs the o gap of the matching (s, method)
  std::map<std::pair<int, int>, double> scalar_gap;
  for (size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].scaling == ScalingChoice::Scalar && outcomes[i].ok)
      scalar_gap[{tasks[i].s, static_cast<int>(tasks[i].method)}] = outcomes[i].gap;

  out << kCsvHeader << "\n";
  for (size_t i = 0; i < tasks.size(); ++i) {
    const RowTask& task = tasks[i];
    const RowOutcome& row = outcomes[i];
    const PerS& slot = prepared.at(task.s);

    std::string ratio;
    if (task.scaling == ScalingChoice::Vector && row.ok) {
      const auto it = scalar_gap.find({task.s, static_cast<int>(task.method)});
      if (it != scalar_gap.end() && it->second > 0.0)
        ratio = format_real((it->second - row.gap) / it->second, "%.6f");
    }

    out << c.order() << ',' << task.s << ',' << to_string(task.method) << ','
        << to_string(task.scaling) << ',';
    if (row.ok) {
      out << format_real(row.ub, "%.9f") << ',' << format_real(slot.lb, "%.9f") << ','
          << format_real(row.gap, "%.9f") << ',' << ratio << ',' << row.iters << ','
          << format_real(row.wall_ms, "%.3f") << ',' << config.seed << ',';
    } else {
      out << ",,,," << ',' << format_real(row.wall_ms, "%.3f") << ',' << config.seed << ','
          << row.error;
    }
    out << "\n";
  }
}

}  // namespace mesp
