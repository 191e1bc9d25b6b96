#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mesp/exact.hpp"
#include "mesp/experiment.hpp"
#include "mesp/fixing.hpp"
#include "mesp/heuristics.hpp"

namespace {

using namespace mesp;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string matrix;
  int s = 0;
  std::string constraints;
};

// validation failures on user-supplied data count as input errors (exit 2)
Instance load(const CommonArgs& args) {
  try {
    return load_instance(args.matrix, args.s, args.constraints);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw InputError("expected LO:HI range, got '" + text + "'");
  try {
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InputError("expected LO:HI range, got '" + text + "'");
  }
}

void print_bound_text(const BoundReport& rep, const Instance& inst, ScalingChoice scaling) {
  std::printf("method: %s\n", rep.method.c_str());
  std::printf("n: %d  s: %d\n", inst.n(), inst.s());
  std::printf("scaling: %s\n", to_string(scaling).c_str());
  std::printf("upper_bound: %.9f\n", rep.bound);
  std::printf("value: %.9f  gap: %.3e  offset: %.9f\n", rep.value, rep.gap, rep.offset);
  std::printf("iterations: %d  converged: %s\n", rep.iterations, rep.converged ? "yes" : "no");
  std::printf("wall_ms: %.3f\n", rep.wall_ms);
}

int cmd_bound(const CommonArgs& common, const std::string& method_name,
              const std::string& scaling_name, int scaling_steps, double tolerance,
              const std::string& out_mode, uint64_t seed) {
  if (method_name == "bqp") {
    std::fprintf(stderr, "BQP solve unsupported; use bqp-eval\n");
    return kExitInput;
  }
  const auto method = bound_kind_from_string(method_name);
  if (!method) {
    std::fprintf(stderr, "unknown method '%s' (expected linx|ddfact|ddfact-comp)\n",
                 method_name.c_str());
    return kExitInput;
  }
  const auto scaling = scaling_choice_from_string(scaling_name);
  if (!scaling) {
    std::fprintf(stderr, "unknown scaling '%s' (expected none|o|g)\n", scaling_name.c_str());
    return kExitInput;
  }

  const Instance inst = load(common);
  const BoundReport rep = compute_bound(inst, *method, *scaling, scaling_steps, tolerance);
  if (out_mode == "csv") {
    std::printf("%s\n", kCsvHeader);
    std::printf("%d,%d,%s,%s,%.9f,,,,%d,%.3f,%llu,\n", inst.n(), inst.s(), rep.method.c_str(),
                to_string(*scaling).c_str(), rep.bound, rep.iterations, rep.wall_ms,
                static_cast<unsigned long long>(seed));
  } else {
    print_bound_text(rep, inst, *scaling);
  }
  return kExitOk;
}

int cmd_exact(const CommonArgs& common, long long budget) {
  const Instance inst = load(common);
  const ExactResult res = solve_exact(inst, budget);
  if (!res.feasible) {
    std::printf("infeasible: no subset satisfies the constraints\n");
    return kExitOk;
  }
  std::printf("z: %.12f\n", res.z);
  std::printf("feasible_subsets: %lld\n", res.count_feasible);
  std::printf("optima: %zu\n", res.optima.size());
  for (const auto& set : res.optima) {
    std::printf(" ");
    for (int j : set) std::printf(" %d", j + 1);
    std::printf("\n");
  }
  return kExitOk;
}

int cmd_heuristic(const CommonArgs& common) {
  const Instance inst = load(common);
  const auto inc = heuristic_solution(inst);
  if (!inc) {
    std::printf("no feasible solution found\n");
    return kExitNumerical;
  }
  std::printf("value: %.12f\n", inc->value);
  std::printf("set:");
  for (int j : inc->set) std::printf(" %d", j + 1);
  std::printf("\n");
  return kExitOk;
}

int cmd_fix(const CommonArgs& common, const std::string& mode_name, int rounds,
            const std::string& s_range, int gen_m, uint64_t seed, double lb_override,
            bool has_lb_override) {
  ScalingMode mode;
  if (mode_name == "o")
    mode = ScalingMode::Scalar;
  else if (mode_name == "g")
    mode = ScalingMode::Vector;
  else {
    std::fprintf(stderr, "unknown mode '%s' (expected o|g)\n", mode_name.c_str());
    return kExitInput;
  }

  const SymMatrix c = load_matrix(common.matrix);
  std::optional<Constraints> explicit_cons;
  if (!common.constraints.empty()) explicit_cons = load_constraints(common.constraints);

  int s_lo = common.s, s_hi = common.s;
  if (!s_range.empty()) std::tie(s_lo, s_hi) = parse_range(s_range);
  if (s_lo < 1 || s_hi >= c.order() || s_lo > s_hi) {
    std::fprintf(stderr, "s range out of bounds\n");
    return kExitInput;
  }

  int solved = 0, with_fix = 0, total_fixed = 0;
  for (int s = s_lo; s <= s_hi; ++s) {
    Instance inst(c, s, explicit_cons);
    if (gen_m > 0) {
      const auto best = heuristic_solution(inst);
      if (!best) {
        std::printf("s=%d: skipped (no best-known solution for constraint generation)\n", s);
        continue;
      }
      inst = generate_side_constraints(inst, gen_m, seed, best->set);
    }

    double lb = -std::numeric_limits<double>::infinity();
    if (has_lb_override) {
      lb = lb_override;
    } else if (const auto inc = heuristic_solution(inst)) {
      lb = inc->value;
    }

    const FixResult res = iterate_fixing(inst, lb, mode, rounds);
    ++solved;
    const int fixed = static_cast<int>(res.fix0.size() + res.fix1.size());
    if (fixed > 0) ++with_fix;
    total_fixed += fixed;

    std::printf("s=%d: lb=%.9f rounds=%d fix0={", s, res.lb, res.rounds);
    for (size_t i = 0; i < res.fix0.size(); ++i)
      std::printf("%s%d", i ? "," : "", res.fix0[i] + 1);
    std::printf("} fix1={");
    for (size_t i = 0; i < res.fix1.size(); ++i)
      std::printf("%s%d", i ? "," : "", res.fix1[i] + 1);
    std::printf("}\n");
    for (const std::string& note : res.notes) std::printf("  note: %s\n", note.c_str());
  }
  if (s_lo != s_hi) {
    std::printf("instances solved: %d\n", solved);
    std::printf("instances with >=1 fix: %d\n", with_fix);
    std::printf("total variables fixed: %d\n", total_fixed);
  }
  return kExitOk;
}

int cmd_experiment(const std::string& matrix_path, const std::string& constraints_path,
                   int gen_m, uint64_t seed, const std::string& s_range,
                   const std::string& methods_list, const std::string& scalings_list,
                   double tolerance, int scaling_steps, int threads,
                   const std::string& out_path) {
  const SymMatrix c = load_matrix(matrix_path);

  ExperimentConfig config;
  std::tie(config.s_lo, config.s_hi) = parse_range(s_range);
  for (const std::string& name : split_list(methods_list)) {
    const auto kind = bound_kind_from_string(name);
    if (!kind) throw InputError("unknown method '" + name + "'");
    config.methods.push_back(*kind);
  }
  for (const std::string& name : split_list(scalings_list)) {
    const auto choice = scaling_choice_from_string(name);
    if (!choice) throw InputError("unknown scaling '" + name + "'");
    config.scalings.push_back(*choice);
  }
  if (!constraints_path.empty()) config.constraints = load_constraints(constraints_path);
  config.gen_constraints = gen_m;
  config.seed = seed;
  config.tol = tolerance;
  config.scaling_steps = scaling_steps;
  config.threads = threads;

  if (out_path.empty()) {
    run_experiment(c, config, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write: " + out_path);
    run_experiment(c, config, out);
  }
  return kExitOk;
}

// point file: first token n, then n values of x, then n*n values of X row-major
BqpPoint load_bqp_point(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  int n = 0;
  if (!(in >> n) || n < 1) throw InputError(path + ": expected leading order n");
  std::vector<double> x(n);
  for (double& v : x)
    if (!(in >> v)) throw InputError(path + ": truncated x vector");
  Matrix xmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(in >> xmat(i, j))) throw InputError(path + ": truncated X matrix");
  return BqpPoint(std::move(x), SymMatrix::from(xmat));
}

int cmd_bqp_eval(const CommonArgs& common, const std::string& point_path,
                 const std::string& scaling_path) {
  const Instance inst = load(common);
  const BqpPoint point = load_bqp_point(point_path);
  if (static_cast<int>(point.x.size()) != inst.n())
    throw InputError("point order differs from the instance");

  ScalingVector scaling = ScalingVector::ones(inst.n());
  if (!scaling_path.empty()) {
    std::ifstream in(scaling_path);
    if (!in) throw InputError("cannot open file: " + scaling_path);
    std::vector<double> v(inst.n());
    for (double& g : v)
      if (!(in >> g)) throw InputError(scaling_path + ": truncated scaling vector");
    scaling = ScalingVector::from_values(std::move(v));
  }

  const MembershipReport membership = bqp_membership(point, inst.s(), inst.constraints());
  if (membership.member()) {
    std::printf("membership: ok\n");
  } else {
    std::printf("membership: %zu violation(s)\n", membership.violations.size());
    for (const auto& v : membership.violations)
      std::printf("  %s (residual %.3e)\n", v.condition.c_str(), v.residual);
  }

  const double value = bqp_value(point, scaling, inst.C());
  std::printf("value: %.9f\n", value);
  if (std::isfinite(value)) {
    const std::vector<double> g = bqp_grad_log_scaling(point, scaling, inst.C());
    const SymMatrix h = bqp_hessian_log_scaling(point, scaling, inst.C());
    std::printf("grad_log_scaling_inf_norm: %.3e\n", inf_norm(g));
    std::printf("hessian_lambda_min: %.3e\n", eig_sym(h).lambda.back());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified upper bounds, heuristics, and variable fixing for "
               "constrained maximum-entropy sampling"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string method = "linx", scaling = "none", out_mode = "text";
  double tolerance = mesp::tol::kFwTol;
  int scaling_steps = mesp::tol::kBfgsStandalone;
  uint64_t seed = 0;
  long long budget = mesp::tol::kEnumBudget;
  std::string mode = "o", s_range, methods_list = "linx", scalings_list = "none";
  int rounds = 20, gen_m = 0, threads = 0;
  double lb_override = 0.0;
  std::string point_path, scaling_path, out_path;

  auto add_common = [&](CLI::App* cmd, bool need_s) {
    cmd->add_option("--matrix", common.matrix, "matrix file")->required();
    auto* s_opt = cmd->add_option("--s", common.s, "cardinality");
    if (need_s) s_opt->required();
    cmd->add_option("--constraints", common.constraints, "constraints file");
  };

  auto* bound = app.add_subcommand("bound", "compute one certified upper bound");
  add_common(bound, true);
  bound->add_option("--method", method, "linx|ddfact|ddfact-comp");
  bound->add_option("--scaling", scaling, "none|o|g");
  bound->add_option("--scaling-steps", scaling_steps, "BFGS budget for g scaling");
  bound->add_option("--tol", tolerance, "duality-gap tolerance");
  bound->add_option("--out", out_mode, "csv|text");
  bound->add_option("--seed", seed, "recorded seed");

  auto* exact = app.add_subcommand("exact", "brute-force optimum by enumeration");
  add_common(exact, true);
  exact->add_option("--budget", budget, "maximum number of subsets");

  auto* heur = app.add_subcommand("heuristic", "greedy construction plus local search");
  add_common(heur, true);

  auto* fix = app.add_subcommand("fix", "iterated variable fixing");
  add_common(fix, false);
  fix->add_option("--mode", mode, "o|g");
  fix->add_option("--rounds", rounds, "round budget");
  fix->add_option("--s-range", s_range, "LO:HI (aggregate over s)");
  fix->add_option("--gen-constraints", gen_m, "generate this many side constraints");
  fix->add_option("--seed", seed, "seed for constraint generation");
  auto* lb_opt = fix->add_option("--lb", lb_override, "use this lower bound instead of the heuristic");

  auto* exp = app.add_subcommand("experiment", "CSV sweep over s, methods, and scalings");
  exp->add_option("--matrix", common.matrix, "matrix file")->required();
  exp->add_option("--constraints", common.constraints, "constraints file");
  exp->add_option("--gen-constraints", gen_m, "generate this many side constraints");
  exp->add_option("--seed", seed, "seed for constraint generation");
  exp->add_option("--s-range", s_range, "LO:HI")->required();
  exp->add_option("--methods", methods_list, "comma list of linx|ddfact|ddfact-comp");
  exp->add_option("--scalings", scalings_list, "comma list of none|o|g");
  exp->add_option("--tol", tolerance, "duality-gap tolerance");
  exp->add_option("--scaling-steps", scaling_steps, "BFGS budget for g scaling");
  exp->add_option("--threads", threads, "worker threads (0 = auto)");
  exp->add_option("--out", out_path, "write CSV here instead of stdout");

  auto* bqp = app.add_subcommand("bqp-eval", "evaluate the lifted objective at a point");
  add_common(bqp, true);
  bqp->add_option("--point", point_path, "point file: n, x, then X row-major")->required();
  bqp->add_option("--scaling-vector", scaling_path, "file with n scaling values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (bound->parsed())
      return cmd_bound(common, method, scaling, scaling_steps, tolerance, out_mode, seed);
    if (exact->parsed()) return cmd_exact(common, budget);
    if (heur->parsed()) return cmd_heuristic(common);
    if (fix->parsed()) {
      if (s_range.empty() && common.s == 0) {
        std::fprintf(stderr, "fix: provide --s or --s-range\n");
        return kExitInput;
      }
      return cmd_fix(common, mode, rounds, s_range, gen_m, seed, lb_override,
                     lb_opt->count() > 0);
    }
    if (exp->parsed())
      return cmd_experiment(common.matrix, common.constraints, gen_m, seed, s_range,
                            methods_list, scalings_list, tolerance, scaling_steps, threads,
                            out_path);
    if (bqp->parsed()) return cmd_bqp_eval(common, point_path, scaling_path);
  } catch (const mesp::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitInput;
}
