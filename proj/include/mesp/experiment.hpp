#pragma once

#include <iosfwd>

#include "mesp/scaling.hpp"

namespace mesp {

enum class ScalingChoice { None, Scalar, Vector };  // CSV names: none, o, g

std::string to_string(ScalingChoice c);
std::optional<ScalingChoice> scaling_choice_from_string(const std::string& name);

inline constexpr const char* kCsvHeader =
    "n,s,method,scaling,ub,lb,gap,ratio,iters,wall_ms,seed,error";

struct ExperimentConfig {
  int s_lo = 1, s_hi = 1;
  std::vector<BoundKind> methods;
  std::vector<ScalingChoice> scalings;
  std::optional<Constraints> constraints;  // explicit side constraints
  int gen_constraints = 0;                 // generated rows per instance
  uint64_t seed = 0;
  double tol = tol::kFwTol;
  int scaling_steps = tol::kBfgsStandalone;
  int threads = 0;  // 0 = hardware concurrency
};

// One CSV row per (s, method, scaling), emitted in deterministic order.
// Rows are computed by a worker pool; per-row failures land in the error
// column and the run continues. The ratio column compares the g gap against
// the o gap of the same (s, method) when both are present.
void run_experiment(const SymMatrix& c, const ExperimentConfig& config, std::ostream& out);

// Single bound computation shared by the CLI `bound` subcommand and the
// experiment rows: applies the requested scaling policy before solving.
BoundReport compute_bound(const Instance& inst, BoundKind method, ScalingChoice scaling,
                          int scaling_steps, double tol);

}  // namespace mesp
