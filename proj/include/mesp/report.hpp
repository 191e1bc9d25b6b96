#pragma once

#include <string>
#include <vector>

#include "mesp/instance.hpp"
#include "mesp/relax.hpp"

namespace mesp {

// Options shared by the bound solvers. lo/hi override the default [0,1] box
// (used for probing pins); warm restarts from a previous active set.
struct SolveOptions {
  double tol = tol::kFwTol;
  int max_iter = tol::kFwMaxIter;
  std::vector<double> lo, hi;
  const relax::ActiveSet* warm = nullptr;
};

// Certified upper bound: bound = value + gap + offset, valid for the
// original problem regardless of whether the inner solve converged.
struct BoundReport {
  std::string method;
  double value = 0.0;
  double gap = 0.0;
  double offset = 0.0;  // nonzero only for complementary bounds
  double bound = 0.0;
  std::vector<double> x;  // relaxation solution of the solved program
  ScalingVector scaling;
  int iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
  relax::ActiveSet active;
};

}  // namespace mesp
