#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mesp/linalg.hpp"
#include "mesp/matrix.hpp"

namespace mesp {

// Side constraints A x <= b, one row per constraint.
struct Constraints {
  Matrix a;               // m x n
  std::vector<double> b;  // m
  int count() const { return a.rows(); }
};

// Strictly positive scaling vector with a consistent log-coordinate view.
class ScalingVector {
 public:
  ScalingVector() = default;

  static ScalingVector ones(int n);
  static ScalingVector uniform(int n, double gamma);
  static ScalingVector from_values(std::vector<double> values);
  static ScalingVector from_logs(std::vector<double> logs);

  int size() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  std::span<const double> logs() const { return logs_; }
  double value(int i) const { return values_[i]; }
  double log(int i) const { return logs_[i]; }

 private:
  std::vector<double> values_, logs_;
};

// The problem datum: covariance C (order n, PSD), cardinality s, optional
// side constraints. Validation happens at construction: symmetry, the PSD
// repair window, and rank(C) >= s.
class Instance {
 public:
  Instance(SymMatrix c, int s, std::optional<Constraints> cons = std::nullopt);

  int n() const { return c_.order(); }
  int s() const { return s_; }
  const SymMatrix& C() const { return c_; }
  const std::optional<Constraints>& constraints() const { return cons_; }

  int rank() const { return rank_; }
  double lambda_max() const { return lambda_max_; }
  double lambda_min() const { return lambda_min_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // true when S (strictly increasing indices, |S| = s) satisfies A x <= b
  bool feasible_set(std::span<const int> set) const;

 private:
  SymMatrix c_;
  int s_;
  std::optional<Constraints> cons_;
  int rank_ = 0;
  double lambda_max_ = 0.0, lambda_min_ = 0.0;
  std::vector<std::string> warnings_;
};

// Whitespace text formats; '#'-prefixed comment lines are skipped.
// Matrix file: first token n, then n^2 reals row-major, or exactly
// n(n+1)/2 values for the lower-triangle variant (auto-detected).
// Constraints file: first tokens m n, then m rows of n coefficients
// followed by the right-hand side.
SymMatrix load_matrix(const std::string& path);
Constraints load_constraints(const std::string& path);
Instance load_instance(const std::string& matrix_path, int s,
                       const std::string& constraints_path = "");
void save_matrix(const std::string& path, const SymMatrix& m);

// Complementary instance (C^{-1}, n-s, -A, b - A e) and offset ldet C.
// Any bound beta on the complement certifies beta + offset on the original.
std::pair<Instance, double> complement(const Instance& inst);

// Appends m random rows per the benchmark recipe: integer coefficients in
// {-2..2}, right-hand side the largest integer violated by the supplied
// best-known solution (b_i = a_i^T x* - 1). Rows that would exclude every
// cardinality-s point are redrawn.
Instance generate_side_constraints(const Instance& inst, int m, uint64_t seed,
                                   std::span<const int> best_known);

}  // namespace mesp
