#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "mesp/bqp.hpp"
#include "mesp/linalg.hpp"

using namespace mesp;
using namespace mesp::testing;

namespace {

BqpPoint integer_lift(const std::vector<int>& set, int n) {
  std::vector<double> x(n, 0.0);
  Matrix xx(n, n);
  for (int i : set) {
    x[i] = 1.0;
    for (int j : set) xx(i, j) = 1.0;
  }
  return BqpPoint(std::move(x), SymMatrix::from(xx));
}

BqpPoint diagonal_point_half(int n) {
  // x = e/2, X = Diag(e/2): a member exactly when s = 1
  std::vector<double> x(n, 0.5);
  Matrix xx(n, n);
  for (int i = 0; i < n; ++i) xx(i, i) = 0.5;
  return BqpPoint(std::move(x), SymMatrix::from(xx));
}

}  // namespace

TEST_CASE("membership of integer lifts and their combinations") {
  CHECK(bqp_membership(integer_lift({0, 2}, 4), 2).member());

  // convex combination of two lifts stays inside
  const BqpPoint a = integer_lift({0, 1}, 3);
  const BqpPoint b = integer_lift({1, 2}, 3);
  std::vector<double> x(3);
  Matrix xx(3, 3);
  for (int i = 0; i < 3; ++i) {
    x[i] = 0.3 * a.x[i] + 0.7 * b.x[i];
    for (int j = 0; j < 3; ++j) xx(i, j) = 0.3 * a.X(i, j) + 0.7 * b.X(i, j);
  }
  CHECK(bqp_membership(BqpPoint(x, SymMatrix::from(xx)), 2).member());
}

TEST_CASE("membership of the diagonal half point at s=1") {
  CHECK(bqp_membership(diagonal_point_half(2), 1).member());
  CHECK(!bqp_membership(diagonal_point_half(2), 2).member());  // e^T x and X e fail
}

TEST_CASE("membership reports each violated condition") {
  BqpPoint p = integer_lift({0}, 2);
  p.x[0] = 0.7;  // diag(X) != x, e^T x != s, X e != s x, X - x x^T stays PSD
  const MembershipReport rep = bqp_membership(p, 1);
  CHECK(!rep.member());
  CHECK(rep.violations.size() >= 2);
}

TEST_CASE("membership honors side constraints") {
  Constraints cons{Matrix(1, 3), {0.0}};
  cons.a(0, 0) = 1.0;
  const BqpPoint p = integer_lift({0, 1}, 3);
  CHECK(!bqp_membership(p, 2, cons).member());
}

TEST_CASE("lifted objective at worked points") {
  const SymMatrix c = c2();
  SUBCASE("integer lift equals the subset ldet") {
    const BqpPoint p = integer_lift({0}, 2);
    CHECK(bqp_value(p, ScalingVector::ones(2), c) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bqp_value(p, ScalingVector::from_values({2.0, 1.0}), c) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("diagonal half point kills the off-diagonals") {
    CHECK(bqp_value(diagonal_point_half(2), ScalingVector::ones(2), c) ==
          doctest::Approx(2.0 * std::log(1.5)).epsilon(1e-12));
  }
}

TEST_CASE("integer consistency of the lifted objective") {
  Rng rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + rng.uniform_int(0, 5);
    const SymMatrix c = random_pd(rng, n, 0.3);
    const int s = 1 + rng.uniform_int(0, n - 2);
    const ScalingVector ups = random_scaling(rng, n, 0.3, 3.0);
    std::vector<int> set;
    std::vector<char> used(n, 0);
    while (static_cast<int>(set.size()) < s) {
      const int j = rng.uniform_int(0, n - 1);
      if (!used[j]) {
        used[j] = 1;
        set.push_back(j);
      }
    }
    std::sort(set.begin(), set.end());
    const auto expected = try_ldet_submatrix(c, set);
    REQUIRE(expected);
    CHECK(bqp_value(integer_lift(set, n), ups, c) ==
          doctest::Approx(*expected).epsilon(1e-9));
  }
}

TEST_CASE("log-scaling gradient of the lifted objective") {
  SUBCASE("binary lifts are scaling-stationary") {
    const std::vector<double> g =
        bqp_grad_log_scaling(integer_lift({0}, 2), ScalingVector::ones(2), c2());
    CHECK(inf_norm(g) <= 1e-12);
  }
  SUBCASE("zero point") {
    std::vector<double> x(2, 0.0);
    const BqpPoint p(x, SymMatrix::diag(x));
    const std::vector<double> g = bqp_grad_log_scaling(p, ScalingVector::ones(2), c2());
    CHECK(inf_norm(g) <= 1e-14);
  }
  SUBCASE("finite differences at the diagonal member point") {
    Rng rng(92);
    const BqpPoint p = diagonal_point_half(2);
    for (int trial = 0; trial < 10; ++trial) {
      const ScalingVector ups = random_scaling(rng, 2);
      const auto f = [&](std::span<const double> logs) {
        return bqp_value(p, ScalingVector::from_logs({logs.begin(), logs.end()}), c2());
      };
      const std::vector<double> fd =
          fd_gradient(f, {ups.logs().begin(), ups.logs().end()});
      CHECK(rel_err_inf(bqp_grad_log_scaling(p, ups, c2()), fd) <= 1e-5);
    }
  }
}

TEST_CASE("log-scaling Hessian of the lifted objective") {
  SUBCASE("binary lift gives a zero block on the selected index") {
    const SymMatrix h =
        bqp_hessian_log_scaling(integer_lift({0}, 2), ScalingVector::ones(2), c2());
    CHECK(h(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("diagonal member point by hand") {
    const SymMatrix h =
        bqp_hessian_log_scaling(diagonal_point_half(2), ScalingVector::ones(2), c2());
    CHECK(h(0, 0) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(h(1, 1) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(h(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("matches finite differences of the gradient at member points") {
    Rng rng(93);
    const Instance inst(random_pd(rng, 4, 0.4), 2);
    for (int trial = 0; trial < 8; ++trial) {
      const BqpPoint p = random_member_point(rng, inst);
      const ScalingVector ups = random_scaling(rng, 4);
      const SymMatrix h = bqp_hessian_log_scaling(p, ups, inst.C());
      std::vector<double> logs(ups.logs().begin(), ups.logs().end());
      for (int j = 0; j < 4; ++j) {
        const double hh = 1e-6;
        std::vector<double> lp(logs), lm(logs);
        lp[j] += hh;
        lm[j] -= hh;
        const auto gp = bqp_grad_log_scaling(p, ScalingVector::from_logs(lp), inst.C());
        const auto gm = bqp_grad_log_scaling(p, ScalingVector::from_logs(lm), inst.C());
        for (int i = 0; i < 4; ++i)
          CHECK(h(i, j) == doctest::Approx((gp[i] - gm[i]) / (2.0 * hh)).epsilon(2e-5));
      }
    }
  }
}

TEST_CASE("Hessian PSD and the two algebraic routes agree") {
  Rng rng(94);
  const Instance inst(random_pd(rng, 5, 0.4), 2);
  for (int trial = 0; trial < 30; ++trial) {
    const BqpPoint p = random_member_point(rng, inst);
    const ScalingVector ups = random_scaling(rng, 5);
    const SymMatrix h = bqp_hessian_log_scaling(p, ups, inst.C());
    CHECK(eig_sym(h).lambda.back() >= -1e-8);

    // second route: 4 (E+I)^{-1} o (E^{-1}+I)^{-1} with E = D^{-1} A D^{-1},
    // defined when x < e and the scaled Hadamard part is PD
    bool interior = true;
    for (double v : p.x) interior = interior && v < 1.0 - 1e-6;
    if (!interior) continue;
    const SymMatrix a = hadamard(sandwich_diag(ups.values(), inst.C()), p.X);
    const auto a_chol = Cholesky::factor(a);
    if (!a_chol) continue;
    const int n = 5;
    std::vector<double> dinv(n);
    for (int i = 0; i < n; ++i) dinv[i] = 1.0 / std::sqrt(1.0 - p.x[i]);
    const SymMatrix e_mat = sandwich_diag(dinv, a);
    SymMatrix e_plus_i = e_mat;
    for (int i = 0; i < n; ++i) e_plus_i.set(i, i, e_plus_i(i, i) + 1.0);
    const SymMatrix first = Cholesky::factor(e_plus_i)->inverse();
    // (E^{-1} + I)^{-1} = E (E + I)^{-1}
    const Matrix second_m = matmul(e_mat.mat(), first.mat());
    const SymMatrix second = SymMatrix::from(second_m);
    SymMatrix route2(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) route2.set(i, j, 4.0 * first(i, j) * second(i, j));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(std::fabs(route2(i, j) - h(i, j)) <= 1e-8);
  }
}

TEST_CASE("pointwise midpoint convexity in log scaling") {
  Rng rng(95);
  const Instance inst(random_pd(rng, 4, 0.4), 2);
  for (int trial = 0; trial < 100; ++trial) {
    const BqpPoint p = random_member_point(rng, inst);
    std::vector<double> la(4), lb(4), lm(4);
    for (int i = 0; i < 4; ++i) {
      la[i] = rng.uniform(-1.0, 1.0);
      lb[i] = rng.uniform(-1.0, 1.0);
      lm[i] = 0.5 * (la[i] + lb[i]);
    }
    const double fa = bqp_value(p, ScalingVector::from_logs(la), inst.C());
    const double fb = bqp_value(p, ScalingVector::from_logs(lb), inst.C());
    const double fm = bqp_value(p, ScalingVector::from_logs(lm), inst.C());
    CHECK(fm <= 0.5 * (fa + fb) + 1e-9);
  }
}
