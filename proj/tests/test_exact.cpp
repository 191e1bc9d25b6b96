#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "mesp/exact.hpp"

using namespace mesp;
using namespace mesp::testing;

TEST_CASE("solve_exact on diagonal instances") {
  const ExactResult res = solve_exact(Instance(diag_matrix({2, 3, 4}), 2));
  CHECK(res.z == doctest::Approx(std::log(12.0)).epsilon(1e-12));
  REQUIRE(res.optima.size() == 1);
  CHECK(res.optima[0] == std::vector<int>{1, 2});
  CHECK(res.count_feasible == 3);
}

TEST_CASE("solve_exact reports all co-optima") {
  const ExactResult res = solve_exact(Instance(c2(), 1));
  CHECK(res.z == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  REQUIRE(res.optima.size() == 2);
  CHECK(res.optima[0] == std::vector<int>{0});
  CHECK(res.optima[1] == std::vector<int>{1});
}

TEST_CASE("solve_exact honors side constraints") {
  Constraints cons{Matrix(1, 3), {1.0}};
  cons.a(0, 1) = 1.0;
  cons.a(0, 2) = 1.0;  // x2 + x3 <= 1
  const ExactResult res = solve_exact(Instance(diag_matrix({2, 3, 4}), 2, cons));
  CHECK(res.z == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  REQUIRE(res.optima.size() == 1);
  CHECK(res.optima[0] == std::vector<int>{0, 2});
  CHECK(res.count_feasible == 2);
}

TEST_CASE("solve_exact refuses oversized enumerations") {
  Rng rng(31);
  const Instance inst(random_pd(rng, 30, 0.2), 15);
  CHECK_THROWS_AS(solve_exact(inst, 1000), InputError);
}

TEST_CASE("solve_exact flags infeasible constraint systems") {
  Constraints cons{Matrix(1, 3), {-10.0}};
  for (int j = 0; j < 3; ++j) cons.a(0, j) = 1.0;
  const ExactResult res = solve_exact(Instance(diag_matrix({2, 3, 4}), 2, cons));
  CHECK(!res.feasible);
  CHECK(res.count_feasible == 0);
  CHECK(res.optima.empty());
}

TEST_CASE("diagonal z equals the product of the s largest entries") {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + rng.uniform_int(0, 5);
    std::vector<double> d(n);
    for (double& v : d) v = rng.uniform(0.1, 5.0);
    const int s = 1 + rng.uniform_int(0, n - 2);
    std::vector<double> sorted(d);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double expected = 0.0;
    for (int i = 0; i < s; ++i) expected += std::log(sorted[i]);
    CHECK(solve_exact(Instance(diag_matrix(d), s)).z ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("adding a side constraint never increases z") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + rng.uniform_int(0, 3);
    const SymMatrix c = random_pd(rng, n, 0.3);
    const int s = 1 + rng.uniform_int(0, n - 2);
    const Instance base(c, s);
    const double z0 = solve_exact(base).z;

    Constraints cons{Matrix(1, n), {static_cast<double>(rng.uniform_int(0, s))}};
    for (int j = 0; j < n; ++j) cons.a(0, j) = rng.uniform_int(-2, 2);
    const ExactResult constrained = solve_exact(Instance(c, s, cons));
    if (constrained.feasible && constrained.z > -1e300) CHECK(constrained.z <= z0 + 1e-12);
  }
}
