#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "mesp/exact.hpp"
#include "mesp/heuristics.hpp"

using namespace mesp;
using namespace mesp::testing;

TEST_CASE("greedy trace on a diagonal instance") {
  const auto inc = greedy_construct(Instance(diag_matrix({2, 3, 4}), 2));
  REQUIRE(inc);
  CHECK(inc->set == std::vector<int>{1, 2});
  CHECK(inc->value == doctest::Approx(std::log(12.0)).epsilon(1e-12));
  CHECK(inc->feasible);
}

TEST_CASE("greedy breaks ties to the lowest index") {
  const auto inc = greedy_construct(Instance(c2(), 1));
  REQUIRE(inc);
  CHECK(inc->set == std::vector<int>{0});
  CHECK(inc->value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("greedy respects the feasibility look-ahead") {
  Constraints cons{Matrix(1, 3), {1.0}};
  cons.a(0, 1) = 1.0;
  cons.a(0, 2) = 1.0;
  const auto inc = greedy_construct(Instance(diag_matrix({2, 3, 4}), 2, cons));
  REQUIRE(inc);
  CHECK(inc->set == std::vector<int>{0, 2});  // {3} then {1} in value order
  CHECK(inc->value == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("local search escapes a bad start") {
  const Instance inst(diag_matrix({2, 3, 4}), 2);
  Incumbent start{{0, 1}, std::log(6.0), true};
  const Incumbent out = local_search(inst, start);
  CHECK(out.set == std::vector<int>{1, 2});
  CHECK(out.value == doctest::Approx(std::log(12.0)).epsilon(1e-12));
}

TEST_CASE("local search is a fixed point at the optimum") {
  const Instance inst(diag_matrix({2, 3, 4}), 2);
  Incumbent start{{1, 2}, std::log(12.0), true};
  CHECK(local_search(inst, start).set == std::vector<int>{1, 2});
}

TEST_CASE("local search honors constraints when swapping") {
  Constraints cons{Matrix(1, 3), {1.0}};
  cons.a(0, 1) = 1.0;
  cons.a(0, 2) = 1.0;
  const Instance inst(diag_matrix({2, 3, 4}), 2, cons);
  Incumbent start{{0, 1}, std::log(6.0), true};
  const Incumbent out = local_search(inst, start);
  CHECK(out.set == std::vector<int>{0, 2});
  CHECK(out.value == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("local search rejects infeasible starts") {
  Constraints cons{Matrix(1, 3), {0.0}};
  cons.a(0, 0) = 1.0;
  const Instance inst(diag_matrix({2, 3, 4}), 2, cons);
  CHECK_THROWS_AS(local_search(inst, Incumbent{{0, 1}, 0.0, true}), InputError);
}

TEST_CASE("heuristic value is monotone and a valid lower bound") {
  Rng rng(41);
  int exact_hits = 0, usable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + rng.uniform_int(0, 7);
    const int s = 1 + rng.uniform_int(0, n - 2);
    std::optional<Constraints> cons;
    if (trial % 2 == 0) {
      Constraints c{Matrix(1, n), {static_cast<double>(rng.uniform_int(0, s))}};
      for (int j = 0; j < n; ++j) c.a(0, j) = rng.uniform_int(-2, 2);
      cons = c;
    }
    const Instance inst(random_pd(rng, n, 0.3), s, cons);
    const auto start = greedy_construct(inst);
    if (!start) continue;
    int rounds = 0;
    const Incumbent polished = local_search(inst, *start, &rounds);
    CHECK(polished.value >= start->value - 1e-12);  // monotone
    CHECK(rounds <= 10000);                         // termination

    const ExactResult oracle = solve_exact(inst);
    REQUIRE(oracle.feasible);
    CHECK(polished.value <= oracle.z + 1e-9);  // lower-bound validity
    ++usable;
    if (polished.value >= oracle.z - 1e-9) ++exact_hits;
  }
  CHECK(usable >= 40);
  // calibration, recorded not asserted tightly: the heuristic lands on the
  // optimum in the large majority of desk-scale cases
  MESSAGE("heuristic matched the oracle on ", exact_hits, " of ", usable, " instances");
  CHECK(exact_hits >= usable / 2);
}
