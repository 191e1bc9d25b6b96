#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "mesp/ddfact.hpp"
#include "mesp/exact.hpp"

using namespace mesp;
using namespace mesp::testing;

TEST_CASE("truncation index on worked spectra") {
  CHECK(truncation_index(std::vector<double>{4, 2, 1}, 2) == 1);
  CHECK(truncation_index(std::vector<double>{1, 1, 1, 1}, 2) == 0);
  CHECK(truncation_index(std::vector<double>{2, 0}, 1) == 0);  // boundary ">=" case
}

TEST_CASE("truncation index signals exhausted spectra") {
  CHECK_THROWS_AS(truncation_index(std::vector<double>{1, 0, 0}, 2), DomainError);
}

TEST_CASE("truncation index is unique on random spectra") {
  Rng rng(81);
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 2 + rng.uniform_int(0, 10);
    std::vector<double> lam(k);
    for (double& v : lam) v = rng.uniform(0.0, 4.0);
    std::sort(lam.begin(), lam.end(), std::greater<>());
    double total = 0.0;
    for (double v : lam) total += v;
    if (!(total > 0.0)) continue;
    const int s = 1 + rng.uniform_int(0, k - 1);

    // exhaustive check of the sandwich over every candidate
    std::vector<double> suffix(k + 1, 0.0);
    for (int i = k - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + lam[i];
    int count = 0, found = -1;
    for (int h = 0; h < s; ++h) {
      if (!(suffix[h] > 0.0)) break;
      const double mean = suffix[h] / (s - h);
      if ((h == 0 || lam[h - 1] > mean) && mean >= lam[h]) {
        ++count;
        if (found < 0) found = h;
      }
    }
    REQUIRE(count == 1);
    CHECK(truncation_index(lam, s) == found);
  }
}

TEST_CASE("truncated logdet worked values and weights") {
  SUBCASE("(4,2,1) s=2") {
    const SpectrumValue v = truncated_logdet(std::vector<double>{4, 2, 1}, 2);
    CHECK(v.head == 1);
    CHECK(v.value == doctest::Approx(std::log(12.0)).epsilon(1e-12));
    CHECK(v.weights[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(v.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(v.weights[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("(1,1,1,1) s=2") {
    const SpectrumValue v = truncated_logdet(std::vector<double>{1, 1, 1, 1}, 2);
    CHECK(v.value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    for (double w : v.weights) CHECK(w == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("(2,0) s=1") {
    const SpectrumValue v = truncated_logdet(std::vector<double>{2, 0}, 1);
    CHECK(v.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(v.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("factorize reproduces C and trims rank") {
  SUBCASE("identity") {
    const Factorization fact = factorize(diag_matrix({1, 1}));
    CHECK(fact.k == 2);
    const Matrix prod = matmul(fact.f, transpose(fact.f));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
  }
  SUBCASE("2x2 eigensystem") {
    const Factorization fact = factorize(c2());
    CHECK(fact.k == 2);
    const Matrix prod = matmul(fact.f, transpose(fact.f));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(prod(i, j) == doctest::Approx(c2()(i, j)).epsilon(1e-10));
    CHECK(std::fabs(fact.f(0, 0)) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-10));
    CHECK(std::fabs(fact.f(0, 1)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  }
  SUBCASE("rank deficiency drops columns") {
    const Factorization fact = factorize(diag_matrix({4, 0}));
    CHECK(fact.k == 1);
    CHECK(fact.f(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fact.f(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("ddfact value on the worked 2x2 instance") {
  const Factorization fact = factorize(c2());
  const ScalingVector ones = ScalingVector::ones(2);
  SUBCASE("binary point") {
    CHECK(ddfact_value(std::vector<double>{1, 0}, ones, fact, 1) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));
  }
  SUBCASE("midpoint: trace invariance makes the objective constant") {
    CHECK(ddfact_value(std::vector<double>{0.5, 0.5}, ones, fact, 1) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));
  }
  SUBCASE("uniform scaling invariance on the feasible slice") {
    Rng rng(82);
    for (int trial = 0; trial < 20; ++trial) {
      const double t = rng.uniform(0.0, 1.0);
      const std::vector<double> x{t, 1.0 - t};
      const ScalingVector ups = random_scaling(rng, 2);
      const double base = ddfact_value(x, ups, fact, 1);
      for (double c : {0.1, 10.0}) {
        std::vector<double> scaled{c * ups.value(0), c * ups.value(1)};
        CHECK(ddfact_value(x, ScalingVector::from_values(scaled), fact, 1) ==
              doctest::Approx(base).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("ddfact value signals -inf when the support is too small") {
  const Factorization fact = factorize(diag_matrix({2, 3, 4}));
  const std::vector<double> x{1, 0, 0};
  CHECK(ddfact_value(x, ScalingVector::ones(3), fact, 2) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("ddfact x-gradient worked cases") {
  SUBCASE("identity factor, s=1") {
    const Factorization fact = factorize(diag_matrix({1, 1}));
    const std::vector<double> g =
        ddfact_grad_x(std::vector<double>{0.5, 0.5}, ScalingVector::ones(2), fact, 1);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("selected index attains the unit bound at a binary point") {
    const Factorization fact = factorize(c2());
    const std::vector<double> g =
        ddfact_grad_x(std::vector<double>{1, 0}, ScalingVector::ones(2), fact, 1);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("ddfact x-gradient matches finite differences at stable points") {
  Rng rng(83);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 10; ++trial) {
    const int n = 5;
    const SymMatrix c = random_pd(rng, n, 0.4);
    const Factorization fact = factorize(c);
    const int s = 2;
    const ScalingVector ups = random_scaling(rng, n);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(0.2, 0.9);

    // keep only points whose truncation structure has a healthy margin
    const EigDecomp eig = eig_sym(weighted_gram(x, ups, fact));
    const int head = truncation_index(eig.lambda, s);
    double tail = 0.0;
    for (size_t i = head; i < eig.lambda.size(); ++i) tail += eig.lambda[i];
    const double mean = tail / (s - head);
    const double upper_margin = head == 0 ? 1.0 : eig.lambda[head - 1] - mean;
    const double lower_margin = mean - eig.lambda[head];
    if (upper_margin < 1e-2 || lower_margin < 1e-2) continue;

    const auto f = [&](std::span<const double> p) { return ddfact_value(p, ups, fact, s); };
    const std::vector<double> fd = fd_gradient(f, x);
    CHECK(rel_err_inf(ddfact_grad_x(x, ups, fact, s), fd) <= 1e-5);
    ++tested;
  }
  CHECK(tested == 10);
}

TEST_CASE("ddfact log-scaling gradient") {
  SUBCASE("zero point resolves to the formal limit") {
    const Factorization fact = factorize(c2());
    const std::vector<double> x{0.0, 0.0};
    const std::vector<double> g =
        ddfact_grad_log_scaling(x, ScalingVector::ones(2), fact, 1);
    CHECK(inf_norm(g) == 0.0);
  }
  SUBCASE("finite differences in log scaling") {
    Rng rng(84);
    int tested = 0;
    for (int trial = 0; trial < 40 && tested < 10; ++trial) {
      const int n = 4, s = 2;
      const SymMatrix c = random_pd(rng, n, 0.4);
      const Factorization fact = factorize(c);
      const ScalingVector ups = random_scaling(rng, n);
      std::vector<double> x(n);
      for (double& v : x) v = rng.uniform(0.2, 0.9);

      const EigDecomp eig = eig_sym(weighted_gram(x, ups, fact));
      const int head = truncation_index(eig.lambda, s);
      double tail = 0.0;
      for (size_t i = head; i < eig.lambda.size(); ++i) tail += eig.lambda[i];
      const double mean = tail / (s - head);
      if ((head != 0 && eig.lambda[head - 1] - mean < 1e-2) || mean - eig.lambda[head] < 1e-2)
        continue;

      const auto f = [&](std::span<const double> logs) {
        return ddfact_value(x, ScalingVector::from_logs({logs.begin(), logs.end()}), fact, s);
      };
      const std::vector<double> fd =
          fd_gradient(f, {ups.logs().begin(), ups.logs().end()});
      CHECK(rel_err_inf(ddfact_grad_log_scaling(x, ups, fact, s), fd) <= 1e-5);
      ++tested;
    }
    CHECK(tested == 10);
  }
}

TEST_CASE("gradient bound at binary points with unit scaling") {
  Rng rng(85);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + rng.uniform_int(0, 3);
    const SymMatrix c = random_pd(rng, n, 0.3);
    const Factorization fact = factorize(c);
    const int s = 1 + rng.uniform_int(0, n - 2);
    std::vector<double> x(n, 0.0);
    std::vector<int> set;
    while (static_cast<int>(set.size()) < s) {
      const int j = rng.uniform_int(0, n - 1);
      if (x[j] == 0.0) {
        x[j] = 1.0;
        set.push_back(j);
      }
    }
    const std::vector<double> t = ddfact_grad_x(x, ScalingVector::ones(n), fact, s);
    for (int j : set) CHECK(t[j] <= 1.0 + 1e-9);
  }
}

TEST_CASE("ddfact concavity probe") {
  Rng rng(86);
  const int n = 6, s = 3;
  const SymMatrix c = random_pd(rng, n, 0.3);
  const Factorization fact = factorize(c);
  const ScalingVector ups = random_scaling(rng, n);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> a = random_simplex_point(rng, n, s);
    const std::vector<double> b = random_simplex_point(rng, n, s);
    const double t = rng.uniform(0.05, 0.95);
    std::vector<double> mid(n);
    for (int i = 0; i < n; ++i) mid[i] = t * a[i] + (1.0 - t) * b[i];
    const double lhs = ddfact_value(mid, ups, fact, s);
    const double rhs =
        t * ddfact_value(a, ups, fact, s) + (1.0 - t) * ddfact_value(b, ups, fact, s);
    CHECK(lhs >= rhs - 1e-8);
  }
}

TEST_CASE("solve_ddfact certifies the 2x2 instance tightly") {
  const Instance inst(c2(), 1);
  const BoundReport rep = solve_ddfact(inst, ScalingVector::ones(2));
  CHECK(rep.converged);
  CHECK(rep.bound == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("solve_ddfact bounds the oracle and is o-scaling invariant") {
  const Instance inst(diag_matrix({2, 3, 4}), 2);
  SolveOptions opts;
  opts.tol = 1e-8;
  const double base = solve_ddfact(inst, ScalingVector::ones(3), opts).bound;
  CHECK(base >= std::log(12.0) - 1e-6);
  for (double gamma : {0.3, 5.0}) {
    const double scaled = solve_ddfact(inst, ScalingVector::uniform(3, gamma), opts).bound;
    CHECK(scaled == doctest::Approx(base).epsilon(1e-7));
  }
}

TEST_CASE("complementary ddfact") {
  SUBCASE("diagonal worked case") {
    const Instance inst(diag_matrix({2, 3, 4}), 2);
    const BoundReport rep = solve_ddfact_complement(inst, ScalingVector::ones(3));
    CHECK(rep.method == "ddfact-comp");
    CHECK(rep.offset == doctest::Approx(std::log(24.0)).epsilon(1e-10));
    CHECK(rep.bound >= std::log(12.0) - 1e-6);
  }
  SUBCASE("identity instance") {
    const Instance inst(diag_matrix({1, 1, 1}), 2);
    const BoundReport rep = solve_ddfact_complement(inst, ScalingVector::ones(3));
    CHECK(rep.bound >= -1e-6);  // oracle z = 0
  }
  SUBCASE("near-singular covariance is unavailable") {
    const Instance inst(diag_matrix({1.0, 1e-10}), 1);
    CHECK_THROWS_AS(solve_ddfact_complement(inst, ScalingVector::ones(2)), DomainError);
  }
}
