#include <cmath>
#include <doctest.h>
#include <set>

#include "dcmm/errors.hpp"
#include "dcmm/model.hpp"
#include "dcmm/rng.hpp"
#include "helpers.hpp"

using namespace dcmm;

TEST_SUITE_BEGIN("model");

TEST_CASE("build_h single community collapse") {
  DcmmParams p;
  p.n = 3;
  p.k = 1;
  p.theta = Vector::Ones(3);
  p.pi = Matrix::Ones(3, 1);
  p.p = Matrix::Constant(1, 1, 0.5);
  Matrix h = build_h(p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(h(i, j) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("build_h identity case") {
  DcmmParams p;
  p.n = 2;
  p.k = 2;
  p.theta = Vector::Ones(2);
  p.pi = Matrix::Identity(2, 2);
  p.p = Matrix::Identity(2, 2);
  Matrix h = build_h(p);
  CHECK(test::max_abs_diff(h, Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("build_h matches triple-sum oracle") {
  rng::Engine eng(42);
  DcmmParams p = test::random_params(5, 2, eng, 1);
  Matrix h = build_h(p);
  // Brute-force elementwise evaluation of the defining double sum.
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) {
      double expect = 0.0;
      for (int a = 0; a < p.k; ++a)
        for (int b = 0; b < p.k; ++b)
          expect += p.theta(i) * p.theta(j) * p.pi(i, a) * p.pi(j, b) * p.p(a, b);
      CHECK(std::abs(h(i, j) - expect) < 1e-12);
    }
  }
  CHECK(test::max_abs_diff(h, h.transpose()) == 0.0);
}

TEST_CASE("validation names the failing invariant") {
  rng::Engine eng(7);
  DcmmParams good = test::random_params(6, 2, eng);
  validate(good);

  DcmmParams bad = good;
  bad.pi(3, 0) += 0.5;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("sum to 1"), validation_error);

  bad = good;
  bad.theta(2) = 0.0;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("theta"), validation_error);

  bad = good;
  for (int i = 0; i < bad.n; ++i)
    if (is_pure_row(bad.pi, i, 1)) {
      bad.pi(i, 1) = 0.5;
      bad.pi(i, 0) = 0.5;
    }
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("pure"), validation_error);

  bad = good;
  bad.p(0, 1) += 0.05;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("symmetric"), validation_error);

  bad = good;
  bad.p(0, 0) = 1.5;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("[0,1]"), validation_error);

  bad = good;
  bad.p.setConstant(0.4);
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("nonsingular"), validation_error);
}

TEST_CASE("sample_adjacency degenerate probabilities") {
  DcmmParams zero;
  zero.n = 4;
  zero.k = 1;
  zero.theta = Vector::Constant(4, 1e-6);
  zero.pi = Matrix::Ones(4, 1);
  zero.p = Matrix::Constant(1, 1, 0.0);
  // P = 0 is singular; use a tiny theta with P = 1 so H ~ 1e-12 instead.
  zero.p(0, 0) = 1.0;
  AdjacencyMatrix a = sample_adjacency(zero, 123);
  CHECK(a.entries.cwiseAbs().maxCoeff() == 0.0);

  DcmmParams one;
  one.n = 4;
  one.k = 1;
  one.theta = Vector::Ones(4);
  one.pi = Matrix::Ones(4, 1);
  one.p = Matrix::Constant(1, 1, 1.0);
  AdjacencyMatrix b = sample_adjacency(one, 5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(b.entries(i, j) == (i == j ? 0.0 : 1.0));
}

TEST_CASE("sample_adjacency deterministic and symmetric") {
  rng::Engine eng(9);
  DcmmParams p = test::random_params(8, 2, eng);
  AdjacencyMatrix a1 = sample_adjacency(p, 77);
  AdjacencyMatrix a2 = sample_adjacency(p, 77);
  CHECK(test::max_abs_diff(a1.entries, a2.entries) == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AdjacencyMatrix a = sample_adjacency(p, seed);
    validate(a);
  }
}

TEST_CASE("sample_adjacency monte carlo frequency") {
  rng::Engine eng(11);
  DcmmParams p = test::random_params(6, 2, eng);
  Matrix h = build_h(p);
  const int i = 2, j = 4;
  const int m = 10000;
  double count = 0.0;
  for (int s = 0; s < m; ++s)
    count += sample_adjacency(p, 1000 + static_cast<std::uint64_t>(s)).entries(i, j);
  double freq = count / m;
  double tol = 4.0 * std::sqrt(h(i, j) * (1.0 - h(i, j)) / m);
  CHECK(std::abs(freq - h(i, j)) <= tol);
}

TEST_CASE("self-loop mode samples the diagonal") {
  DcmmParams p;
  p.n = 5;
  p.k = 1;
  p.theta = Vector::Ones(5);
  p.pi = Matrix::Ones(5, 1);
  p.p = Matrix::Constant(1, 1, 1.0);
  p.self_loop = true;
  AdjacencyMatrix a = sample_adjacency(p, 3);
  validate(a);
  for (int i = 0; i < 5; ++i) CHECK(a.entries(i, i) == 1.0);  // H_ii = 1

  p.self_loop = false;
  AdjacencyMatrix b = sample_adjacency(p, 3);
  for (int i = 0; i < 5; ++i) CHECK(b.entries(i, i) == 0.0);
}

TEST_CASE("synthetic_config matches the published setup") {
  DcmmParams p1 = synthetic_config(ThetaSetting::Const06, 50, 3);
  for (int i = 0; i < 50; ++i) CHECK(p1.theta(i) == 0.6);
  DcmmParams p3 = synthetic_config(ThetaSetting::Const09, 50, 3);
  for (int i = 0; i < 50; ++i) CHECK(p3.theta(i) == 0.9);
  DcmmParams p2 = synthetic_config(ThetaSetting::Uniform, 50, 3);
  for (int i = 0; i < 50; ++i) {
    CHECK(p2.theta(i) >= 0.3);
    CHECK(p2.theta(i) <= 0.9);
  }

  for (const auto* p : {&p1, &p2, &p3}) {
    CHECK(p->p(0, 0) == 1.0);
    CHECK(p->p(1, 1) == 1.0);
    CHECK(p->p(0, 1) == 0.2);
    CHECK(p->p(1, 0) == 0.2);
    int pure0 = 0, pure1 = 0;
    for (int i = 0; i < p->n; ++i) {
      if (p->pi(i, 0) == 1.0) ++pure0;
      if (p->pi(i, 1) == 1.0) ++pure1;
      CHECK(p->pi(i, 0) + p->pi(i, 1) == doctest::Approx(1.0).epsilon(1e-15));
      if (p->pi(i, 0) != 1.0 && p->pi(i, 1) != 1.0) {
        CHECK(p->pi(i, 0) >= 0.1);
        CHECK(p->pi(i, 0) <= 0.9);
      }
    }
    CHECK(pure0 == 1);
    CHECK(pure1 == 1);
  }
}

TEST_CASE("synthetic_config shuffling preserves the membership multiset") {
  DcmmParams a = synthetic_config(ThetaSetting::Const06, 40, 5);
  DcmmParams b = synthetic_config(ThetaSetting::Const06, 40, 5);
  CHECK(test::max_abs_diff(a.pi, b.pi) == 0.0);  // deterministic under seed

  std::multiset<double> firsts;
  for (int i = 0; i < a.n; ++i) firsts.insert(a.pi(i, 0));
  CHECK(firsts.count(1.0) == 1);
  CHECK(firsts.count(0.0) == 1);
  CHECK(firsts.size() == 40);

  CHECK_THROWS_AS(synthetic_config(ThetaSetting::Const06, 3, 1), validation_error);
}

TEST_SUITE_END();
