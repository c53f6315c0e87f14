#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "conicvol/error.hpp"
#include "conicvol/lemma.hpp"

using namespace conicvol;
using namespace conicvol::lemma;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;

struct Tuple {
  double V, chi, a, b;
  int n;
};

Tuple random_tuple(std::mt19937_64& rng, int n_max) {
  std::uniform_real_distribution<double> vd(0.1, 50.0), ad(-3.0, 2.0), wd(0.01, 4.0), fd(0.0, 1.0);
  std::uniform_int_distribution<int> nd(2, n_max);
  Tuple t{};
  t.V = vd(rng);
  t.a = ad(rng);
  t.b = t.a + wd(rng);
  t.chi = t.a * t.V + fd(rng) * (t.b - t.a) * t.V;
  t.n = nd(rng);
  return t;
}
}  // namespace

TEST_CASE("bound examples", "[lemma]") {
  CHECK_THAT(lemma_bound(4 * kPi, 4 * kPi, 0, 1), WithinRel(8 * kPi * kPi, 1e-14));
  CHECK_THAT(lemma_bound(5, 10, -1, 2), WithinRel(25.0, 1e-14));
  const double V = kPi * (1 + std::sqrt(10.0)), chi = 3 * kPi;
  const double expected = 0.5 * V * V - (chi + V) * (chi + V) / 4 + V * chi;
  CHECK_THAT(lemma_bound(V, chi, -1, 1), WithinRel(expected, 1e-14));
  CHECK(brute_force_max(V, chi, -1, 1, 64) <= lemma_bound(V, chi, -1, 1) + 1e-12);
  CHECK_THAT(lemma_bound(3, 1.5, 0.5, 0.5), WithinRel(0.5 * 0.5 * 9, 1e-15));
}

TEST_CASE("inadmissible inputs are rejected", "[lemma]") {
  CHECK_THROWS_AS(lemma_bound(1, 3, 0, 2), InvalidInput);
  CHECK_THROWS_AS(lemma_bound(1, -1, 0, 2), InvalidInput);
  CHECK_THROWS_AS(lemma_bound(0, 0, 0, 2), InvalidInput);
  CHECK_THROWS_AS(lemma_bound(1, 1, 2, 0), InvalidInput);
  CHECK_THROWS_AS(bang_bang(1, 3, 0, 2), InvalidInput);
  CHECK_THROWS_AS(brute_force_max(1, 1, 0, 2, 1), InvalidInput);
  CHECK_THROWS_AS(brute_force_max(1, 3, 0, 2, 8), InvalidInput);
}

TEST_CASE("bang-bang profile attains the bound", "[lemma]") {
  const auto p = bang_bang(10, 4, -1, 1);
  CHECK_THAT(breakpoint(10, 4, -1, 1), WithinAbs(7.0, 1e-15));
  REQUIRE(p.n() == 2);
  CHECK_THAT(p.knots[1], WithinAbs(7.0, 1e-15));
  CHECK(p.slopes[0] == 1.0);
  CHECK(p.slopes[1] == -1.0);
  CHECK(p.admissible());
  CHECK_THAT(p.integral(), WithinAbs(lemma_bound(10, 4, -1, 1), 1e-12));

  const auto top = bang_bang(3, 6, -1, 2);
  REQUIRE(top.n() == 1);
  CHECK(top.slopes[0] == 2.0);
  const auto bottom = bang_bang(3, -3, -1, 2);
  REQUIRE(bottom.n() == 1);
  CHECK(bottom.slopes[0] == -1.0);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_tuple(rng, 64);
    const auto q = bang_bang(t.V, t.chi, t.a, t.b);
    CHECK(q.admissible(1e-9));
    CHECK_THAT(q.integral(), WithinAbs(lemma_bound(t.V, t.chi, t.a, t.b), 1e-12 * std::max(1.0, t.V * t.V * std::abs(t.b))));
  }
}

TEST_CASE("brute force examples", "[lemma]") {
  CHECK_THAT(brute_force_max(1, 1, 0, 2, 2), WithinAbs(0.75, 1e-15));
  CHECK_THAT(lemma_bound(1, 1, 0, 2), WithinAbs(0.75, 1e-15));
  CHECK(lemma_bound(10, 4, -1, 1) - brute_force_max(10, 4, -1, 1, 1000) < 1e-2);
  for (int n : {2, 7, 64, 1000}) CHECK_THAT(brute_force_max(2, 6, -1, 3, n), WithinRel(6.0, 1e-12));
}

TEST_CASE("brute force never exceeds the bound", "[lemma]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10'000; ++i) {
    const auto t = random_tuple(rng, 64);
    const double bound = lemma_bound(t.V, t.chi, t.a, t.b);
    const double best = brute_force_max(t.V, t.chi, t.a, t.b, t.n);
    if (!(best <= bound + 1e-12 * std::max(1.0, std::abs(bound)))) {
      FAIL("V=" << t.V << " chi=" << t.chi << " a=" << t.a << " b=" << t.b << " n=" << t.n);
    }
  }
}

TEST_CASE("refinement is monotone and the gap shrinks like 1/n", "[lemma]") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_tuple(rng, 2);
    const double bound = lemma_bound(t.V, t.chi, t.a, t.b);
    double prev = -INFINITY;
    for (int n = 2; n <= 1024; n *= 2) {
      const double m = brute_force_max(t.V, t.chi, t.a, t.b, n);
      CHECK(m >= prev - 1e-12 * std::max(1.0, std::abs(m)));
      CHECK(bound - m <= (t.b - t.a) * t.V * t.V / (2.0 * n) + 1e-12 * std::max(1.0, std::abs(bound)));
      prev = m;
    }
  }
}

TEST_CASE("greedy breakpoint sits within one cell of delta", "[lemma]") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const auto t = random_tuple(rng, 256);
    const auto p = greedy_profile(t.V, t.chi, t.a, t.b, t.n);
    REQUIRE(p.admissible(1e-9));
    const double w = t.V / t.n;
    const double delta = breakpoint(t.V, t.chi, t.a, t.b);
    for (std::size_t k = 0; k < p.n(); ++k) {
      const double x = (k + 0.5) * w;
      if (x < delta - w) CHECK(p.slopes[k] == t.b);
      if (x > delta + w) CHECK(p.slopes[k] == t.a);
    }
  }
}

TEST_CASE("random search stays below greedy", "[lemma]") {
  const RandomSearchOptions opts{20, 2000, 3};
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10; ++i) {
    const auto t = random_tuple(rng, 16);
    const double greedy = brute_force_max(t.V, t.chi, t.a, t.b, t.n);
    const double search = random_search_max(t.V, t.chi, t.a, t.b, t.n, opts);
    const double scale = std::max(1.0, std::abs(greedy));
    CHECK(search <= greedy + 1e-9 * scale);
    CHECK(search >= greedy - 1e-3 * scale);
  }
  CHECK(random_search_max(1, 1, 0, 2, 8, opts) == random_search_max(1, 1, 0, 2, 8, opts));
}

TEST_CASE("equal slopes give the unique profile", "[lemma]") {
  CHECK(breakpoint(4, 8, 2, 2) == 4.0);
  CHECK_THAT(brute_force_max(4, 8, 2, 2, 16), WithinRel(16.0, 1e-14));
  const auto p = bang_bang(4, 8, 2, 2);
  CHECK_THAT(p.integral(), WithinRel(16.0, 1e-14));
}
