#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "conicvol/bounds.hpp"
#include "conicvol/divisor.hpp"
#include "conicvol/error.hpp"

using namespace conicvol;
using Catch::Approx;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;
Divisor D(std::vector<double> orders) { return Divisor::from_orders(orders); }
double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }
}  // namespace

TEST_CASE("divisor invariants and classification", "[core]") {
  CHECK(D({-0.5}).classify() == Criticality::supercritical);
  CHECK(D({-0.5, -0.5}).classify() == Criticality::critical);
  CHECK(D({-0.5, -0.2, -0.1}).classify() == Criticality::supercritical);
  CHECK(D({-0.5, -0.4, -0.3}).classify() == Criticality::subcritical);
  CHECK(D({-0.1, -0.1, -0.1}).classify() == Criticality::subcritical);

  const Divisor d = D({-0.3, -0.5, -0.2});
  CHECK(d.beta() == Approx(-0.5));
  CHECK(d.alpha() == Approx(-0.5));
  CHECK(d.degree() == Approx(-1.0));

  CHECK_THROWS_AS(D({0.1}), InvalidOrder);
  CHECK_THROWS_AS(D({-1.0}), InvalidOrder);
  CHECK_THROWS_AS(D({std::nan("")}), InvalidInput);
}

TEST_CASE("beta <= alpha <= 0 on random divisors", "[core]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> order(-0.999, 0.0);
  int alpha_below_beta = 0;
  for (int k = 0; k < 2000; ++k) {
    std::vector<double> o(1 + k % 5);
    for (auto& v : o) v = order(rng);
    const Divisor d = D(o);
    CHECK(d.alpha() <= 0.0);
    CHECK(d.beta() <= 0.0);
    // alpha = |D| - beta sums the other orders; it can drop below beta once
    // two or more other points are present.
    if (d.alpha() < d.beta()) ++alpha_below_beta;
  }
  CHECK(alpha_below_beta > 0);
}

TEST_CASE("weighted Euler characteristic", "[core]") {
  CHECK(weighted_euler(Divisor{}) == Approx(4 * kPi));
  CHECK(weighted_euler(D({-0.5})) == Approx(3 * kPi));
  CHECK(weighted_euler(D({-0.5, -0.5})) == Approx(2 * kPi));
}

TEST_CASE("volume bounds examples", "[core]") {
  SECTION("round sphere") {
    const auto r = volume_bounds(Divisor{}, CurvatureBand(1, 1));
    REQUIRE(r.v_lower);
    REQUIRE(r.v_upper);
    CHECK_THAT(*r.v_lower, WithinRel(4 * kPi, 1e-12));
    CHECK_THAT(*r.v_upper, WithinRel(4 * kPi, 1e-12));
    CHECK(r.bounds_case == BoundsCase::a_positive);
  }
  SECTION("a = 0 is the linear case of the constraint") {
    const auto r = volume_bounds(D({-0.5}), CurvatureBand(0, 1));
    const double chi = 3 * kPi;
    CHECK_THAT(*r.v_lower, WithinRel(4.5 * kPi, 1e-12));
    CHECK_THAT(*r.v_lower, WithinRel(chi * chi / (4 * kPi * 1.0 * 0.5), 1e-12));
    CHECK_FALSE(r.v_upper);
  }
  SECTION("a < 0 matches the root of the quadratic constraint") {
    const auto r = volume_bounds(D({-0.5}), CurvatureBand(-1, 1));
    CHECK_THAT(*r.v_lower, WithinRel(kPi * (1 + std::sqrt(10.0)), 1e-12));
    const double V = *r.v_lower;
    CHECK(std::abs(-V * V + 2 * kPi * V + 9 * kPi * kPi) < 1e-9 * V * V);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(volume_bounds(D({-0.1, -0.1, -0.1}), CurvatureBand(-1, 1)), InvalidInput);
    CHECK_THROWS_AS(CurvatureBand(-1, 0), InvalidInput);
    CHECK_THROWS_AS(CurvatureBand(1, 0.5), InvalidInput);
  }
  SECTION("two-point critical divisor is flagged") {
    const auto r = volume_bounds(D({-0.5, -0.5}), CurvatureBand(-1, 1));
    CHECK(r.outside_hypotheses);
    CHECK(r.v_lower);
  }
}

TEST_CASE("minimal volume", "[core]") {
  CHECK_THAT(min_vol(Divisor{}), WithinRel(4 * kPi, 1e-12));
  CHECK_THAT(min_vol(D({-0.5})), WithinRel(kPi * (1 + std::sqrt(10.0)), 1e-12));
  CHECK_THAT(min_vol(-0.5, -0.5), WithinRel(2 * kPi, 1e-12));
  const Divisor d = D({-0.5});
  CHECK_THAT(min_vol(d), WithinRel(*volume_bounds(d, CurvatureBand(-1, 1)).v_lower, 1e-12));
}

TEST_CASE("pinching check", "[core]") {
  CHECK(pinching_check(D({-0.5, -0.5}), CurvatureBand(0.7, 0.7)));
  const auto no = pinching_details(D({-0.5}), CurvatureBand(0.26, 1));
  CHECK_FALSE(no.feasible);
  CHECK(no.discriminant < 0);
  CHECK(no.routes_agree);
  const auto edge = pinching_details(D({-0.5}), CurvatureBand(0.25, 1));
  CHECK(edge.feasible);
  CHECK(edge.discriminant == 0.0);
  const auto r = volume_bounds(D({-0.5}), CurvatureBand(0.25, 1));
  CHECK_THAT(*r.v_lower, WithinRel(*r.v_upper, 1e-12));
  CHECK_THROWS_AS(pinching_check(D({-0.5}), CurvatureBand(0, 1)), InvalidInput);
  const auto infeasible = volume_bounds(D({-0.5}), CurvatureBand(0.26, 1));
  CHECK_FALSE(infeasible.feasible);
  CHECK_FALSE(infeasible.v_lower);
  CHECK_FALSE(infeasible.v_upper);
}

TEST_CASE("bounds are roots of the quadratic constraint", "[core]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> order(-0.95, 0.0), unit(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 3000; ++k) {
    const Divisor d = D({order(rng), order(rng)});
    if (!d.satisfies_volume_hypotheses()) continue;
    const double b = 0.2 + 3 * unit(rng);
    const double limit = std::pow((1 + d.beta()) / (1 + d.alpha()), 2);
    const double a = b * limit * unit(rng);
    const auto r = volume_bounds(d, CurvatureBand(a, b));
    REQUIRE(r.feasible);
    const double al = d.alpha(), be = d.beta(), chi = r.chi;
    CHECK_THAT(chi, WithinRel(2 * kPi * (2 + al + be), 1e-14));
    for (double V : {*r.v_lower, *r.v_upper}) {
      const double c2 = a * b * V * V, c1 = 4 * kPi * (a * (1 + al) + b * (1 + be)) * V, c0 = chi * chi;
      CHECK(std::abs(c2 - c1 + c0) <= 1e-12 * std::max({c2, c1, c0}) * 10);
    }
    CHECK(*r.v_lower <= *r.v_upper);
    CHECK(*r.v_lower > 0);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("lower bound is monotone in the band", "[core]") {
  const Divisor d = D({-0.5, -0.2});
  const double limit = std::pow((1 + d.beta()) / (1 + d.alpha()), 2);
  for (double b = 0.5; b <= 3.0; b += 0.25) {
    double prev = 0.0;
    for (double a = -3.0; a <= b * limit; a += 0.05) {
      const double v = *volume_bounds(d, CurvatureBand(a, b)).v_lower;
      CHECK(v >= prev * (1 - 1e-12));
      prev = v;
    }
  }
  for (double a : {-2.0, -0.5, 0.0, 0.1}) {
    double prev = INFINITY;
    for (double b = 1.0; b <= 4.0; b += 0.1) {
      const auto r = volume_bounds(d, CurvatureBand(a, b));
      if (!r.v_lower) continue;
      CHECK(*r.v_lower <= prev * (1 + 1e-12));
      prev = *r.v_lower;
    }
  }
}

TEST_CASE("V_ab tends to V_0b as a tends to 0 from below", "[core]") {
  const Divisor d = D({-0.5, -0.3});
  const double v0 = *volume_bounds(d, CurvatureBand(0, 1.5)).v_lower;
  double prev = INFINITY;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double gap = std::abs(*volume_bounds(d, CurvatureBand(-eps, 1.5)).v_lower - v0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-5 * v0);
}

TEST_CASE("equal orders and equal band give the football volume", "[core]") {
  for (double al : {0.0, -0.3, -0.6})
    for (double a : {0.5, 1.0, 2.0}) {
      const auto r = volume_bounds(D({al, al}), CurvatureBand(a, a));
      CHECK(rel(*r.v_lower, 2 * kPi * (2 + 2 * al) / a) < 1e-12);
      CHECK(rel(*r.v_upper, 2 * kPi * (2 + 2 * al) / a) < 1e-12);
    }
}
