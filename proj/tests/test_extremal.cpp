#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "conicvol/error.hpp"
#include "conicvol/export.hpp"
#include "conicvol/extremal.hpp"
#include "conicvol/verify.hpp"

using namespace conicvol;
using namespace conicvol::extremal;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;
Divisor D(std::vector<double> orders) { return Divisor::from_orders(orders); }

double football_quadrature(double alpha, double b, double r) {
  boost::math::quadrature::tanh_sinh<double> q;
  auto f = [&](double rho) {
    const double p = 2 + 2 * alpha;
    return 2 * kPi * (1 / b) * p * p * std::pow(rho, 1 + 2 * alpha) / std::pow(1 + std::pow(rho, p), 2);
  };
  return q.integrate(f, 0.0, r, 1e-13);
}

struct Case {
  ModelKind kind;
  std::vector<double> orders;
  double a, b;
};

// Twenty band and divisor combinations covering every model kind.
std::vector<Case> lattice() {
  std::vector<Case> out;
  for (const auto& o : std::vector<std::vector<double>>{{-0.5}, {-0.3, -0.2}, {-0.6, -0.1}, {-0.45, -0.3, -0.1}}) {
    const Divisor d = D(o);
    const double limit = std::pow((1 + d.beta()) / (1 + d.alpha()), 2);
    out.push_back({ModelKind::Vab, o, -1.5, 0.8});
    out.push_back({ModelKind::V0b, o, 0.0, 2.0});
    out.push_back({ModelKind::MinVol, o, -1.0, 1.0});
    out.push_back({ModelKind::Vmin, o, 0.6 * limit * 1.3, 1.3});
    out.push_back({ModelKind::Vmax, o, 0.3 * limit, 1.0});
  }
  return out;
}
}  // namespace

TEST_CASE("football mass closed form against quadrature", "[extremal]") {
  CHECK(football_mass(0.0, 1.0, 0.0) == 0.0);
  CHECK_THAT(football_mass(0.0, 1.0, 1e12), WithinRel(4 * kPi, 1e-12));
  CHECK_THAT(football_mass(-0.5, 1.0, 1.0), WithinRel(kPi, 1e-14));
  CHECK_THAT(football_quadrature(-0.5, 1.0, 1.0), WithinRel(kPi, 1e-9));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> al(-0.9, 0.0), bb(0.1, 4.0), rr(0.01, 20.0);
  for (int k = 0; k < 50; ++k) {
    const double alpha = al(rng), b = bb(rng), r = rr(rng);
    CHECK_THAT(football_mass(alpha, b, r), WithinRel(football_quadrature(alpha, b, r), 1e-9));
  }
}

TEST_CASE("gluing radius examples", "[extremal]") {
  SECTION("pinching equality gives r = 1") {
    const Divisor d = D({-0.5});
    const CurvatureBand band(0.25, 1.0);
    for (auto kind : {ModelKind::Vmin, ModelKind::Vmax}) {
      const double V = target_volume(kind, d, band);
      CHECK_THAT(glue_radius(d, band, V, kind), WithinAbs(1.0, 1e-10));
    }
  }
  SECTION("equal orders") {
    const Divisor d = D({-0.4, -0.4});
    CHECK(std::isinf(glue_radius(d, CurvatureBand(-1, 1), target_volume(ModelKind::Vab, d, CurvatureBand(-1, 1)),
                                 ModelKind::Vab)));
    CHECK(std::isinf(glue_radius(d, CurvatureBand(0.5, 1), target_volume(ModelKind::Vmin, d, CurvatureBand(0.5, 1)),
                                 ModelKind::Vmin)));
    CHECK(glue_radius(d, CurvatureBand(0.5, 1), target_volume(ModelKind::Vmax, d, CurvatureBand(0.5, 1)),
                      ModelKind::Vmax) == 0.0);
  }
  SECTION("flat case inverts in closed form") {
    const Divisor d = D({-0.5});
    const double r = glue_radius(d, CurvatureBand(0, 1), 4.5 * kPi, ModelKind::V0b);
    CHECK_THAT(r, WithinRel(std::sqrt(3.0), 1e-12));
    CHECK_THAT(football_quadrature(0.0, 1.0, r), WithinRel(3 * kPi, 1e-9));
  }
  SECTION("infeasible mass") {
    const Divisor d = D({-0.5});
    CHECK_THROWS_AS(glue_radius(d, CurvatureBand(0.25, 1), 100.0, ModelKind::Vmin), Infeasible);
    CHECK_THROWS_AS(glue_radius(d, CurvatureBand(-1, 1), 1.0, ModelKind::Vab), Infeasible);
  }
}

TEST_CASE("gluing radius: bisection agrees with the closed form", "[extremal]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> order(-0.9, 0.0), unit(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    const Divisor d = D({order(rng), order(rng), order(rng)});
    if (!d.satisfies_volume_hypotheses() || d.alpha() - d.beta() < 1e-6) continue;
    const double b = 0.3 + 2 * unit(rng);
    const double limit = std::pow((1 + d.beta()) / (1 + d.alpha()), 2);
    const Case cases[] = {{ModelKind::Vab, {}, -0.1 - 2 * unit(rng), b},
                          {ModelKind::V0b, {}, 0.0, b},
                          {ModelKind::Vmin, {}, b * limit * (0.05 + 0.9 * unit(rng)), b},
                          {ModelKind::Vmax, {}, b * limit * (0.05 + 0.9 * unit(rng)), b}};
    for (const auto& c : cases) {
      const CurvatureBand band(c.a, c.b);
      const double V = target_volume(c.kind, d, band);
      const double r = glue_radius(d, band, V, c.kind);
      const double closed = glue_radius_closed_form(d.alpha(), b, glue_mass(c.kind, weighted_euler(d), c.a, b, V));
      CHECK_THAT(r, WithinRel(closed, 1e-10));
      if (c.kind == ModelKind::Vab) CHECK(r > 1.0);
      ++checked;
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("build_extremal examples", "[extremal]") {
  SECTION("round sphere") {
    const auto m = build_extremal(ModelKind::Vmin, Divisor{}, CurvatureBand(1, 1));
    for (double rho : {1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3}) {
      const double expected = 4 / std::pow(1 + rho * rho, 2);
      CHECK_THAT(m.e2u(rho), WithinRel(expected, 1e-10));
    }
  }
  SECTION("teardrop minimal volume") {
    const auto m = build_extremal(ModelKind::MinVol, D({-0.5}), CurvatureBand(-1, 1));
    const auto v = geometry::volume(m.profile());
    CHECK_THAT(v.value, WithinRel(min_vol(D({-0.5})), 1e-8));
    CHECK_THAT(v.value, WithinAbs(13.0766, 1e-3));
  }
  SECTION("Vmin and Vmax coincide at pinching equality") {
    const auto lo = build_extremal(ModelKind::Vmin, D({-0.5}), CurvatureBand(0.25, 1));
    const auto hi = build_extremal(ModelKind::Vmax, D({-0.5}), CurvatureBand(0.25, 1));
    CHECK_THAT(lo.glue_radius, WithinAbs(1.0, 1e-10));
    CHECK_THAT(hi.glue_radius, WithinAbs(1.0, 1e-10));
    for (double rho : {0.01, 0.3, 0.99, 1.01, 4.0, 100.0}) CHECK_THAT(lo.e2u(rho), WithinRel(hi.e2u(rho), 1e-9));
  }
  SECTION("kind and band sign must agree") {
    CHECK_THROWS_AS(build_extremal(ModelKind::Vab, D({-0.5}), CurvatureBand(0, 1)), InvalidInput);
    CHECK_THROWS_AS(build_extremal(ModelKind::V0b, D({-0.5}), CurvatureBand(-1, 1)), InvalidInput);
    CHECK_THROWS_AS(build_extremal(ModelKind::Vmin, D({-0.5}), CurvatureBand(-1, 1)), InvalidInput);
    CHECK_THROWS_AS(build_extremal(ModelKind::Vmin, D({-0.5}), CurvatureBand(0.3, 1)), Infeasible);
    CHECK_THROWS_AS(parse_model_kind("Vxy"), InvalidInput);
  }
}

TEST_CASE("C^{1,1} matching", "[extremal]") {
  const auto m = build_extremal(ModelKind::Vab, D({-0.5}), CurvatureBand(-1, 1));
  const auto reg = check_c11(m);
  CHECK(reg.pass);
  CHECK(reg.value_jump < 1e-8);
  CHECK(reg.slope_jump < 1e-8);
  CHECK_THAT(reg.curvature_jump, WithinAbs(2.0, 1e-6));
  const auto single = check_c11(build_extremal(ModelKind::Vab, D({-0.4, -0.4}), CurvatureBand(-1, 1)));
  CHECK(single.single_piece);
  CHECK(single.pass);
}

TEST_CASE("every lattice model satisfies the extremal invariants", "[extremal]") {
  for (const auto& c : lattice()) {
    INFO("kind " << to_string(c.kind) << " a " << c.a << " b " << c.b);
    const auto m = build_extremal(c.kind, D(c.orders), CurvatureBand(c.a, c.b));
    const auto v = verify_model(m);
    CHECK(v.pass_regularity);
    CHECK(v.gauss_bonnet_error < 1e-7);
    CHECK(v.volume_error < 1e-8);
    CHECK(v.band_violation < 1e-6);
    CHECK(v.finite_difference_error < 1e-6);
    CHECK(v.pass_cone_orders);
    // Cone orders from the far windows rho in [1e-8, 1e-6] and [1e6, 1e8].
    const auto p = m.profile();
    CHECK_THAT(geometry::fitted_slope(p, std::log(1e-8), std::log(1e-6)), WithinAbs(m.alpha, 1e-4));
    CHECK_THAT(geometry::fitted_slope(p, std::log(1e6), std::log(1e8)), WithinAbs(-(m.beta + 2), 1e-4));
    if (!m.single_piece())
      CHECK_THAT(check_c11(m).curvature_jump, WithinAbs(std::abs(m.b - m.a), 1e-6));
  }
}

TEST_CASE("metric JSON round trip and profile CSV", "[extremal]") {
  const auto m = build_extremal(ModelKind::Vmax, D({-0.5, -0.2}), CurvatureBand(0.3, 1));
  const auto doc = io::to_json(m);
  CHECK(doc.at("kind") == "Vmax");
  CHECK(doc.at("inner").at("kind") == "football_cap");
  const auto back = io::metric_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.glue_radius == m.glue_radius);
  CHECK(back.e2u(2.0) == m.e2u(2.0));
  auto bad = doc;
  bad["glue_radius"] = 2 * m.glue_radius;
  CHECK_THROWS_AS(io::metric_from_json(bad), InvalidInput);

  std::ostringstream csv;
  io::write_profile_csv(csv, io::sample_profile(m, -2, 2, 5));
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "rho,u,e2u,K");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}
