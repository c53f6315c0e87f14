#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "conicvol/extremal.hpp"
#include "conicvol/radial.hpp"

using namespace conicvol;
using namespace conicvol::geometry;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;

RadialProfile piece_profile(const extremal::RadialPiece& p, bool closed_form = true) {
  if (!closed_form) return RadialProfile([p](double xi) { return p.u(xi); });
  return RadialProfile([p](double xi) { return p.u(xi); }, [p](double xi) { return p.du(xi); },
                       [p](double xi) { return p.d2u(xi); });
}

RadialProfile round_sphere() {
  return RadialProfile([](double xi) { return std::log(2.0) - std::log1p(std::exp(2 * xi)); });
}
}  // namespace

TEST_CASE("curvature of model pieces", "[geometry]") {
  const RadialProfile flat([](double xi) { return -1.5 * xi + 0.3; });
  CHECK_THAT(curvature(flat, 0.7), WithinAbs(0.0, 1e-8));

  const auto football = extremal::make_football_cap(2.0, -0.3);
  for (double xi : {-3.0, -0.5, 0.0, 1.0, 3.0}) {
    CHECK_THAT(curvature(piece_profile(football), xi), WithinRel(2.0, 1e-12));
    CHECK_THAT(curvature(piece_profile(football, false), xi), WithinAbs(2.0, 1e-6));
  }

  const auto hyperbolic = extremal::make_hyperbolic_cap(-0.7, -0.4);
  for (double xi : {0.2, 1.0, 3.0}) {
    CHECK_THAT(curvature(piece_profile(hyperbolic), xi), WithinRel(-0.7, 1e-12));
    const auto u = [&](double x) { return hyperbolic.u(x); };
    for (double h : {3e-3, 1e-3}) {
      const double d2 = richardson_second_derivative(u, xi, h);
      CHECK_THAT(-d2 * std::exp(-2 * (hyperbolic.u(xi) + xi)), WithinAbs(-0.7, 1e-6));
    }
  }
}

TEST_CASE("finite-difference curvature matches the closed form on all pieces", "[geometry]") {
  const extremal::RadialPiece pieces[] = {
      extremal::make_football_cap(1.0, 0.0), extremal::make_football_cap(3.0, -0.6),
      extremal::make_inverted_football_cap(0.4, -0.5), extremal::make_hyperbolic_cap(-1.0, -0.5),
      extremal::make_flat_tail(-0.5, 2.0)};
  for (const auto& p : pieces) {
    const double lo = p.kind == extremal::PieceKind::hyperbolic_cap ? 0.1 : -3.0;
    for (double xi = lo; xi <= 3.0; xi += 0.25) {
      INFO("piece " << extremal::to_string(p.kind) << " xi " << xi);
      CHECK_THAT(curvature(piece_profile(p, false), xi), WithinAbs(curvature(piece_profile(p), xi), 1e-6));
    }
  }
}

TEST_CASE("volume", "[geometry]") {
  CHECK_THAT(volume(round_sphere()).value, WithinRel(4 * kPi, 1e-10));
  for (double alpha : {0.0, -0.5, -0.8})
    for (double b : {0.5, 1.0, 3.0}) {
      const auto fb = extremal::make_football_cap(b, alpha);
      CHECK_THAT(volume(piece_profile(fb)).value, WithinRel(4 * kPi * (1 + alpha) / b, 1e-9));
    }
  const auto m = extremal::build_extremal(extremal::ModelKind::MinVol, Divisor::from_orders(std::vector{-0.5}),
                                          CurvatureBand(-1, 1));
  CHECK_THAT(volume(m.profile()).value, WithinRel(kPi * (1 + std::sqrt(10.0)), 1e-9));
}

TEST_CASE("quadrature error estimate bounds the error on football caps", "[geometry]") {
  for (double alpha : {0.0, -0.5})
    for (double r : {0.5, 1.0, 3.0}) {
      const auto fb = extremal::make_football_cap(1.0, alpha);
      Window w{-40.0, std::log(r), false};
      const auto v = volume(piece_profile(fb), w);
      // The window misses the cap below e^{-40}; it is far below the estimate.
      const double exact = extremal::football_mass(alpha, 1.0, r);
      CHECK(std::abs(v.value - exact) <= v.error + 1e-13 * exact);
    }
}

TEST_CASE("non-integrable tails are rejected", "[geometry]") {
  // u ~ -0.5 xi at infinity: e^{2w} ~ e^{xi} grows.
  const RadialProfile bad([](double xi) { return -0.5 * xi; });
  CHECK_THROWS(volume(bad));
}

TEST_CASE("Gauss-Bonnet", "[geometry]") {
  CHECK_THAT(gauss_bonnet(round_sphere()).value, WithinRel(4 * kPi, 1e-8));
  const auto fb = extremal::make_football_cap(1.0, -0.5);
  CHECK_THAT(gauss_bonnet(piece_profile(fb)).value, WithinRel(2 * kPi, 1e-9));
  for (auto kind : {extremal::ModelKind::Vab, extremal::ModelKind::V0b, extremal::ModelKind::MinVol}) {
    const double a = kind == extremal::ModelKind::V0b ? 0.0 : -1.0;
    const auto m = extremal::build_extremal(kind, Divisor::from_orders(std::vector{-0.5}), CurvatureBand(a, 1));
    CHECK_THAT(gauss_bonnet(m.profile()).value, WithinRel(3 * kPi, 1e-7));
  }
}

TEST_CASE("cone order estimates", "[geometry]") {
  const auto tail = extremal::make_flat_tail(-0.5, 1.0);
  const auto t = cone_order(piece_profile(tail), ConeEnd::infinity);
  CHECK_THAT(t.order, WithinAbs(-0.5, 1e-4));
  CHECK(t.converged);
  const auto fb = extremal::make_football_cap(1.0, -0.5);
  CHECK_THAT(cone_order(piece_profile(fb), ConeEnd::origin).order, WithinAbs(-0.5, 1e-4));
  CHECK_THAT(cone_order(round_sphere(), ConeEnd::origin).order, WithinAbs(0.0, 1e-4));
  CHECK_THAT(cone_order(round_sphere(), ConeEnd::infinity).order, WithinAbs(0.0, 1e-4));
  // A profile whose slope keeps drifting is flagged.
  const RadialProfile drifting([](double xi) { return -2.0 * xi - 0.01 * xi * xi; });
  CHECK_FALSE(cone_order(drifting, ConeEnd::infinity).converged);
}
