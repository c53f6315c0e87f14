#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conicvol/error.hpp"
#include "conicvol/extremal.hpp"
#include "conicvol/levelset.hpp"
#include "conicvol/radial.hpp"

using namespace conicvol;
using namespace conicvol::levelset;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;

double round_u(double x, double y) { return std::log(2.0 / (1.0 + x * x + y * y)); }

GriddedMetric round_grid(int n) {
  return sample_grid({20.0, n}, round_u, [](double, double) { return 1.0; }, {}, 0.0, 0.0);
}

extremal::PiecewiseRadialMetric model(extremal::ModelKind kind, std::vector<double> orders, double a, double b) {
  return extremal::build_extremal(kind, Divisor::from_orders(orders), CurvatureBand(a, b));
}

void check_monotone(const LevelSetSummary& s) {
  for (std::size_t k = 1; k < s.t.size(); ++k) {
    REQUIRE(s.t[k] < s.t[k - 1]);
    REQUIRE(s.s_of_t[k] >= s.s_of_t[k - 1]);
  }
  for (std::size_t j = 1; j < s.s_uniform.size(); ++j) {
    REQUIRE(s.t_of_s[j] <= s.t_of_s[j - 1]);
    REQUIRE(s.B_of_s[j] >= s.B_of_s[j - 1]);
  }
}

// Radius where the radial u crosses t, by bisection in xi = ln rho.
double level_xi(const extremal::PiecewiseRadialMetric& m, double t) {
  double lo = -30.0, hi = std::log(20.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (m.u(mid) > t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("round sphere reproduces the identity A = s", "[levelset]") {
  const auto s = summarize(round_grid(1024));
  CHECK_THAT(s.total_volume, WithinRel(4 * kPi, 1e-4));
  for (std::size_t j = 0; j < s.s_uniform.size(); ++j) CHECK_THAT(s.A_of_s[j], WithinAbs(s.s_uniform[j], 1e-6));
  check_monotone(s);

  const auto band = slope_band_check(s, CurvatureBand(1, 1));
  CHECK(band.pass);
  CHECK(band.max_violation < 1e-8);
  CHECK(b_prime_check(s).pass);

  const auto ki = key_inequality_check(s, 0.0);
  CHECK(ki.pass);
  CHECK(std::abs(ki.defect) < 1e-6 * s.total_volume);
}

TEST_CASE("round sphere with discrete curvature stays in the band", "[levelset]") {
  const auto g = sample_grid({20.0, 1024}, round_u, {}, {}, 0.0, 0.0);
  CHECK_FALSE(g.curvature_is_analytic());
  CHECK(g.curvature_error_estimate() < 1e-3);
  const auto s = summarize(g);
  CHECK(slope_band_check(s, CurvatureBand(1, 1)).pass);
  CHECK(key_inequality_check(s, 0.0).pass);
}

TEST_CASE("flat cone has vanishing curvature integral", "[levelset]") {
  const auto g = sample_grid({4.0, 512}, [](double x, double y) { return -0.3 * std::log(std::hypot(x, y)); },
                             [](double, double) { return 0.0; }, {{0.0, 0.0, -0.3}}, -0.3, std::nullopt);
  CHECK(g.masked_area_fraction() > 0.0);
  const auto s = summarize(g);
  for (double a : s.A_of_s) CHECK(a == 0.0);
  check_monotone(s);
  const auto ki = key_inequality_check(s, -0.3);
  // Both sides equal 1 + alpha; the residual is lattice noise.
  CHECK(std::abs(ki.min_margin) < 1e-3);
  for (double r : ki.rhs) CHECK_THAT(r, WithinAbs(0.7, 1e-12));
}

TEST_CASE("Vmin model gives the piecewise-linear curvature integral", "[levelset]") {
  const double a = 0.25, b = 1.0;
  const auto m = model(extremal::ModelKind::Vmin, {-0.5}, a, b);
  const auto s = summarize(sample_radial(m, {20.0, 2048}));
  const double V = m.target_volume;
  const double chi = weighted_euler(Divisor::from_orders(std::vector{-0.5}));
  const double delta = (chi - a * V) / (b - a);
  const double ds = s.s_uniform[1] - s.s_uniform[0];
  double dev = 0.0;
  for (std::size_t j = 0; j < s.s_uniform.size(); ++j) {
    const double x = s.s_uniform[j];
    const double f = x < delta ? b * x : b * delta + a * (x - delta);
    dev = std::max(dev, std::abs(s.A_of_s[j] - f));
  }
  CHECK(dev <= (b - a) * ds / 4 + 1e-3);
  const auto band = slope_band_check(s, CurvatureBand(a, b));
  CHECK(band.pass);
  CHECK_THAT(band.min_slope, WithinAbs(a, 1e-3));
  CHECK_THAT(band.max_slope, WithinAbs(b, 1e-3));
  CHECK_THAT(s.total_curvature, WithinRel(chi, 1e-3));
  CHECK(s.A_of_s.front() == 0.0);
}

TEST_CASE("extremal grids meet the equality case", "[levelset]") {
  struct Case {
    extremal::ModelKind kind;
    std::vector<double> orders;
    double a, b;
  };
  const std::vector<Case> cases = {{extremal::ModelKind::Vmax, {-0.5}, 0.25, 1.0},
                                   {extremal::ModelKind::V0b, {-0.5}, 0.0, 1.0},
                                   {extremal::ModelKind::Vab, {-0.5, -0.3}, -1.0, 1.0}};
  for (const auto& c : cases) {
    const auto m = model(c.kind, c.orders, c.a, c.b);
    const auto g = sample_radial(m, {20.0, 1024});
    const auto s = summarize(g);
    INFO(extremal::to_string(c.kind));
    check_monotone(s);
    CHECK(slope_band_check(s, CurvatureBand(c.a, c.b)).pass);
    CHECK(b_prime_check(s).pass);
    const auto ki = key_inequality_check(s, g.alpha_eff());
    CHECK(ki.pass);
    CHECK(std::abs(ki.defect) < 1e-3 * s.total_volume);
    CHECK_THAT(s.total_curvature, WithinRel(weighted_euler(Divisor::from_orders(c.orders)), 1e-3));
    CHECK(s.tail_model_error < 1e-6 * s.total_volume);
  }
}

TEST_CASE("radial grids agree with one-dimensional quadrature", "[levelset]") {
  const auto m = model(extremal::ModelKind::Vmin, {-0.5}, 0.25, 1.0);
  const auto s = summarize(sample_radial(m, {20.0, 2048}));
  const auto p = m.profile();
  for (double frac : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    const double sv = frac * s.captured_volume;
    const double xi = level_xi(m, s.interpolate_t(sv));
    const geometry::Window in{-40.0, xi, false};
    INFO("fraction " << frac);
    CHECK_THAT(geometry::volume(p, in).value, WithinRel(sv, 5e-3));
    CHECK_THAT(kPi * std::exp(2 * xi), WithinRel(s.interpolate_B(sv), 5e-3));
    CHECK_THAT(geometry::gauss_bonnet(p, in).value, WithinRel(s.interpolate_A(sv), 5e-3));
  }
}

TEST_CASE("plateau becomes an affine jump interval", "[levelset]") {
  const double psi = std::log(2.0 / 1.25);
  const auto g = sample_grid(
      {20.0, 1024}, [&](double x, double y) { return std::min(round_u(x, y), psi); }, {}, {}, 0.0, 0.0);
  const auto s = summarize(g);
  REQUIRE(s.jump_intervals.size() == 1);
  const auto& j = s.jump_intervals.front();
  CHECK_THAT(j.t, WithinAbs(psi, 1e-12));
  CHECK(j.s_hi > j.s_lo);
  const double B0 = s.interpolate_B(j.s_lo), B1 = s.interpolate_B(j.s_hi);
  CHECK_THAT((B1 - B0) / (j.s_hi - j.s_lo), WithinRel(std::exp(-2 * psi), 1e-9));
  CHECK_THAT(s.interpolate_B(0.5 * (j.s_lo + j.s_hi)), WithinAbs(0.5 * (B0 + B1), 1e-9 * B1));
  CHECK_THAT(s.interpolate_A(j.s_hi), WithinAbs(s.interpolate_A(j.s_lo), 1e-12));
  CHECK(b_prime_check(s).pass);
}

TEST_CASE("off-centre bump keeps the inequality with slack", "[levelset]") {
  const auto m = model(extremal::ModelKind::Vmin, {}, 1.0, 1.0);
  const auto g = sample_perturbed(m, {20.0, 1024}, {Bump{0.3, 0.5, 0.7, 0.0}});
  const auto s = summarize(g);
  const auto ki = key_inequality_check(s, 0.0);
  CHECK(ki.pass);
  CHECK(ki.defect < 0.0);
  double best = -1.0;
  for (std::size_t j = 0; j < ki.lhs.size(); ++j) best = std::max(best, ki.lhs[j] - ki.rhs[j]);
  CHECK(best > ki.tolerance);
  CHECK(s.total_volume > 4 * kPi);
}

TEST_CASE("isoperimetric deficit oracles", "[levelset]") {
  const GridSpec small{4.0, 512};
  const auto zero = [](double, double) { return 0.0; };
  const auto disk = sample_grid(small, [](double x, double y) { return 1 - x * x - y * y; }, zero, {}, 0.0, std::nullopt);
  CHECK(std::abs(iso_deficit(disk, 0.0)) < 2 * kPi * disk.cell_size());

  const auto ell = sample_grid(small, [](double x, double y) { return 1 - x * x / 4 - y * y; }, zero, {}, 0.0, std::nullopt);
  const double a = 2, b = 1, hh = (a - b) * (a - b) / ((a + b) * (a + b));
  const double P = kPi * (a + b) * (1 + 3 * hh / (10 + std::sqrt(4 - 3 * hh)));
  CHECK_THAT(iso_deficit(ell, 0.0), WithinRel(P * P - 4 * kPi * kPi * a * b, 1e-2));

  const auto two = sample_grid(
      small,
      [](double x, double y) { return std::max(1 - (x - 1.5) * (x - 1.5) - y * y, 1 - (x + 1.5) * (x + 1.5) - y * y); },
      zero, {}, 0.0, std::nullopt);
  CHECK_THAT(iso_deficit(two, 0.0), WithinRel(8 * kPi * kPi, 1e-3));

  CHECK_THROWS_AS(iso_deficit(disk, 2.0), InvalidInput);
  CHECK_THROWS_AS(iso_deficit(disk, -100.0), InvalidInput);
  CHECK_THROWS_AS(iso_deficit(disk, -20.0), InvalidInput);
}

TEST_CASE("deficit refinement converges", "[levelset]") {
  const auto m = model(extremal::ModelKind::Vmin, {-0.5}, 0.25, 1.0);
  double prev = NAN;
  for (int n : {512, 1024}) {
    const auto g = sample_radial(m, {20.0, n});
    const auto s = summarize(g);
    const double d = iso_deficit(g, s.interpolate_t(0.3 * s.captured_volume));
    CHECK(d >= 0.0);
    if (!std::isnan(prev)) {
      const double ratio = d / prev;
      INFO("ratio " << ratio);
      CHECK(ratio > 0.1);
      CHECK(ratio < 0.4);
    }
    prev = d;
  }
}

TEST_CASE("mean deficit validates fractions", "[levelset]") {
  const auto g = round_grid(512);
  const auto s = summarize(g);
  const std::vector<double> fr{0.2, 0.5, 0.8};
  CHECK(mean_deficit(g, s, fr) < 0.05);
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(mean_deficit(g, s, bad), InvalidInput);
  CHECK_THROWS_AS(mean_deficit(g, s, std::vector<double>{}), InvalidInput);
}

TEST_CASE("masked area is reported", "[levelset]") {
  const auto m = model(extremal::ModelKind::Vab, {-0.5, -0.3}, -1.0, 1.0);
  const auto g = sample_radial(m, {20.0, 512});
  const double h = g.cell_size();
  const double R = g.mask_radius_cells() * h;
  CHECK_THAT(g.masked_area_fraction(), WithinRel(kPi * R * R / (40.0 * 40.0), 0.2));
  CHECK(summarize(g).masked_area_fraction == g.masked_area_fraction());
}

TEST_CASE("grid validation", "[levelset]") {
  const std::vector<double> u(16, 0.0);
  CHECK_NOTHROW(GriddedMetric({1.0, 4}, u, {}, 0.0, std::nullopt));
  CHECK_THROWS_AS(GriddedMetric({1.0, 5}, std::vector<double>(25, 0.0), {}, 0.0, std::nullopt), InvalidInput);
  CHECK_THROWS_AS(GriddedMetric({0.0, 4}, u, {}, 0.0, std::nullopt), InvalidInput);
  CHECK_THROWS_AS(GriddedMetric({1.0, 4}, std::vector<double>(15, 0.0), {}, 0.0, std::nullopt), InvalidInput);
  auto bad = u;
  bad[3] = NAN;
  CHECK_THROWS_AS(GriddedMetric({1.0, 4}, bad, {}, 0.0, std::nullopt), InvalidInput);
  CHECK_THROWS_AS(GriddedMetric({1.0, 4}, u, {}, 0.5, std::nullopt), InvalidInput);
  CHECK_THROWS_AS(GriddedMetric({1.0, 4}, u, {}, 0.0, -1.0), InvalidInput);
  CHECK_THROWS_AS(GriddedMetric({1.0, 4}, u, {{0, 0, 0.2}}, 0.0, std::nullopt), InvalidInput);
  CHECK_THROWS_AS(GriddedMetric({1.0, 4}, u, {}, 0.0, std::nullopt, std::vector<double>(3, 0.0)), InvalidInput);
  CHECK_THROWS_AS(summarize(round_grid(64), SummaryOptions{1, 256, 10}), InvalidInput);
  CHECK_THROWS_AS(sample_perturbed(model(extremal::ModelKind::Vmin, {}, 1, 1), {20.0, 64}, {Bump{1.0, 0.0}}),
                  InvalidInput);
}

TEST_CASE("discrete curvature of a paraboloid", "[levelset]") {
  // u = -(x^2 + y^2)/2 has Lap u = -2 exactly on the 5-point stencil.
  const int n = 16;
  const double h = 0.1;
  std::vector<double> u(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = (i - 7.5) * h, y = (j - 7.5) * h;
      u[j * n + i] = -(x * x + y * y) / 2;
    }
  const auto K = discrete_curvature(u, n, h);
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i) CHECK_THAT(K[j * n + i], WithinRel(2 * std::exp(-2 * u[j * n + i]), 1e-9));
  CHECK_THROWS_AS(discrete_curvature(std::vector<double>(4, 0.0), 2, h), InvalidInput);
}
