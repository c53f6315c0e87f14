#include "conicvol/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conicvol::extremal {

ModelVerification verify_model(const PiecewiseRadialMetric& metric, const VerifyTolerances& tol) {
  ModelVerification v;
  v.regularity = check_c11(metric);
  v.pass_regularity = v.regularity.pass;

  const auto profile = metric.profile();
  v.gauss_bonnet = geometry::gauss_bonnet(profile);
  v.expected_gauss_bonnet = 2.0 * std::numbers::pi * (2.0 + metric.alpha + metric.beta);
  v.gauss_bonnet_error = std::abs(v.gauss_bonnet.value - v.expected_gauss_bonnet) / v.expected_gauss_bonnet;
  v.pass_gauss_bonnet = v.gauss_bonnet_error <= tol.gauss_bonnet;

  v.volume = geometry::volume(profile);
  v.expected_volume = metric.target_volume;
  v.volume_error = std::abs(v.volume.value - v.expected_volume) / v.expected_volume;
  v.pass_volume = v.volume_error <= tol.volume;

  const int n = std::max(tol.samples, 2);
  v.curvature_min = INFINITY;
  v.curvature_max = -INFINITY;
  for (int k = 0; k < n; ++k) {
    const double xi = -20.0 + 40.0 * k / (n - 1);
    const double K = metric.curvature(std::exp(xi));
    v.curvature_min = std::min(v.curvature_min, K);
    v.curvature_max = std::max(v.curvature_max, K);
  }
  v.band_violation = std::max({0.0, metric.a - v.curvature_min, v.curvature_max - metric.b});
  v.pass_band = v.band_violation <= tol.curvature;

  const bool glued = !metric.single_piece();
  const double xi_r = glued ? std::log(metric.glue_radius) : 0.0;
  const auto u = [&metric](double xi) { return metric.u(xi); };
  for (int k = 0; k < n; ++k) {
    const double xi = xi_r - 4.0 + 8.0 * k / (n - 1);
    // Keep the whole difference stencil on one side of the gluing circle.
    if (glued && std::abs(xi - xi_r) < std::max(1e-3, 1.5 * kVerifyStep)) continue;
    const double d2u = geometry::richardson_second_derivative(u, xi, kVerifyStep);
    const double K_fd = -d2u * std::exp(-2.0 * (metric.u(xi) + xi));
    const double K_piece = metric.piece_at(xi).curvature;
    v.finite_difference_error = std::max(v.finite_difference_error, std::abs(K_fd - K_piece));
  }
  v.pass_finite_difference = v.finite_difference_error <= tol.curvature;

  v.cone_origin = geometry::cone_order(profile, geometry::ConeEnd::origin);
  v.cone_infinity = geometry::cone_order(profile, geometry::ConeEnd::infinity);
  v.pass_cone_orders = std::abs(v.cone_origin.order - metric.alpha) <= tol.cone_order &&
                       std::abs(v.cone_infinity.order - metric.beta) <= tol.cone_order;
  return v;
}

}  // namespace conicvol::extremal
