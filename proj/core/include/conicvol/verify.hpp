#pragma once

#include "conicvol/extremal.hpp"
#include "conicvol/radial.hpp"

// Aggregated invariant checks for an assembled extremal metric: C^{1,1}
// matching, total curvature, volume, curvature band and cone orders.
namespace conicvol::extremal {

struct VerifyTolerances {
  double gauss_bonnet = 1e-7;    // relative
  double volume = 1e-8;          // relative
  double curvature = 1e-6;       // absolute, closed form and finite differences
  double cone_order = 1e-4;      // absolute
  int samples = 1000;            // log-spaced sample radii
};

struct ModelVerification {
  RegularityReport regularity;
  geometry::Integral gauss_bonnet;
  double expected_gauss_bonnet = 0.0;
  double gauss_bonnet_error = 0.0;  // relative
  geometry::Integral volume;
  double expected_volume = 0.0;
  double volume_error = 0.0;  // relative
  // Closed-form curvature over xi in [-20, 20].
  double curvature_min = 0.0;
  double curvature_max = 0.0;
  double band_violation = 0.0;
  // Finite-difference curvature against each piece's constant, over
  // xi in [ln r - 4, ln r + 4] away from a 1e-3 relative neighbourhood of r.
  double finite_difference_error = 0.0;
  geometry::ConeOrderEstimate cone_origin;
  geometry::ConeOrderEstimate cone_infinity;
  bool pass_regularity = false;
  bool pass_gauss_bonnet = false;
  bool pass_volume = false;
  bool pass_band = false;
  bool pass_finite_difference = false;
  bool pass_cone_orders = false;
  bool pass() const noexcept {
    return pass_regularity && pass_gauss_bonnet && pass_volume && pass_band && pass_finite_difference &&
           pass_cone_orders;
  }
};

/// Step of the Richardson second difference used by the finite-difference
/// curvature check.
inline constexpr double kVerifyStep = 1e-2;

ModelVerification verify_model(const PiecewiseRadialMetric& metric, const VerifyTolerances& tol = {});

}  // namespace conicvol::extremal
