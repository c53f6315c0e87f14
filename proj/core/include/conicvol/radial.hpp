#pragma once

#include <functional>
#include <span>
#include <vector>

// Numerical differential geometry of rotationally symmetric conformal
// factors e^{2u} |dz|^2, written in the log-radius chart xi = ln |z|.
//
// In that chart the metric is e^{2w}(dxi^2 + dtheta^2) with w = u + xi, so
//   K      = -u''(xi) e^{-2w},
//   dA     = e^{2w} dxi dtheta,
// and a cone of order alpha at the origin (beta at infinity) makes w affine
// with slope 1 + alpha (resp. -(1 + beta)) at the corresponding end.
namespace conicvol::geometry {

class RadialProfile {
 public:
  using Fn = std::function<double(double)>;

  // Step for the centred second difference when no closed-form derivative is
  // supplied; one Richardson level halves it.
  static constexpr double kFiniteDifferenceStep = 1e-3;

  explicit RadialProfile(Fn u, Fn du = {}, Fn d2u = {}, std::vector<double> breakpoints = {});

  double u(double xi) const { return u_(xi); }
  double du(double xi) const;
  double d2u(double xi) const;

  bool has_closed_form_du() const noexcept { return static_cast<bool>(du_); }
  bool has_closed_form_d2u() const noexcept { return static_cast<bool>(d2u_); }

  // Points in xi where u'' may jump; quadrature panels split there.
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }

  // The same profile with derivatives forced through finite differences.
  RadialProfile finite_difference_only() const;

 private:
  Fn u_;
  Fn du_;
  Fn d2u_;
  std::vector<double> breakpoints_;
};

/// Second derivative of u by centred differences at step h and h/2 combined
/// with one Richardson level.
double richardson_second_derivative(const RadialProfile::Fn& u, double xi, double h);

/// Gaussian curvature at log-radius xi.
double curvature(const RadialProfile& profile, double xi);

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

struct Window {
  double xi_min = -40.0;
  double xi_max = 40.0;
  // Close the integral over (-inf, xi_min] and [xi_max, inf) with the affine
  // cone asymptotics of w.
  bool complete_tails = true;
};

/// Volume 2 pi \int e^{2w} dxi. Throws NonIntegrable-style InvalidInput when a
/// tail is requested but the asymptotic slope does not decay.
Integral volume(const RadialProfile& profile, const Window& window = {});

/// Total curvature 2 pi \int K e^{2w} dxi; equals 2 pi (2 + alpha + beta) for
/// a sphere with cone orders alpha at 0 and beta at infinity.
Integral gauss_bonnet(const RadialProfile& profile, const Window& window = {});

enum class ConeEnd { origin, infinity };

struct ConeOrderEstimate {
  double order = 0.0;      // alpha at the origin, beta at infinity
  double slope = 0.0;      // fitted d u / d xi over the full window
  double drift = 0.0;      // |slope(first half) - slope(second half)|
  bool converged = false;  // drift <= kConeDriftTolerance
};

inline constexpr double kConeDriftTolerance = 1e-3;

/// Least-squares slope of u over xi in [-20, -14] (origin) or [14, 20]
/// (infinity). At infinity u ~ -(beta + 2) xi, converted back to beta.
ConeOrderEstimate cone_order(const RadialProfile& profile, ConeEnd end);

/// Least-squares slope of u over [lo, hi] sampled at `samples` points.
double fitted_slope(const RadialProfile& profile, double lo, double hi, int samples = 61);

}  // namespace conicvol::geometry
