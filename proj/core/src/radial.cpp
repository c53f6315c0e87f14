#include "conicvol/radial.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "conicvol/error.hpp"

namespace conicvol::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPanelTolerance = 1e-13;
constexpr unsigned kMaxDepth = 20;
// Finite-difference curvature carries roundoff noise that adaptive refinement
// cannot remove; stop early instead of bisecting down to the noise.
constexpr unsigned kFiniteDifferenceDepth = 4;

// Panel edges: unit steps in xi plus every breakpoint inside the window.
std::vector<double> panel_edges(const RadialProfile& profile, double lo, double hi) {
  std::vector<double> edges;
  for (double x = std::ceil(lo); x < hi; x += 1.0) edges.push_back(x);
  for (double bp : profile.breakpoints()) {
    if (std::isfinite(bp) && bp > lo && bp < hi) edges.push_back(bp);
  }
  edges.push_back(lo);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double l, double r) { return std::abs(l - r) < 1e-14; }),
              edges.end());
  return edges;
}

template <class F>
Integral integrate_panels(const RadialProfile& profile, F&& f, double lo, double hi,
                          unsigned depth = kMaxDepth) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto edges = panel_edges(profile, lo, hi);
  Integral out;
  double magnitude = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    out.value += Quad::integrate(f, edges[i], edges[i + 1], depth, kPanelTolerance, &err, &l1);
    out.error += err;
    magnitude += l1;
  }
  out.error += 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
  return out;
}

struct Tail {
  double density = 0.0;  // e^{2w} at the window edge
  double slope = 0.0;    // w' at the window edge
  double value = 0.0;    // \int e^{2w} beyond the edge (without 2 pi)
  double error = 0.0;
};

// Tail of \int e^{2w} beyond `edge` assuming w affine there. `outward` is -1
// for the origin end and +1 for the infinity end.
Tail affine_tail(const RadialProfile& profile, double edge, double outward) {
  Tail t;
  const double w = profile.u(edge) + edge;
  t.density = std::exp(2.0 * w);
  t.slope = profile.du(edge) + 1.0;
  if (outward * t.slope >= 0.0) {
    throw InvalidInput("profile is not integrable: conformal factor does not decay at the " +
                       std::string(outward < 0 ? "origin" : "infinity") + " end");
  }
  t.value = t.density / (2.0 * std::abs(t.slope));
  // Drift of the slope one unit further inward bounds the non-affine part.
  const double inner_slope = profile.du(edge - outward) + 1.0;
  t.error = t.value * std::abs(inner_slope - t.slope) / std::abs(t.slope);
  return t;
}

}  // namespace

RadialProfile::RadialProfile(Fn u, Fn du, Fn d2u, std::vector<double> breakpoints)
    : u_(std::move(u)), du_(std::move(du)), d2u_(std::move(d2u)), breakpoints_(std::move(breakpoints)) {
  if (!u_) throw InvalidInput("radial profile requires an evaluable u");
}

double RadialProfile::du(double xi) const {
  if (du_) return du_(xi);
  const double h = kFiniteDifferenceStep;
  const double d1 = (u_(xi + h) - u_(xi - h)) / (2.0 * h);
  const double d2 = (u_(xi + h / 2) - u_(xi - h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

double RadialProfile::d2u(double xi) const {
  if (d2u_) return d2u_(xi);
  return richardson_second_derivative(u_, xi, kFiniteDifferenceStep);
}

RadialProfile RadialProfile::finite_difference_only() const {
  return RadialProfile(u_, {}, {}, breakpoints_);
}

double richardson_second_derivative(const RadialProfile::Fn& u, double xi, double h) {
  const double c = u(xi);
  const double coarse = (u(xi + h) - 2.0 * c + u(xi - h)) / (h * h);
  const double hh = h / 2;
  const double fine = (u(xi + hh) - 2.0 * c + u(xi - hh)) / (hh * hh);
  return (4.0 * fine - coarse) / 3.0;
}

double curvature(const RadialProfile& profile, double xi) {
  const double w = profile.u(xi) + xi;
  return -profile.d2u(xi) * std::exp(-2.0 * w);
}

Integral volume(const RadialProfile& profile, const Window& window) {
  auto density = [&](double xi) { return std::exp(2.0 * (profile.u(xi) + xi)); };
  Integral body = integrate_panels(profile, density, window.xi_min, window.xi_max);
  if (window.complete_tails) {
    const Tail lo = affine_tail(profile, window.xi_min, -1.0);
    const Tail hi = affine_tail(profile, window.xi_max, +1.0);
    body.value += lo.value + hi.value;
    body.error += lo.error + hi.error;
  }
  return {kTwoPi * body.value, kTwoPi * body.error};
}

Integral gauss_bonnet(const RadialProfile& profile, const Window& window) {
  auto density = [&](double xi) {
    return curvature(profile, xi) * std::exp(2.0 * (profile.u(xi) + xi));
  };
  const unsigned depth = profile.has_closed_form_d2u() ? kMaxDepth : kFiniteDifferenceDepth;
  Integral body = integrate_panels(profile, density, window.xi_min, window.xi_max, depth);
  if (window.complete_tails) {
    const Tail lo = affine_tail(profile, window.xi_min, -1.0);
    const Tail hi = affine_tail(profile, window.xi_max, +1.0);
    const double k_lo = curvature(profile, window.xi_min);
    const double k_hi = curvature(profile, window.xi_max);
    body.value += k_lo * lo.value + k_hi * hi.value;
    body.error += std::abs(k_lo) * lo.error + std::abs(k_hi) * hi.error;
  }
  return {kTwoPi * body.value, kTwoPi * body.error};
}

double fitted_slope(const RadialProfile& profile, double lo, double hi, int samples) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / (samples - 1);
    const double y = profile.u(x);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = samples;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConeOrderEstimate cone_order(const RadialProfile& profile, ConeEnd end) {
  const double sign = end == ConeEnd::origin ? -1.0 : 1.0;
  const double inner = 14.0 * sign;
  const double outer = 20.0 * sign;
  const double mid = 17.0 * sign;
  const auto span = [](double x, double y) { return std::pair{std::min(x, y), std::max(x, y)}; };

  const auto [flo, fhi] = span(inner, outer);
  const auto [alo, ahi] = span(inner, mid);
  const auto [blo, bhi] = span(mid, outer);

  ConeOrderEstimate est;
  est.slope = fitted_slope(profile, flo, fhi);
  est.drift = std::abs(fitted_slope(profile, alo, ahi) - fitted_slope(profile, blo, bhi));
  est.converged = est.drift <= kConeDriftTolerance;
  est.order = end == ConeEnd::origin ? est.slope : -est.slope - 2.0;
  return est;
}

}  // namespace conicvol::geometry
