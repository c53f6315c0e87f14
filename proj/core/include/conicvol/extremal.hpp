#pragma once

#include <limits>
#include <optional>
#include <string_view>

#include "conicvol/bounds.hpp"
#include "conicvol/divisor.hpp"
#include "conicvol/radial.hpp"

// Extremal metrics realizing the volume bounds: a football cap of curvature b
// with cone order alpha at the origin, glued along |z| = r to a piece of
// constant curvature a carrying the cone of order beta at infinity.
namespace conicvol::extremal {

enum class PieceKind { football_cap, hyperbolic_cap, flat_tail, inverted_football_cap };
enum class ModelKind { Vab, V0b, Vmin, Vmax, MinVol };

std::string_view to_string(PieceKind k) noexcept;
std::string_view to_string(ModelKind k) noexcept;
ModelKind parse_model_kind(std::string_view name);

/// One closed-form radial piece. The conformal factor is
///   e^{2u}(rho) = scale * g(rho / dilation) / dilation^2
/// with g one of
///   football_cap           p^2 rho^{2 alpha} / (1 + rho^p)^2,          p = 2 + 2 alpha
///   inverted_football_cap  q^2 / ((1 + rho^{-q})^2 rho^{4 + 2 beta}),  q = 2 + 2 beta
///   hyperbolic_cap         q^2 / ((1 - rho^{-q})^2 rho^{4 + 2 beta}),  rho > 1
///   flat_tail              rho^{-(4 + 2 beta)}
/// For the curved pieces scale = 1 / |curvature|.
struct RadialPiece {
  PieceKind kind = PieceKind::football_cap;
  double curvature = 1.0;
  double cone_order = 0.0;
  double scale = 1.0;
  double dilation = 1.0;
  double r_in = 0.0;
  double r_out = std::numeric_limits<double>::infinity();

  // 2u as a function of xi = ln rho.
  double log_factor(double xi) const;
  double u(double xi) const { return 0.5 * log_factor(xi); }
  double du(double xi) const;
  double d2u(double xi) const;
  double e2u(double rho) const;
};

RadialPiece make_football_cap(double curvature, double order);
RadialPiece make_inverted_football_cap(double curvature, double order);
RadialPiece make_hyperbolic_cap(double curvature, double order);
RadialPiece make_flat_tail(double order, double scale);

class PiecewiseRadialMetric {
 public:
  ModelKind kind = ModelKind::Vab;
  double alpha = 0.0;
  double beta = 0.0;
  double a = 0.0;
  double b = 1.0;
  double target_volume = 0.0;
  // +inf when only the inner piece exists, 0 when only the outer piece does.
  double glue_radius = 1.0;
  std::optional<RadialPiece> inner;
  std::optional<RadialPiece> outer;

  bool single_piece() const noexcept { return !inner || !outer; }
  const RadialPiece& piece_at(double xi) const;

  double u(double xi) const { return piece_at(xi).u(xi); }
  double du(double xi) const { return piece_at(xi).du(xi); }
  double d2u(double xi) const { return piece_at(xi).d2u(xi); }
  double e2u(double rho) const;
  // Curvature from the closed-form second derivative of the active piece.
  double curvature(double rho) const;

  geometry::RadialProfile profile() const;
};

/// Volume of the inner cap |z| <= r of the curvature-b football with order
/// alpha at the origin: (4 pi (1+alpha)/b) r^p / (1 + r^p).
double football_mass(double alpha, double b, double r);

/// Volume the model requires inside the gluing circle.
double glue_mass(ModelKind kind, double chi, double a, double b, double target_volume);

/// Closed-form inverse of football_mass.
double glue_radius_closed_form(double alpha, double b, double mass);

/// Gluing radius solving football_mass(alpha, b, r) = glue_mass(...), found by
/// bisection to 1e-12 relative on a bracket of +-10% around the closed form.
/// Returns +inf (Vab, V0b, Vmin, MinVol) or 0 (Vmax) when alpha == beta.
double glue_radius(const Divisor& divisor, const CurvatureBand& band, double target_volume,
                   ModelKind kind);

/// Extremal volume for the kind: V_{a,b}, V_{0,b}, V_min, V_max or the
/// minimal volume.
double target_volume(ModelKind kind, const Divisor& divisor, const CurvatureBand& band);

PiecewiseRadialMetric build_extremal(ModelKind kind, const Divisor& divisor,
                                     const CurvatureBand& band);

struct RegularityReport {
  bool single_piece = false;
  double value_jump = 0.0;      // relative jump of e^{2u} at r
  double slope_jump = 0.0;      // relative jump of d e^{2u} / d rho at r
  double curvature_jump = 0.0;  // |K(r-) - K(r+)|, expected |b - a|
  bool pass = true;
};

inline constexpr double kGlueTolerance = 1e-8;

RegularityReport check_c11(const PiecewiseRadialMetric& metric);

}  // namespace conicvol::extremal
