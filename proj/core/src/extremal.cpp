#include "conicvol/extremal.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "conicvol/error.hpp"

namespace conicvol::extremal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool is_degenerate(double alpha, double beta) { return std::abs(alpha - beta) <= kCriticalTolerance; }

void require_band_for(ModelKind kind, const Divisor& divisor, const CurvatureBand& band) {
  switch (kind) {
    case ModelKind::Vab:
      if (band.a() >= 0.0) throw InvalidInput("Vab model requires a < 0");
      break;
    case ModelKind::V0b:
      if (band.a() != 0.0) throw InvalidInput("V0b model requires a = 0");
      break;
    case ModelKind::Vmin:
    case ModelKind::Vmax:
      if (band.a() <= 0.0) throw InvalidInput("Vmin/Vmax models require a > 0");
      if (!pinching_check(divisor, band)) {
        throw Infeasible("pinching condition a/b <= (1+beta)^2/(1+alpha)^2 violated");
      }
      break;
    case ModelKind::MinVol:
      break;
  }
}

CurvatureBand effective_band(ModelKind kind, const CurvatureBand& band) {
  return kind == ModelKind::MinVol ? CurvatureBand(-1.0, 1.0) : band;
}

}  // namespace

std::string_view to_string(PieceKind k) noexcept {
  switch (k) {
    case PieceKind::football_cap:
      return "football_cap";
    case PieceKind::hyperbolic_cap:
      return "hyperbolic_cap";
    case PieceKind::flat_tail:
      return "flat_tail";
    case PieceKind::inverted_football_cap:
      return "inverted_football_cap";
  }
  return "unknown";
}

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::Vab:
      return "Vab";
    case ModelKind::V0b:
      return "V0b";
    case ModelKind::Vmin:
      return "Vmin";
    case ModelKind::Vmax:
      return "Vmax";
    case ModelKind::MinVol:
      return "MinVol";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::Vab, ModelKind::V0b, ModelKind::Vmin, ModelKind::Vmax, ModelKind::MinVol}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInput("unknown model kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Pieces

double RadialPiece::log_factor(double xi) const {
  const double log_dil = std::log(dilation);
  const double z = xi - log_dil;
  switch (kind) {
    case PieceKind::football_cap: {
      const double p = 2.0 + 2.0 * cone_order;
      return std::log(scale * p * p) + 2.0 * cone_order * z - 2.0 * softplus(p * z) - 2.0 * log_dil;
    }
    case PieceKind::inverted_football_cap: {
      const double q = 2.0 + 2.0 * cone_order;
      return std::log(scale * q * q) - (4.0 + 2.0 * cone_order) * z - 2.0 * softplus(-q * z) -
             2.0 * log_dil;
    }
    case PieceKind::hyperbolic_cap: {
      const double q = 2.0 + 2.0 * cone_order;
      if (z <= 0.0) return std::numeric_limits<double>::quiet_NaN();
      return std::log(scale * q * q) - (4.0 + 2.0 * cone_order) * z -
             2.0 * std::log(-std::expm1(-q * z)) - 2.0 * log_dil;
    }
    case PieceKind::flat_tail:
      return std::log(scale) - (4.0 + 2.0 * cone_order) * z - 2.0 * log_dil;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double RadialPiece::du(double xi) const {
  const double z = xi - std::log(dilation);
  switch (kind) {
    case PieceKind::football_cap: {
      const double p = 2.0 + 2.0 * cone_order;
      return cone_order - p * logistic(p * z);
    }
    case PieceKind::inverted_football_cap: {
      const double q = 2.0 + 2.0 * cone_order;
      return -(2.0 + cone_order) + q * logistic(-q * z);
    }
    case PieceKind::hyperbolic_cap: {
      const double q = 2.0 + 2.0 * cone_order;
      return -(2.0 + cone_order) - q / std::expm1(q * z);
    }
    case PieceKind::flat_tail:
      return -(2.0 + cone_order);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double RadialPiece::d2u(double xi) const {
  const double z = xi - std::log(dilation);
  switch (kind) {
    case PieceKind::football_cap: {
      const double p = 2.0 + 2.0 * cone_order;
      return -p * p * logistic(p * z) * logistic(-p * z);
    }
    case PieceKind::inverted_football_cap: {
      const double q = 2.0 + 2.0 * cone_order;
      return -q * q * logistic(q * z) * logistic(-q * z);
    }
    case PieceKind::hyperbolic_cap: {
      const double q = 2.0 + 2.0 * cone_order;
      return q * q / (std::expm1(q * z) * -std::expm1(-q * z));
    }
    case PieceKind::flat_tail:
      return 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double RadialPiece::e2u(double rho) const { return std::exp(log_factor(std::log(rho))); }

RadialPiece make_football_cap(double curvature, double order) {
  if (curvature <= 0.0) throw InvalidInput("football cap needs positive curvature");
  RadialPiece p;
  p.kind = PieceKind::football_cap;
  p.curvature = curvature;
  p.cone_order = order;
  p.scale = 1.0 / curvature;
  return p;
}

RadialPiece make_inverted_football_cap(double curvature, double order) {
  if (curvature <= 0.0) throw InvalidInput("inverted football cap needs positive curvature");
  RadialPiece p;
  p.kind = PieceKind::inverted_football_cap;
  p.curvature = curvature;
  p.cone_order = order;
  p.scale = 1.0 / curvature;
  return p;
}

RadialPiece make_hyperbolic_cap(double curvature, double order) {
  if (curvature >= 0.0) throw InvalidInput("hyperbolic cap needs negative curvature");
  RadialPiece p;
  p.kind = PieceKind::hyperbolic_cap;
  p.curvature = curvature;
  p.cone_order = order;
  p.scale = -1.0 / curvature;
  return p;
}

RadialPiece make_flat_tail(double order, double scale) {
  if (!(scale > 0.0)) throw InvalidInput("flat tail needs a positive scale");
  RadialPiece p;
  p.kind = PieceKind::flat_tail;
  p.curvature = 0.0;
  p.cone_order = order;
  p.scale = scale;
  return p;
}

// ---------------------------------------------------------------------------
// Metric

const RadialPiece& PiecewiseRadialMetric::piece_at(double xi) const {
  if (!outer) return *inner;
  if (!inner) return *outer;
  return xi <= std::log(glue_radius) ? *inner : *outer;
}

double PiecewiseRadialMetric::e2u(double rho) const {
  const double xi = std::log(rho);
  return std::exp(piece_at(xi).log_factor(xi));
}

double PiecewiseRadialMetric::curvature(double rho) const {
  const double xi = std::log(rho);
  const auto& piece = piece_at(xi);
  return -piece.d2u(xi) * std::exp(-piece.log_factor(xi) - 2.0 * xi);
}

geometry::RadialProfile PiecewiseRadialMetric::profile() const {
  std::vector<double> breaks;
  if (!single_piece()) breaks.push_back(std::log(glue_radius));
  const PiecewiseRadialMetric self = *this;
  return geometry::RadialProfile([self](double xi) { return self.u(xi); },
                                 [self](double xi) { return self.du(xi); },
                                 [self](double xi) { return self.d2u(xi); }, std::move(breaks));
}

// ---------------------------------------------------------------------------
// Gluing radius

double football_mass(double alpha, double b, double r) {
  const double cap = 4.0 * kPi * (1.0 + alpha) / b;
  if (r <= 0.0) return 0.0;
  if (std::isinf(r)) return cap;
  const double p = 2.0 + 2.0 * alpha;
  // r^p / (1 + r^p) as a logistic in ln r keeps large radii exact.
  return cap * logistic(p * std::log(r));
}

double glue_mass(ModelKind kind, double chi, double a, double b, double target_volume) {
  if (kind == ModelKind::V0b) return chi / b;
  return (chi - a * target_volume) / (b - a);
}

double glue_radius_closed_form(double alpha, double b, double mass) {
  const double p = 2.0 + 2.0 * alpha;
  const double fraction = mass * b / (4.0 * kPi * (1.0 + alpha));
  return std::pow(fraction / (1.0 - fraction), 1.0 / p);
}

double glue_radius(const Divisor& divisor, const CurvatureBand& band, double target_volume,
                   ModelKind kind) {
  const double alpha = divisor.alpha();
  const double beta = divisor.beta();
  if (is_degenerate(alpha, beta)) return kind == ModelKind::Vmax ? 0.0 : kInf;

  const CurvatureBand eff = effective_band(kind, band);
  const double mass = glue_mass(kind, weighted_euler(divisor), eff.a(), eff.b(), target_volume);
  const double cap = football_mass(alpha, eff.b(), kInf);
  if (!(mass > 0.0 && mass < cap)) {
    throw Infeasible("gluing mass " + std::to_string(mass) + " outside (0, " + std::to_string(cap) +
                     "): inconsistent divisor, band and volume");
  }

  const double guess = glue_radius_closed_form(alpha, eff.b(), mass);
  auto f = [&](double r) { return football_mass(alpha, eff.b(), r) - mass; };
  auto done = [](double lo, double hi) { return hi - lo <= 1e-12 * lo; };
  double lo = 0.9 * guess;
  double hi = 1.1 * guess;
  // The closed form sits inside the bracket; widen only if rounding put it on an edge.
  while (f(lo) > 0.0) lo *= 0.5;
  while (f(hi) < 0.0) hi *= 2.0;
  const auto [left, right] = boost::math::tools::bisect(f, lo, hi, done);
  const double r = 0.5 * (left + right);

  const bool hyperbolic_outer = kind == ModelKind::Vab || kind == ModelKind::MinVol;
  if (hyperbolic_outer && r <= 1.0) {
    throw Infeasible("gluing radius " + std::to_string(r) +
                     " <= 1: hyperbolic outer piece is not defined there");
  }
  return r;
}

double target_volume(ModelKind kind, const Divisor& divisor, const CurvatureBand& band) {
  const double alpha = divisor.alpha();
  const double beta = divisor.beta();
  switch (kind) {
    case ModelKind::Vab:
      return volume_lower(alpha, beta, band.a(), band.b());
    case ModelKind::V0b:
      return volume_flat_lower(alpha, beta, band.b());
    case ModelKind::Vmin:
      return volume_lower(alpha, beta, band.a(), band.b());
    case ModelKind::Vmax:
      return volume_upper(alpha, beta, band.a(), band.b());
    case ModelKind::MinVol:
      return min_vol(alpha, beta);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// Fix the outer piece's dilation so that its log-radius slope of w = u + xi
// equals `slope` at xi_r. In the undilated chart w_f depends on zeta alone and
// dilation shifts zeta = xi - ln(lambda), so this picks zeta* and sets
// lambda = exp(xi_r - zeta*). Value continuity is then a consequence that
// check_c11 verifies.
void place_outer(RadialPiece& outer, double xi_r, double slope) {
  const double beta = outer.cone_order;
  const double q = 2.0 + 2.0 * beta;
  double zeta = 0.0;
  switch (outer.kind) {
    case PieceKind::hyperbolic_cap: {
      // w_f' = -(1+beta) - q / expm1(q zeta), ranging over (-inf, -(1+beta)).
      const double excess = -(1.0 + beta) - slope;
      if (!(excess > 0.0)) {
        throw Infeasible("glue slope does not reach the hyperbolic chart");
      }
      zeta = std::log1p(q / excess) / q;
      break;
    }
    case PieceKind::inverted_football_cap: {
      // w_f' = (1+beta)(1 - y)/(1 + y) with y = e^{q zeta}.
      const double m = 1.0 + beta;
      if (!(std::abs(slope) < m)) {
        throw Infeasible("glue slope outside the range of the inverted football");
      }
      zeta = std::log((m - slope) / (m + slope)) / q;
      break;
    }
    default:
      throw ToleranceFailure("place_outer called for a piece without dilation freedom");
  }
  outer.dilation = std::exp(xi_r - zeta);
}

}  // namespace

PiecewiseRadialMetric build_extremal(ModelKind kind, const Divisor& divisor,
                                     const CurvatureBand& band) {
  if (divisor.classify() == Criticality::subcritical) {
    throw InvalidInput("extremal models require a critical or supercritical divisor");
  }
  require_band_for(kind, divisor, band);
  const CurvatureBand eff = effective_band(kind, band);

  PiecewiseRadialMetric m;
  m.kind = kind;
  m.alpha = divisor.alpha();
  m.beta = divisor.beta();
  m.a = eff.a();
  m.b = eff.b();
  m.target_volume = target_volume(kind, divisor, eff);
  m.glue_radius = glue_radius(divisor, eff, m.target_volume, kind);

  if (m.glue_radius == 0.0) {
    // Degenerate Vmax: a single football of curvature a.
    RadialPiece outer = make_inverted_football_cap(m.a, m.beta);
    outer.r_in = 0.0;
    m.outer = outer;
    return m;
  }

  RadialPiece inner = make_football_cap(m.b, m.alpha);
  inner.r_out = m.glue_radius;
  m.inner = inner;
  if (std::isinf(m.glue_radius)) return m;

  const double xi_r = std::log(m.glue_radius);
  RadialPiece outer;
  switch (kind) {
    case ModelKind::Vab:
    case ModelKind::MinVol:
      outer = make_hyperbolic_cap(m.a, m.beta);
      place_outer(outer, xi_r, inner.du(xi_r) + 1.0);
      break;
    case ModelKind::Vmin:
    case ModelKind::Vmax:
      outer = make_inverted_football_cap(m.a, m.beta);
      place_outer(outer, xi_r, inner.du(xi_r) + 1.0);
      break;
    case ModelKind::V0b: {
      // rho^{-(4+2 beta)} has no curvature to preserve, so a plain scale
      // matches e^{2u} at r.
      const double log_scale = inner.log_factor(xi_r) + (4.0 + 2.0 * m.beta) * xi_r;
      outer = make_flat_tail(m.beta, std::exp(log_scale));
      break;
    }
  }
  outer.r_in = m.glue_radius;
  m.outer = outer;

  const auto reg = check_c11(m);
  if (!reg.pass) {
    throw ToleranceFailure("glued metric fails C^{1,1} matching at r = " + std::to_string(m.glue_radius) +
                           " (value jump " + std::to_string(reg.value_jump) + ", slope jump " +
                           std::to_string(reg.slope_jump) + ")");
  }
  return m;
}

RegularityReport check_c11(const PiecewiseRadialMetric& metric) {
  RegularityReport rep;
  if (metric.single_piece()) {
    rep.single_piece = true;
    return rep;
  }
  const double xi = std::log(metric.glue_radius);
  const auto& in = *metric.inner;
  const auto& out = *metric.outer;

  const double v_in = std::exp(in.log_factor(xi));
  const double v_out = std::exp(out.log_factor(xi));
  rep.value_jump = std::abs(v_in - v_out) / std::max(v_in, v_out);

  // d e^{2u}/d rho = 2 u'(xi) e^{2u} / rho; the common 2/rho cancels.
  const double s_in = in.du(xi) * v_in;
  const double s_out = out.du(xi) * v_out;
  const double s_scale = std::max(std::abs(s_in), std::abs(s_out));
  rep.slope_jump = s_scale > 0.0 ? std::abs(s_in - s_out) / s_scale : 0.0;

  const double k_in = -in.d2u(xi) * std::exp(-in.log_factor(xi) - 2.0 * xi);
  const double k_out = -out.d2u(xi) * std::exp(-out.log_factor(xi) - 2.0 * xi);
  rep.curvature_jump = std::abs(k_in - k_out);

  rep.pass = rep.value_jump < kGlueTolerance && rep.slope_jump < kGlueTolerance;
  return rep;
}

}  // namespace conicvol::extremal
