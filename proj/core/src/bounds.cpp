#include "conicvol/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "conicvol/error.hpp"

namespace conicvol {

namespace {

constexpr double kPi = std::numbers::pi;

double euler_of(double alpha, double beta) { return 2.0 * kPi * (2.0 + alpha + beta); }

void require_admissible(const Divisor& divisor) {
  if (divisor.classify() == Criticality::subcritical) {
    throw InvalidInput("subcritical divisor: volume bounds require a critical or supercritical divisor");
  }
}

}  // namespace

CurvatureBand::CurvatureBand(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidInput("curvature bounds must be finite");
  }
  if (b <= 0.0) {
    throw InvalidInput("upper curvature bound b must be positive, got " + std::to_string(b));
  }
  if (a > b) {
    throw InvalidInput("curvature band requires a <= b");
  }
}

std::string_view to_string(BoundsCase c) noexcept {
  switch (c) {
    case BoundsCase::a_negative:
      return "a_negative";
    case BoundsCase::a_zero:
      return "a_zero";
    case BoundsCase::a_positive:
      return "a_positive";
  }
  return "unknown";
}

double volume_flat_lower(double alpha, double beta, double b) {
  const double d = 2.0 + alpha + beta;
  return kPi * d * d / (b * (1.0 + beta));
}

double volume_constraint_discriminant(double alpha, double beta, double a, double b) {
  const double pa = 1.0 + alpha;
  const double pb = 1.0 + beta;
  return (b - a) * (b * pb * pb - a * pa * pa);
}

double volume_lower(double alpha, double beta, double a, double b) {
  // (beta+1)/a - root/(ab) rationalized, so a -> 0 does not cancel.
  const double root = std::sqrt(volume_constraint_discriminant(alpha, beta, a, b));
  const double p = alpha + 1.0, q = beta + 1.0;
  return 2.0 * kPi * (p / b + (b * (p * p + q * q) - a * p * p) / (b * (b * q + root)));
}

double volume_upper(double alpha, double beta, double a, double b) {
  const double root = std::sqrt(volume_constraint_discriminant(alpha, beta, a, b));
  return 2.0 * kPi * ((beta + 1.0) / a + (alpha + 1.0) / b + root / (a * b));
}

ConstraintRoots volume_constraint_roots(double alpha, double beta, double a, double b) {
  const double chi = euler_of(alpha, beta);
  const double qa = a * b;
  const double qb = -4.0 * kPi * (a * (1.0 + alpha) + b * (1.0 + beta));
  const double qc = chi * chi;

  ConstraintRoots roots;
  if (a == 0.0) {
    roots.lower = -qc / qb;
    return roots;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return roots;
  // q = -(B + sign(B) sqrt(disc)) / 2; roots are q/A and C/q.
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  const double r1 = q / qa;
  const double r2 = qc / q;
  if (a > 0.0) {
    roots.lower = std::min(r1, r2);
    roots.upper = std::max(r1, r2);
  } else {
    // Product of roots chi^2/(ab) < 0: exactly one positive root.
    roots.lower = std::max(r1, r2);
  }
  return roots;
}

BoundsReport volume_bounds(const Divisor& divisor, const CurvatureBand& band) {
  require_admissible(divisor);
  const double alpha = divisor.alpha();
  const double beta = divisor.beta();
  const double a = band.a();
  const double b = band.b();

  BoundsReport report;
  report.chi = weighted_euler(divisor);
  report.outside_hypotheses = !divisor.satisfies_volume_hypotheses();

  if (a == 0.0) {
    report.bounds_case = BoundsCase::a_zero;
    report.v_lower = volume_flat_lower(alpha, beta, b);
  } else if (a < 0.0) {
    report.bounds_case = BoundsCase::a_negative;
    report.v_lower = volume_lower(alpha, beta, a, b);
  } else {
    report.bounds_case = BoundsCase::a_positive;
    report.feasible = pinching_check(divisor, band);
    if (report.feasible) {
      report.v_lower = volume_lower(alpha, beta, a, b);
      report.v_upper = volume_upper(alpha, beta, a, b);
    }
  }
  return report;
}

double min_vol(double alpha, double beta) {
  const double pa = 1.0 + alpha;
  const double pb = 1.0 + beta;
  return 2.0 * kPi * (alpha - beta + std::sqrt(2.0 * pa * pa + 2.0 * pb * pb));
}

double min_vol(const Divisor& divisor) {
  require_admissible(divisor);
  return min_vol(divisor.alpha(), divisor.beta());
}

PinchingDetails pinching_details(const Divisor& divisor, const CurvatureBand& band) {
  if (band.a() <= 0.0) {
    throw InvalidInput("pinching condition applies only to a positive lower curvature bound");
  }
  const double pa = 1.0 + divisor.alpha();
  const double pb = 1.0 + divisor.beta();
  PinchingDetails d;
  d.ratio = band.a() / band.b();
  d.limit = (pb * pb) / (pa * pa);
  d.discriminant = volume_constraint_discriminant(divisor.alpha(), divisor.beta(), band.a(), band.b());
  // Cross-multiplied form keeps the equality case exact.
  d.feasible = band.a() * pa * pa <= band.b() * pb * pb;
  d.routes_agree = d.feasible == (d.discriminant >= 0.0);
  return d;
}

bool pinching_check(const Divisor& divisor, const CurvatureBand& band) {
  return pinching_details(divisor, band).feasible;
}

}  // namespace conicvol
