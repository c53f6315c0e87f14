#pragma once

#include <optional>
#include <string_view>

#include "conicvol/divisor.hpp"

namespace conicvol {

/// Lower and upper Gaussian curvature bounds a <= K <= b. Construction
/// enforces a <= b and b > 0 (positive total curvature forces a positive
/// supremum).
class CurvatureBand {
 public:
  CurvatureBand(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

 private:
  double a_;
  double b_;
};

enum class BoundsCase { a_negative, a_zero, a_positive };

std::string_view to_string(BoundsCase c) noexcept;

struct BoundsReport {
  BoundsCase bounds_case = BoundsCase::a_zero;
  // Absent only when a > 0 and the pinching condition fails.
  std::optional<double> v_lower;
  // Present only when a > 0 and the pinching condition holds.
  std::optional<double> v_upper;
  double chi = 0.0;
  bool feasible = true;
  // Set for critical divisors with fewer than three points (alpha == beta);
  // values are the constant-curvature football limit.
  bool outside_hypotheses = false;
};

// Closed-form extremal volumes in terms of alpha = |D| - min b_i and
// beta = min b_i.

/// V_{0,b} = pi (2 + alpha + beta)^2 / (b (1 + beta)).
double volume_flat_lower(double alpha, double beta, double b);

/// 2 pi [(beta+1)/a + (alpha+1)/b - sqrt((b-a)(b(beta+1)^2 - a(alpha+1)^2)) / (ab)].
/// This is V_{a,b} for a < 0 and V_min for a > 0. Evaluated in rationalized
/// form, which stays accurate as a -> 0 and equals V_{0,b} at a = 0.
double volume_lower(double alpha, double beta, double a, double b);

/// Same as volume_lower with the square root added: V_max for a > 0.
double volume_upper(double alpha, double beta, double a, double b);

/// Real solutions of the volume constraint
///   a b V^2 - 4 pi (a(1+alpha) + b(1+beta)) V + chi^2 <= 0,
/// solved as a quadratic (or linear when a == 0) with a cancellation-free
/// root formula. For a <= 0 only the positive lower root is reported.
struct ConstraintRoots {
  std::optional<double> lower;
  std::optional<double> upper;
};
ConstraintRoots volume_constraint_roots(double alpha, double beta, double a, double b);

/// Discriminant of the volume constraint divided by 16 pi^2, in factored form:
/// (b - a)(b(1+beta)^2 - a(1+alpha)^2).
double volume_constraint_discriminant(double alpha, double beta, double a, double b);

/// Volume bounds for metrics representing `divisor` with curvature in `band`.
/// Throws InvalidInput for subcritical divisors.
BoundsReport volume_bounds(const Divisor& divisor, const CurvatureBand& band);

/// Minimal volume under |K| <= 1:
/// 2 pi (alpha - beta + sqrt(2(1+alpha)^2 + 2(1+beta)^2)).
double min_vol(double alpha, double beta);
double min_vol(const Divisor& divisor);

struct PinchingDetails {
  bool feasible = false;
  double ratio = 0.0;          // a / b
  double limit = 0.0;          // (1+beta)^2 / (1+alpha)^2
  double discriminant = 0.0;   // volume_constraint_discriminant
  bool routes_agree = true;    // ratio test and discriminant sign agree
};

/// Pinching test a/b <= (1+beta)^2/(1+alpha)^2 for a > 0, cross-checked
/// against the sign of the volume-constraint discriminant. Throws
/// InvalidInput when a <= 0.
PinchingDetails pinching_details(const Divisor& divisor, const CurvatureBand& band);
bool pinching_check(const Divisor& divisor, const CurvatureBand& band);

}  // namespace conicvol
