#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conicvol {

struct ConicPoint {
  double order = 0.0;
  std::string label;
};

enum class Criticality { subcritical, critical, supercritical };

std::string_view to_string(Criticality c) noexcept;

// Orders closer than this are treated as equal when comparing |D| to 2 min b_i.
inline constexpr double kCriticalTolerance = 1e-12;

/// A divisor D = sum b_i p_i on the 2-sphere with every order in (-1, 0].
///
/// Derived invariants follow the convention used throughout the library:
/// beta is the smallest order (the point sent to infinity), alpha = |D| - beta
/// is the total order of the remaining points. The empty divisor has
/// alpha = beta = 0.
class Divisor {
 public:
  Divisor() = default;
  explicit Divisor(std::vector<ConicPoint> points);

  static Divisor from_orders(std::span<const double> orders);

  std::span<const ConicPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  double degree() const noexcept { return degree_; }
  double beta() const noexcept { return beta_; }
  double alpha() const noexcept { return alpha_; }

  Criticality classify() const noexcept;

  // Supercritical, or critical with at least three points.
  bool satisfies_volume_hypotheses() const noexcept;

  // Critical with fewer than three points (alpha == beta). Formulas are still
  // evaluated for these as the constant-curvature football limit.
  bool is_degenerate_football() const noexcept;

 private:
  std::vector<ConicPoint> points_;
  double degree_ = 0.0;
  double beta_ = 0.0;
  double alpha_ = 0.0;
};

/// Weighted Euler characteristic times 2 pi: 2 pi (2 + |D|), the total
/// curvature of any conic metric on the sphere representing D.
double weighted_euler(const Divisor& divisor) noexcept;

}  // namespace conicvol
