#include "conicvol/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "conicvol/error.hpp"

namespace conicvol {

std::string_view to_string(Criticality c) noexcept {
  switch (c) {
    case Criticality::subcritical:
      return "subcritical";
    case Criticality::critical:
      return "critical";
    case Criticality::supercritical:
      return "supercritical";
  }
  return "unknown";
}

Divisor::Divisor(std::vector<ConicPoint> points) : points_(std::move(points)) {
  for (const auto& p : points_) {
    if (!std::isfinite(p.order)) {
      throw InvalidOrder(p.order, "conic order must be finite");
    }
    if (p.order > 0.0) {
      throw InvalidOrder(p.order, "positive conic order " + std::to_string(p.order) +
                                      " is not supported; orders must lie in (-1, 0]");
    }
    if (p.order <= -1.0) {
      throw InvalidOrder(p.order, "conic order " + std::to_string(p.order) +
                                      " must be greater than -1");
    }
  }
  if (points_.empty()) return;

  auto smallest = std::min_element(points_.begin(), points_.end(),
                                   [](const auto& l, const auto& r) { return l.order < r.order; });
  beta_ = smallest->order;
  // Sum the other orders directly rather than |D| - beta so that alpha is
  // exactly zero for one-point divisors.
  alpha_ = 0.0;
  for (auto it = points_.begin(); it != points_.end(); ++it) {
    if (it != smallest) alpha_ += it->order;
  }
  degree_ = alpha_ + beta_;
}

Divisor Divisor::from_orders(std::span<const double> orders) {
  std::vector<ConicPoint> pts;
  pts.reserve(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    pts.push_back({orders[i], "p" + std::to_string(i + 1)});
  }
  return Divisor(std::move(pts));
}

Criticality Divisor::classify() const noexcept {
  // |D| - 2 beta = alpha - beta.
  const double gap = alpha_ - beta_;
  if (std::abs(gap) <= kCriticalTolerance) return Criticality::critical;
  return gap > 0.0 ? Criticality::supercritical : Criticality::subcritical;
}

bool Divisor::satisfies_volume_hypotheses() const noexcept {
  const auto c = classify();
  return c == Criticality::supercritical || (c == Criticality::critical && points_.size() >= 3);
}

bool Divisor::is_degenerate_football() const noexcept {
  return classify() == Criticality::critical && points_.size() < 3;
}

double weighted_euler(const Divisor& divisor) noexcept {
  return 2.0 * std::numbers::pi * (2.0 + divisor.degree());
}

}  // namespace conicvol
