#include <algorithm>
#include <cmath>
#include <string>

#include "conicvol/error.hpp"
#include "conicvol/levelset.hpp"
#include "conicvol/parallel.hpp"

namespace conicvol::levelset {
namespace {

double laplacian(std::span<const double> u, int n, double h, int i, int j, int stride) {
  auto at = [&](int ii, int jj) { return u[static_cast<std::size_t>(jj) * n + ii]; };
  const double c = at(i, j);
  const double sum = at(i - stride, j) + at(i + stride, j) + at(i, j - stride) + at(i, j + stride);
  const double hs = h * stride;
  return (sum - 4.0 * c) / (hs * hs);
}

}  // namespace

std::vector<double> discrete_curvature(std::span<const double> u, int n, double h) {
  if (n < 3) throw InvalidInput("discrete curvature needs n >= 3");
  std::vector<double> k(u.size(), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const int jc = std::clamp(j, 1, n - 2);
    for (int i = 0; i < n; ++i) {
      const int ic = std::clamp(i, 1, n - 2);
      const double c = u[static_cast<std::size_t>(jc) * n + ic];
      k[static_cast<std::size_t>(j) * n + i] = -laplacian(u, n, h, ic, jc, 1) * std::exp(-2.0 * c);
    }
  });
  return k;
}

GriddedMetric::GriddedMetric(GridSpec spec, std::vector<double> u, std::vector<ConePoint> points,
                             double alpha_eff, std::optional<double> beta_inf,
                             std::optional<std::vector<double>> curvature,
                             int mask_radius_cells)
    : spec_(spec),
      u_(std::move(u)),
      points_(std::move(points)),
      alpha_eff_(alpha_eff),
      beta_inf_(beta_inf),
      mask_radius_cells_(mask_radius_cells) {
  if (!(spec_.half_width > 0.0) || !std::isfinite(spec_.half_width))
    throw InvalidInput("grid half-width must be positive");
  if (spec_.n < 4 || spec_.n % 2 != 0) throw InvalidInput("grid resolution must be even and >= 4");
  const std::size_t cells = static_cast<std::size_t>(spec_.n) * spec_.n;
  if (u_.size() != cells)
    throw InvalidInput("grid has " + std::to_string(u_.size()) + " values, expected " +
                       std::to_string(cells));
  if (!std::all_of(u_.begin(), u_.end(), [](double v) { return std::isfinite(v); }))
    throw InvalidInput("grid values must be finite");
  if (mask_radius_cells_ < 0) throw InvalidInput("mask radius must be non-negative");
  if (!std::isfinite(alpha_eff_) || alpha_eff_ <= -1.0 || alpha_eff_ > 0.0)
    throw InvalidInput("alpha_eff must lie in (-1, 0]");
  if (beta_inf_ && (!std::isfinite(*beta_inf_) || *beta_inf_ <= -1.0 || *beta_inf_ > 0.0))
    throw InvalidInput("beta_inf must lie in (-1, 0]");
  for (const auto& p : points_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.order <= -1.0 || p.order > 0.0)
      throw InvalidInput("cone point must have finite position and order in (-1, 0]");

  const double h = cell_size();
  mask_.assign(cells, 0);
  const double radius = mask_radius_cells_ * h;
  for (const auto& p : points_) {
    if (p.order >= 0.0) continue;
    for (int j = 0; j < spec_.n; ++j) {
      const double dy = y(j) - p.y;
      if (std::abs(dy) > radius) continue;
      for (int i = 0; i < spec_.n; ++i) {
        const double dx = x(i) - p.x;
        if (dx * dx + dy * dy <= radius * radius) mask_[index(i, j)] = 1;
      }
    }
  }

  if (curvature) {
    if (curvature->size() != cells) throw InvalidInput("curvature raster has the wrong size");
    curvature_ = std::move(*curvature);
    analytic_curvature_ = true;
    return;
  }
  curvature_ = discrete_curvature(u_, spec_.n, h);

  // Richardson comparison of the h and 2h stencils.
  std::vector<double> diffs;
  const int n = spec_.n;
  diffs.reserve(static_cast<std::size_t>(n - 4) * (n - 4));
  for (int j = 2; j < n - 2; ++j)
    for (int i = 2; i < n - 2; ++i) {
      if (mask_[index(i, j)]) continue;
      const double d = laplacian(u_, n, h, i, j, 1) - laplacian(u_, n, h, i, j, 2);
      diffs.push_back(std::abs(d) / 3.0 * std::exp(-2.0 * u_[index(i, j)]));
    }
  if (!diffs.empty()) {
    auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
    std::nth_element(diffs.begin(), mid, diffs.end());
    curvature_error_ = *mid;
  }
}

double GriddedMetric::masked_area_fraction() const noexcept {
  const auto masked = std::count(mask_.begin(), mask_.end(), std::uint8_t{1});
  return static_cast<double>(masked) / static_cast<double>(mask_.size());
}

GriddedMetric sample_grid(GridSpec spec, const PlaneFn& u, const PlaneFn& curvature,
                          std::vector<ConePoint> points, double alpha_eff,
                          std::optional<double> beta_inf, int mask_radius_cells) {
  if (spec.n < 4 || spec.n % 2 != 0) throw InvalidInput("grid resolution must be even and >= 4");
  const int n = spec.n;
  const double h = 2.0 * spec.half_width / n;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  std::vector<double> values(cells);
  std::optional<std::vector<double>> k;
  if (curvature) k.emplace(cells);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const double yy = -spec.half_width + (static_cast<double>(jj) + 0.5) * h;
    for (int i = 0; i < n; ++i) {
      const double xx = -spec.half_width + (i + 0.5) * h;
      const std::size_t idx = jj * n + i;
      values[idx] = u(xx, yy);
      if (curvature) (*k)[idx] = curvature(xx, yy);
    }
  });
  return GriddedMetric(spec, std::move(values), std::move(points), alpha_eff, beta_inf,
                       std::move(k), mask_radius_cells);
}

GriddedMetric sample_radial(const extremal::PiecewiseRadialMetric& metric, GridSpec spec,
                            int mask_radius_cells) {
  return sample_perturbed(metric, spec, {}, mask_radius_cells);
}

double Bump::value(double x, double y) const noexcept {
  const double d2 = (x - this->x) * (x - this->x) + (y - this->y) * (y - this->y);
  return amplitude * std::exp(-d2 / (width * width));
}

double Bump::laplacian(double x, double y) const noexcept {
  const double w2 = width * width;
  const double d2 = (x - this->x) * (x - this->x) + (y - this->y) * (y - this->y);
  return amplitude * std::exp(-d2 / w2) * (4.0 * d2 / (w2 * w2) - 4.0 / w2);
}

GriddedMetric sample_perturbed(const extremal::PiecewiseRadialMetric& metric, GridSpec spec,
                               const std::vector<Bump>& bumps, int mask_radius_cells) {
  if (spec.n < 4 || spec.n % 2 != 0) throw InvalidInput("grid resolution must be even and >= 4");
  for (const auto& bump : bumps)
    if (!std::isfinite(bump.amplitude) || !(bump.width > 0.0) || !std::isfinite(bump.x) ||
        !std::isfinite(bump.y))
      throw InvalidInput("bumps need a finite amplitude and centre and a positive width");
  const int n = spec.n;
  const double h = 2.0 * spec.half_width / n;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  std::vector<double> values(cells), k(cells);
  const double r = metric.glue_radius;
  const bool glued = !metric.single_piece() && std::isfinite(r) && r > 0.0;
  auto bump_sum = [&](double x, double y) {
    double v = 0.0;
    for (const auto& bump : bumps) v += bump.value(x, y);
    return v;
  };
  // K e^{2u} at a point: the model's K e^{2u_0} minus the Laplacian of the bumps.
  auto curvature_mass = [&](double x, double y, double rho) {
    double v = metric.curvature(rho) * metric.e2u(rho);
    for (const auto& bump : bumps) v -= bump.laplacian(x, y);
    return v;
  };
  constexpr int sub = 8;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const double y = -spec.half_width + (static_cast<double>(jj) + 0.5) * h;
    for (int i = 0; i < n; ++i) {
      const double x = -spec.half_width + (i + 0.5) * h;
      const double rho = std::hypot(x, y);
      const std::size_t idx = jj * n + i;
      values[idx] = metric.u(std::log(rho)) + bump_sum(x, y);
      if (!glued || std::abs(rho - r) > h) {
        k[idx] = bumps.empty() ? metric.curvature(rho)
                               : curvature_mass(x, y, rho) * std::exp(-2.0 * values[idx]);
        continue;
      }
      // Cells cut by the gluing circle get the e^{2u}-weighted mean curvature.
      double mass = 0.0, curv = 0.0;
      for (int b = 0; b < sub; ++b)
        for (int a = 0; a < sub; ++a) {
          const double px = x + ((a + 0.5) / sub - 0.5) * h;
          const double py = y + ((b + 0.5) / sub - 0.5) * h;
          const double p = std::hypot(px, py);
          mass += metric.e2u(p) * std::exp(2.0 * bump_sum(px, py));
          curv += curvature_mass(px, py, p);
        }
      k[idx] = curv / mass;
    }
  });
  std::vector<ConePoint> points;
  if (metric.alpha < 0.0) points.push_back({0.0, 0.0, metric.alpha});
  return GriddedMetric(spec, std::move(values), std::move(points), metric.alpha, metric.beta,
                       std::move(k), mask_radius_cells);
}

}  // namespace conicvol::levelset
