#include "conicvol/levelset.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "conicvol/contour.hpp"
#include "conicvol/error.hpp"
#include "conicvol/parallel.hpp"

namespace conicvol::levelset {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Measure {
  double s = 0.0;
  double B = 0.0;
  double A = 0.0;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Fraction of a cell above t when u is linear across it: the spread of u is
// the sum of two uniform variables of widths `a` <= `b`, so the fraction is the
// trapezoidal tail probability at x = hi - t.
double cell_fraction(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= a + b) return 1.0;
  if (a <= 0.0) return x / b;
  if (x <= a) return x * x / (2.0 * a * b);
  if (x <= b) return (x - 0.5 * a) / b;
  const double y = a + b - x;
  return 1.0 - y * y / (2.0 * a * b);
}

// Cells sorted by the lower end of their spread. Suffix sums give the fully
// included part of {u > t}; the partial band is scanned explicitly.
//
// Cells cut by the window circle keep the fraction g of their area inside it;
// cells cut by a cone core circle lose the fraction g_in inside that. Near
// either circle u decreases outward, so {u > t} covers the fraction
// clamp(f, g_in, g) - g_in of such a cell.
struct CellSet {
  std::vector<double> lo, hi, a, g, gin, e, ke;
  std::vector<long double> suf_e, suf_ke, suf_g;
  double area = 0.0;  // h^2
  double w_max = 0.0;

  Measure measure(double t) const {
    const auto idx = static_cast<std::size_t>(std::upper_bound(lo.begin(), lo.end(), t) - lo.begin());
    double s = static_cast<double>(suf_e[idx]);
    double A = static_cast<double>(suf_ke[idx]);
    double cells = static_cast<double>(suf_g[idx]);
    for (std::size_t k = idx; k-- > 0;) {
      if (lo[k] <= t - w_max) break;
      if (hi[k] <= t) continue;
      const double w = hi[k] - lo[k];
      const double f = std::clamp(cell_fraction(hi[k] - t, a[k], w - a[k]), gin[k], g[k]) - gin[k];
      s += f * e[k];
      A += f * ke[k];
      cells += f;
    }
    return {s, cells * area, A};
  }
};

// Interior model around a cone point of order alpha < 0: the radial
// constant-curvature metric with that cone. With p = 2 + 2 alpha and
// Y = m rho^p,
//   K > 0   e^{2u} = p^2 Y / (K rho^2 (1 + Y)^2)
//   K < 0   e^{2u} = p^2 Y / (|K| rho^2 (1 - Y)^2)
//   K = 0   e^{2u} = m rho^{2 alpha}
struct CoreModel {
  double order = 0.0;
  double m = 0.0;
  double radius = 0.0;
  double curvature = 0.0;

  double p() const { return 2.0 + 2.0 * order; }
  bool flat() const { return std::abs(curvature) < 1e-12; }
  double y_at(double rho) const { return m * std::pow(rho, p()); }
  double log_factor(double rho) const {
    if (flat()) return std::log(m) + 2.0 * order * std::log(rho);
    const double y = y_at(rho);
    const double sign = curvature > 0.0 ? 1.0 : -1.0;
    return std::log(p() * p() * y / std::abs(curvature)) - 2.0 * std::log(rho) -
           2.0 * std::log(std::abs(1.0 + sign * y));
  }
  // Mass of {|z - z_i| < rho}.
  double mass_within(double rho) const {
    if (flat()) return 2.0 * kPi * m * std::pow(rho, p()) / p();
    const double y = y_at(rho);
    const double factor = 2.0 * kPi * p() / std::abs(curvature);
    return curvature > 0.0 ? factor * y / (1.0 + y) : factor * y / (1.0 - y);
  }
  double full_mass() const { return mass_within(radius); }
  double radius_at_mass(double mass) const {
    if (flat()) return std::pow(p() * mass / (2.0 * kPi * m), 1.0 / p());
    const double w = mass * std::abs(curvature) / (2.0 * kPi * p());
    const double y = curvature > 0.0 ? w / (1.0 - w) : w / (1.0 + w);
    return std::pow(y / m, 1.0 / p());
  }
  double level_at_mass(double mass) const { return 0.5 * log_factor(radius_at_mass(mass)); }
  // Scale reproducing e^{2u} = value at rho, on the small-Y branch.
  static double solve_scale(double order, double curvature, double rho, double value) {
    const double p = 2.0 + 2.0 * order;
    if (std::abs(curvature) < 1e-12) return value * std::pow(rho, -2.0 * order);
    const double w = value * std::abs(curvature) * rho * rho / (p * p);
    double y;
    if (curvature > 0.0) {
      y = (1.0 - 2.0 * w - std::sqrt(std::max(0.0, 1.0 - 4.0 * w))) / (2.0 * w);
    } else {
      y = (1.0 + 2.0 * w - std::sqrt(1.0 + 4.0 * w)) / (2.0 * w);
    }
    return y * std::pow(rho, -p);
  }
  // Radius of {u > t} near the cone point, capped at `radius`.
  double level_radius(double t) const {
    auto g = [&](double l) { return log_factor(std::exp(l)) - 2.0 * t; };
    const double hi = std::log(radius);
    if (g(hi) >= 0.0) return radius;
    double lo = hi - 1.0;
    while (g(lo) < 0.0) {
      lo = hi - 2.0 * (hi - lo);
      if (lo < -700.0) return 0.0;
    }
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
    const auto [l, r] = boost::math::tools::bisect(g, lo, hi, tol);
    return std::exp(0.5 * (l + r));
  }
  Measure measure(double t) const {
    const double rho = level_radius(t);
    const double s = mass_within(rho);
    return {s, kPi * rho * rho, curvature * s};
  }
};

// Exterior model: the radial constant-curvature metric with cone order beta at
// infinity. With q = 2 + 2 beta and X = m rho^{-q},
//   K > 0   e^{2u} = q^2 X / (K rho^2 (1 + X)^2)
//   K < 0   e^{2u} = q^2 X / (|K| rho^2 (1 - X)^2)
//   K = 0   e^{2u} = m rho^{-(4 + 2 beta)}
struct TailModel {
  double beta = 0.0;
  double m = 0.0;
  double radius = 0.0;
  double curvature = 0.0;

  double q() const { return 2.0 + 2.0 * beta; }
  bool flat() const { return std::abs(curvature) < 1e-12; }
  double x_at(double rho) const { return m * std::pow(rho, -q()); }
  double log_factor(double rho) const {
    if (flat()) return std::log(m) - (4.0 + 2.0 * beta) * std::log(rho);
    const double x = x_at(rho);
    const double sign = curvature > 0.0 ? 1.0 : -1.0;
    return std::log(q() * q() * x / std::abs(curvature)) - 2.0 * std::log(rho) -
           2.0 * std::log(std::abs(1.0 + sign * x));
  }
  // Mass of {|z| > rho}.
  double mass_beyond(double rho) const {
    if (flat()) return 2.0 * kPi * m * std::pow(rho, -q()) / q();
    const double x = x_at(rho);
    const double factor = 2.0 * kPi * q() / std::abs(curvature);
    return curvature > 0.0 ? factor * x / (1.0 + x) : factor * x / (1.0 - x);
  }
  double full_mass() const { return mass_beyond(radius); }
  double radius_at_mass(double mass) const {
    if (flat()) return std::pow(q() * mass / (2.0 * kPi * m), -1.0 / q());
    const double y = mass * std::abs(curvature) / (2.0 * kPi * q());
    const double x = curvature > 0.0 ? y / (1.0 - y) : y / (1.0 + y);
    return std::pow(m / x, 1.0 / q());
  }
  // Scale reproducing e^{2u} = value at rho, on the small-X branch.
  static double solve_scale(double beta, double curvature, double rho, double value) {
    const double q = 2.0 + 2.0 * beta;
    if (std::abs(curvature) < 1e-12) return value * std::pow(rho, 4.0 + 2.0 * beta);
    const double y = value * std::abs(curvature) * rho * rho / (q * q);
    double x;
    if (curvature > 0.0) {
      x = (1.0 - 2.0 * y - std::sqrt(std::max(0.0, 1.0 - 4.0 * y))) / (2.0 * y);
    } else {
      x = (1.0 + 2.0 * y - std::sqrt(1.0 + 4.0 * y)) / (2.0 * y);
    }
    return x * std::pow(rho, q);
  }
  // Outer radius of {u > t} in the exterior, or `radius` when t is above the
  // model's value there.
  double level_radius(double t) const {
    auto g = [&](double l) { return log_factor(std::exp(l)) - 2.0 * t; };
    double lo = std::log(radius);
    if (g(lo) <= 0.0) return radius;
    double hi = lo + 1.0;
    while (g(hi) > 0.0) {
      hi = lo + 2.0 * (hi - lo);
      if (hi > 700.0) return kInf;
    }
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
    const auto [l, r] = boost::math::tools::bisect(g, lo, hi, tol);
    return std::exp(0.5 * (l + r));
  }
  Measure measure(double t) const {
    const double rho = level_radius(t);
    if (rho <= radius) return {};
    if (!std::isfinite(rho)) return {full_mass(), kInf, curvature * full_mass()};
    const double s = full_mass() - mass_beyond(rho);
    return {s, kPi * (rho * rho - radius * radius), curvature * s};
  }
};

struct Analysis {
  CellSet cells;
  std::vector<CoreModel> cores;
  std::optional<TailModel> tail;
  double tail_error = 0.0;
  double boundary_level = -kInf;
  double top_level = -kInf;
  double bottom_level = kInf;
  std::vector<double> sorted_u_desc;
  std::vector<double> sorted_e_desc;
  std::vector<double> plateaus;

  Measure measure(double t) const {
    Measure m = cells.measure(t);
    for (const auto& core : cores) {
      const Measure c = core.measure(t);
      m.s += c.s;
      m.B += c.B;
      m.A += c.A;
    }
    if (tail) {
      const Measure c = tail->measure(t);
      m.s += c.s;
      m.B += c.B;
      m.A += c.A;
    }
    return m;
  }
};

bool same_level(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

Analysis analyse(const GriddedMetric& grid, const SummaryOptions& options) {
  Analysis an;
  const int n = grid.n();
  const double h = grid.cell_size();
  const auto u = grid.u_values();
  const auto K = grid.curvature_values();
  const bool radial_tail = grid.beta_inf().has_value();
  const double window_radius = grid.half_width() - 2.0 * h;

  // Fraction of a cell inside the window circle.
  auto inside = [&](int i, int j) {
    if (!radial_tail) return 1.0;
    const double r = std::hypot(grid.x(i), grid.y(j));
    if (r + h * std::numbers::sqrt2 / 2.0 <= window_radius) return 1.0;
    if (r - h * std::numbers::sqrt2 / 2.0 >= window_radius) return 0.0;
    constexpr int sub = 16;
    int in = 0;
    for (int b = 0; b < sub; ++b)
      for (int a = 0; a < sub; ++a) {
        const double x = grid.x(i) + ((a + 0.5) / sub - 0.5) * h;
        const double y = grid.y(j) + ((b + 0.5) / sub - 0.5) * h;
        if (std::hypot(x, y) <= window_radius) ++in;
      }
    return static_cast<double>(in) / (sub * sub);
  };

  // Spread of u across each cell from the local gradient: total width and the
  // shorter of the two axis contributions.
  std::vector<double> width(u.size(), 0.0), short_side(u.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int il = std::max(i - 1, 0), ir = std::min(i + 1, n - 1);
      const int jl = std::max(j - 1, 0), jr = std::min(j + 1, n - 1);
      const double ux = (grid.u(ir, j) - grid.u(il, j)) / ((ir - il) * h);
      const double uy = (grid.u(i, jr) - grid.u(i, jl)) / ((jr - jl) * h);
      const double c = grid.u(i, j);
      // One-sided differences keep the ramp open at extrema.
      const double spread = std::max({std::abs(grid.u(ir, j) - c), std::abs(grid.u(il, j) - c),
                                      std::abs(grid.u(i, jr) - c), std::abs(grid.u(i, jl) - c)});
      const double wx = h * std::abs(ux), wy = h * std::abs(uy);
      if (wx + wy >= spread) {
        width[grid.index(i, j)] = wx + wy;
        short_side[grid.index(i, j)] = std::min(wx, wy);
      } else {
        width[grid.index(i, j)] = spread;
      }
    }
  }

  // Cone cores: disks of the mask radius around points of negative order,
  // replaced by a constant-curvature model fitted on the ring just outside.
  const double mask_radius = grid.mask_radius_cells() * h;
  std::vector<double> core_fraction(u.size(), 0.0);
  auto disk_fraction = [&](int i, int j, double cx, double cy, double radius) {
    const double r = std::hypot(grid.x(i) - cx, grid.y(j) - cy);
    if (r + h * std::numbers::sqrt2 / 2.0 <= radius) return 1.0;
    if (r - h * std::numbers::sqrt2 / 2.0 >= radius) return 0.0;
    constexpr int sub = 16;
    int in = 0;
    for (int b = 0; b < sub; ++b)
      for (int a = 0; a < sub; ++a) {
        const double x = grid.x(i) + ((a + 0.5) / sub - 0.5) * h - cx;
        const double y = grid.y(j) + ((b + 0.5) / sub - 0.5) * h - cy;
        if (std::hypot(x, y) <= radius) ++in;
      }
    return static_cast<double>(in) / (sub * sub);
  };
  if (mask_radius > 0.0) {
    for (const auto& p : grid.points()) {
      if (p.order >= 0.0) continue;
      const int reach = grid.mask_radius_cells() + 4;
      const int ci = static_cast<int>(std::floor((p.x + grid.half_width()) / h));
      const int cj = static_cast<int>(std::floor((p.y + grid.half_width()) / h));
      std::vector<double> kv, scales;
      for (int j = std::max(cj - reach, 0); j <= std::min(cj + reach, n - 1); ++j)
        for (int i = std::max(ci - reach, 0); i <= std::min(ci + reach, n - 1); ++i) {
          const std::size_t idx = grid.index(i, j);
          const double g = disk_fraction(i, j, p.x, p.y, mask_radius);
          core_fraction[idx] = std::max(core_fraction[idx], g);
          const double r = std::hypot(grid.x(i) - p.x, grid.y(j) - p.y);
          if (g == 0.0 && r <= mask_radius + 2.0 * h) kv.push_back(K[idx]);
        }
      if (kv.empty()) throw InvalidInput("cone point has no ring to fit its core");
      CoreModel core;
      core.order = p.order;
      core.radius = mask_radius;
      core.curvature = median(kv);
      for (int j = std::max(cj - reach, 0); j <= std::min(cj + reach, n - 1); ++j)
        for (int i = std::max(ci - reach, 0); i <= std::min(ci + reach, n - 1); ++i) {
          const double r = std::hypot(grid.x(i) - p.x, grid.y(j) - p.y);
          const std::size_t idx = grid.index(i, j);
          if (r > mask_radius + h && r <= mask_radius + 3.0 * h && core_fraction[idx] == 0.0)
            scales.push_back(CoreModel::solve_scale(p.order, core.curvature, r, std::exp(2.0 * u[idx])));
        }
      core.m = median(scales);
      if (!(core.m > 0.0) || !std::isfinite(core.m)) throw InvalidInput("cone core fit failed");
      an.cores.push_back(core);
    }
  }

  std::vector<std::size_t> active;
  active.reserve(u.size());
  std::vector<double> fraction(u.size(), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = grid.index(i, j);
      const double g = inside(i, j);
      fraction[idx] = g;
      if (g > core_fraction[idx]) active.push_back(idx);
    }
  if (active.empty()) throw InvalidInput("grid has no cells outside the cone cores inside the window");

  // Plateaus: runs of equal values with at least plateau_cells members that
  // sit inside the flat region (two or more equal 4-neighbours). Symmetric
  // grids repeat values at mirrored cells, which are never adjacent in bulk.
  std::vector<std::size_t> order = active;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
  auto flat_neighbours = [&](std::size_t idx) {
    const int i = static_cast<int>(idx % n), j = static_cast<int>(idx / n);
    int count = 0;
    if (i > 0 && same_level(u[idx], grid.u(i - 1, j))) ++count;
    if (i < n - 1 && same_level(u[idx], grid.u(i + 1, j))) ++count;
    if (j > 0 && same_level(u[idx], grid.u(i, j - 1))) ++count;
    if (j < n - 1 && same_level(u[idx], grid.u(i, j + 1))) ++count;
    return count;
  };
  std::vector<std::uint8_t> step(u.size(), 0);
  for (std::size_t k = 0; k < order.size();) {
    std::size_t m = k + 1;
    while (m < order.size() && same_level(u[order[k]], u[order[m]])) ++m;
    const auto interior = m - k < static_cast<std::size_t>(options.plateau_cells)
                              ? 0
                              : std::count_if(order.begin() + static_cast<std::ptrdiff_t>(k),
                                              order.begin() + static_cast<std::ptrdiff_t>(m),
                                              [&](std::size_t idx) { return flat_neighbours(idx) >= 2; });
    if (interior >= options.plateau_cells) {
      an.plateaus.push_back(u[order[k]]);
      for (std::size_t r = k; r < m; ++r) step[order[r]] = 1;
    }
    k = m;
  }
  an.sorted_u_desc.reserve(order.size());
  an.sorted_e_desc.reserve(order.size());
  for (auto idx : order) {
    an.sorted_u_desc.push_back(u[idx]);
    an.sorted_e_desc.push_back(std::exp(2.0 * u[idx]) * h * h);
  }

  // Cell set sorted by the lower end of the spread.
  struct Row {
    double lo, hi, a, g, gin, e, ke;
  };
  std::vector<Row> rows;
  rows.reserve(active.size());
  for (auto idx : active) {
    double w = step[idx] ? 0.0 : width[idx];
    if (w < 1e-14 * std::max(1.0, std::abs(u[idx]))) w = 0.0;
    const double a = w == 0.0 ? 0.0 : short_side[idx];
    const double e = std::exp(2.0 * u[idx]) * h * h;
    rows.push_back({u[idx] - 0.5 * w, u[idx] + 0.5 * w, a, fraction[idx], core_fraction[idx], e, K[idx] * e});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.lo < b.lo; });
  auto& cs = an.cells;
  cs.area = h * h;
  const std::size_t m = rows.size();
  cs.lo.resize(m);
  cs.hi.resize(m);
  cs.a.resize(m);
  cs.g.resize(m);
  cs.gin.resize(m);
  cs.e.resize(m);
  cs.ke.resize(m);
  cs.suf_e.assign(m + 1, 0.0L);
  cs.suf_ke.assign(m + 1, 0.0L);
  cs.suf_g.assign(m + 1, 0.0L);
  for (std::size_t k = 0; k < m; ++k) {
    cs.lo[k] = rows[k].lo;
    cs.hi[k] = rows[k].hi;
    cs.a[k] = rows[k].a;
    cs.g[k] = rows[k].g;
    cs.gin[k] = rows[k].gin;
    cs.e[k] = rows[k].e;
    cs.ke[k] = rows[k].ke;
    cs.w_max = std::max(cs.w_max, rows[k].hi - rows[k].lo);
    an.top_level = std::max(an.top_level, rows[k].hi);
  }
  an.bottom_level = cs.lo.front();
  for (std::size_t k = m; k-- > 0;) {
    const double weight = rows[k].g - rows[k].gin;
    cs.suf_e[k] = cs.suf_e[k + 1] + weight * rows[k].e;
    cs.suf_ke[k] = cs.suf_ke[k + 1] + weight * rows[k].ke;
    cs.suf_g[k] = cs.suf_g[k + 1] + weight;
  }

  // Boundary level and exterior completion.
  if (radial_tail) {
    const double beta = *grid.beta_inf();
    struct Sample {
      double r, e2u, k;
    };
    std::vector<Sample> ring;
    for (auto idx : active) {
      const int i = static_cast<int>(idx % n), j = static_cast<int>(idx / n);
      const double r = std::hypot(grid.x(i), grid.y(j));
      if (r > window_radius - 2.0 * h) an.boundary_level = std::max(an.boundary_level, u[idx] + 0.5 * width[idx]);
      if (r >= 0.75 * window_radius && r <= window_radius) ring.push_back({r, std::exp(2.0 * u[idx]), K[idx]});
    }
    if (ring.size() < 16) throw InvalidInput("window too coarse to fit the exterior model");
    TailModel tail;
    tail.beta = beta;
    tail.radius = window_radius;
    {
      std::vector<double> kv;
      for (const auto& smp : ring) kv.push_back(smp.k);
      tail.curvature = median(kv);
    }
    auto fit_scale = [&](double from) {
      std::vector<double> scales;
      for (const auto& smp : ring)
        if (smp.r >= from) scales.push_back(TailModel::solve_scale(beta, tail.curvature, smp.r, smp.e2u));
      return median(scales);
    };
    tail.m = fit_scale(0.75 * window_radius);
    if (!(tail.m > 0.0) || !std::isfinite(tail.m)) throw InvalidInput("exterior model fit failed");
    TailModel alt = tail;
    alt.m = fit_scale(0.875 * window_radius);
    an.tail_error = std::abs(tail.full_mass() - alt.full_mass());
    an.tail = tail;
  } else {
    for (int k = 0; k < n; ++k) {
      for (auto idx : {grid.index(k, 0), grid.index(k, n - 1), grid.index(0, k), grid.index(n - 1, k)}) {
        if (grid.mask()[idx]) continue;
        an.boundary_level = std::max(an.boundary_level, u[idx] + 0.5 * width[idx]);
      }
    }
  }
  return an;
}

double lerp(double a, double b, double f) { return a + f * (b - a); }

}  // namespace

namespace {

// Locates s in the row table; returns the interval index and fraction.
std::pair<std::size_t, double> locate(const std::vector<LevelSetSummary::Row>& table, double s) {
  if (table.size() < 2) throw InvalidInput("level-set summary is empty");
  if (s <= table.front().s) return {0, 0.0};
  if (s >= table.back().s) return {table.size() - 2, 1.0};
  auto it = std::upper_bound(table.begin(), table.end(), s,
                             [](double v, const LevelSetSummary::Row& r) { return v < r.s; });
  const std::size_t i = static_cast<std::size_t>(it - table.begin()) - 1;
  const double ds = table[i + 1].s - table[i].s;
  return {i, ds > 0.0 ? (s - table[i].s) / ds : 0.0};
}

}  // namespace

double LevelSetSummary::interpolate_A(double s) const {
  // Jump pairs carry the same A at both rows, so 𝔸 is constant across them.
  const auto [i, f] = locate(table, s);
  return lerp(table[i].A, table[i + 1].A, f);
}

double LevelSetSummary::integrate_A(double s0, double s1) const {
  if (s1 <= s0) return 0.0;
  // Trapezoids over the rows, clipped to [s0, s1].
  double total = 0.0;
  const auto [i0, f0] = locate(table, s0);
  const auto [i1, f1] = locate(table, s1);
  auto value = [&](std::size_t i, double f) { return lerp(table[i].A, table[i + 1].A, f); };
  if (i0 == i1) return 0.5 * (value(i0, f0) + value(i1, f1)) * (s1 - s0);
  total += 0.5 * (value(i0, f0) + table[i0 + 1].A) * (table[i0 + 1].s - s0);
  for (std::size_t k = i0 + 1; k < i1; ++k) total += 0.5 * (table[k].A + table[k + 1].A) * (table[k + 1].s - table[k].s);
  total += 0.5 * (table[i1].A + value(i1, f1)) * (s1 - table[i1].s);
  return total;
}

double LevelSetSummary::interpolate_B(double s) const {
  const auto [i, f] = locate(table, s);
  if (f == 0.0) return table[i].B;
  if (f == 1.0) return table[i + 1].B;
  if (!std::isfinite(table[i + 1].B)) return table[i].B;
  return lerp(table[i].B, table[i + 1].B, f);
}

double LevelSetSummary::interpolate_t(double s) const {
  const auto [i, f] = locate(table, s);
  if (f == 0.0) return table[i].t;
  if (f == 1.0) return table[i + 1].t;
  if (!std::isfinite(table[i].t)) return table[i + 1].t;
  if (!std::isfinite(table[i + 1].t)) return table[i].t;
  return lerp(table[i].t, table[i + 1].t, f);
}

LevelSetSummary summarize(const GriddedMetric& grid, int n_thresholds) {
  SummaryOptions options;
  options.n_thresholds = n_thresholds;
  return summarize(grid, options);
}

LevelSetSummary summarize(const GriddedMetric& grid, const SummaryOptions& options) {
  if (options.n_thresholds < 2) throw InvalidInput("need at least two thresholds");
  if (options.n_s_intervals < 2) throw InvalidInput("need at least two s intervals");
  const Analysis an = analyse(grid, options);

  // Candidate thresholds: equal-mass quantiles of the sorted grid values.
  std::vector<double> levels;
  const double grid_mass = std::accumulate(an.sorted_e_desc.begin(), an.sorted_e_desc.end(), 0.0);
  {
    double cum = 0.0;
    std::size_t k = 0;
    for (int q = 1; q < options.n_thresholds; ++q) {
      const double target = grid_mass * q / options.n_thresholds;
      while (k < an.sorted_u_desc.size() && cum + an.sorted_e_desc[k] < target) cum += an.sorted_e_desc[k++];
      if (k >= an.sorted_u_desc.size()) break;
      levels.push_back(an.sorted_u_desc[k]);
    }
  }
  levels.push_back(an.top_level);
  levels.push_back(an.bottom_level);
  for (const auto& core : an.cores) {
    const double full = core.full_mass();
    for (int e = 0; e <= 768; ++e) levels.push_back(core.level_at_mass(full * std::exp2(-e / 32.0)));
  }
  if (an.tail) {
    const auto& tail = *an.tail;
    const double full = tail.full_mass();
    auto level_at = [&](double beyond) { return 0.5 * tail.log_factor(tail.radius_at_mass(beyond)); };
    // B grows like (V - s)^{-2/q} at the end, so rows are geometric in V - s.
    for (int e = 0; e <= 1280; ++e) levels.push_back(level_at(full * std::exp2(-e / 32.0)));
  }
  if (!an.tail) {
    std::erase_if(levels, [&](double t) { return t < an.boundary_level; });
    levels.push_back(an.boundary_level);
  }
  std::erase_if(levels, [&](double t) {
    if (!std::isfinite(t)) return true;
    return std::any_of(an.plateaus.begin(), an.plateaus.end(), [&](double p) { return same_level(p, t); });
  });
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<double> plateaus;
  for (double p : an.plateaus)
    if (an.tail || p >= an.boundary_level) plateaus.push_back(p);

  // Evaluate all rows.
  const std::size_t nl = levels.size(), np = plateaus.size();
  std::vector<Measure> at(nl), at_plateau(np), below_plateau(np);
  parallel_for(nl + np, [&](std::size_t k) {
    if (k < nl) {
      at[k] = an.measure(levels[k]);
    } else {
      const double p = plateaus[k - nl];
      at_plateau[k - nl] = an.measure(p);
      below_plateau[k - nl] = an.measure(p - 2e-12 * std::max(1.0, std::abs(p)));
    }
  });

  LevelSetSummary out;
  out.alpha_eff = grid.alpha_eff();
  out.cell_size = grid.cell_size();
  out.masked_area_fraction = grid.masked_area_fraction();
  out.curvature_error = grid.curvature_error_estimate();
  out.boundary_level = an.boundary_level;

  struct Tagged {
    LevelSetSummary::Row row;
    int jump = 0;  // 1: s(psi), 2: s(psi-)
  };
  std::vector<Tagged> rows;
  for (std::size_t k = 0; k < nl; ++k) rows.push_back({{at[k].s, levels[k], at[k].A, at[k].B}, 0});
  for (std::size_t k = 0; k < np; ++k) {
    rows.push_back({{at_plateau[k].s, plateaus[k], at_plateau[k].A, at_plateau[k].B}, 1});
    rows.push_back({{below_plateau[k].s, plateaus[k], at_plateau[k].A, below_plateau[k].B}, 2});
    out.jump_intervals.push_back({at_plateau[k].s, below_plateau[k].s, plateaus[k]});
  }
  std::sort(rows.begin(), rows.end(), [](const Tagged& a, const Tagged& b) {
    if (a.row.t != b.row.t) return a.row.t > b.row.t;
    return a.jump < b.jump;
  });

  // Bisect in t wherever one step carries more than twice the nominal volume,
  // since heavy cells near extrema otherwise enter all at once, and wherever
  // dt/ds changes by more than kSlopeRatio between neighbouring steps, since
  // t(s) bends like ln s next to a cone core and linear interpolation there
  // needs finer rows.
  constexpr double kSlopeRatio = 1.05;
  const double volume_estimate = an.tail ? an.measure(-kInf).s : an.measure(an.boundary_level).s;
  const double nominal = volume_estimate / options.n_thresholds;
  const double finest = nominal / 32.0;
  for (int round = 0; round < 60; ++round) {
    std::vector<double> extra;
    auto split = [&](const LevelSetSummary::Row& p, const LevelSetSummary::Row& c) {
      const double mid = 0.5 * (p.t + c.t);
      if (mid < p.t && mid > c.t) extra.push_back(mid);
    };
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto& p = rows[k - 1].row;
      const auto& c = rows[k].row;
      if (p.t == c.t) continue;
      if (c.s - p.s > 2.0 * nominal) {
        split(p, c);
        continue;
      }
      if (k + 1 >= rows.size()) continue;
      const auto& n = rows[k + 1].row;
      if (n.t == c.t || !std::isfinite(p.t) || !std::isfinite(n.t)) continue;
      const double ds0 = c.s - p.s, ds1 = n.s - c.s;
      if (ds0 <= 0.0 || ds1 <= 0.0 || std::max(ds0, ds1) <= finest) continue;
      const double r = ((p.t - c.t) / ds0) / ((c.t - n.t) / ds1);
      if (r > kSlopeRatio || r < 1.0 / kSlopeRatio) {
        if (ds0 > finest) split(p, c);
        if (ds1 > finest) split(c, n);
      }
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    if (extra.empty()) break;
    std::vector<Measure> me(extra.size());
    parallel_for(extra.size(), [&](std::size_t k) { me[k] = an.measure(extra[k]); });
    for (std::size_t k = 0; k < extra.size(); ++k)
      rows.push_back({{me[k].s, extra[k], me[k].A, me[k].B}, 0});
    std::sort(rows.begin(), rows.end(), [](const Tagged& a, const Tagged& b) {
      if (a.row.t != b.row.t) return a.row.t > b.row.t;
      return a.jump < b.jump;
    });
  }

  const bool has_core = !an.cores.empty();
  const double t_first = has_core ? kInf : an.top_level;
  auto& table = out.table;
  table.push_back({0.0, t_first, 0.0, 0.0});
  for (const auto& r : rows) {
    if (r.row.t == t_first) continue;
    table.push_back(r.row);
  }
  double total_curvature = table.back().A;
  if (an.tail) {
    const Measure all = an.measure(-kInf);
    total_curvature = all.A;
    table.push_back({all.s, -kInf, all.A, kInf});
    out.tail_scale = an.tail->m;
    out.tail_beta = an.tail->beta;
    out.tail_curvature = an.tail->curvature;
    out.tail_volume = an.tail->full_mass();
    out.tail_model_error = an.tail_error;
    out.has_tail = true;
  }
  // Guard against rounding making s decrease between adjacent rows.
  for (std::size_t k = 1; k < table.size(); ++k) table[k].s = std::max(table[k].s, table[k - 1].s);

  out.total_volume = table.back().s;
  out.total_curvature = total_curvature;
  out.captured_volume = an.tail ? out.total_volume - out.tail_volume : out.total_volume;
  for (const auto& core : an.cores) out.core_volume += core.full_mass();

  for (std::size_t k = 1; k < table.size(); ++k) {
    const bool jump = table[k].t == table[k - 1].t;
    if (!jump && table[k].s - table[k - 1].s > 4.0 * nominal)
      throw InvalidInput("thresholds under-resolve u near t = " + std::to_string(table[k].t) +
                         "; use fewer thresholds or a finer grid");
  }

  for (const auto& r : table) {
    if (!std::isfinite(r.t)) continue;
    out.t.push_back(r.t);
    out.s_of_t.push_back(r.s);
    out.B_of_t.push_back(r.B);
    out.A_of_t.push_back(r.A);
  }

  const int M = options.n_s_intervals;
  out.s_uniform.resize(M + 1);
  out.t_of_s.resize(M + 1);
  out.A_of_s.resize(M + 1);
  out.B_of_s.resize(M + 1);
  for (int j = 0; j <= M; ++j) {
    const double s = j == M ? out.total_volume : out.total_volume * j / M;
    out.s_uniform[j] = s;
    out.t_of_s[j] = out.interpolate_t(s);
    out.A_of_s[j] = out.interpolate_A(s);
    out.B_of_s[j] = out.interpolate_B(s);
  }
  return out;
}

SlopeBandReport slope_band_check(const LevelSetSummary& summary, const CurvatureBand& band) {
  SlopeBandReport rep;
  const auto& s = summary.s_uniform;
  const auto& A = summary.A_of_s;
  if (s.size() < 2) throw InvalidInput("summary has no s-grid");
  rep.min_slope = kInf;
  rep.max_slope = -kInf;
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    const double ds = s[j + 1] - s[j];
    if (!(ds > 0.0)) continue;
    const double slope = (A[j + 1] - A[j]) / ds;
    rep.min_slope = std::min(rep.min_slope, slope);
    rep.max_slope = std::max(rep.max_slope, slope);
    rep.max_violation = std::max({rep.max_violation, band.a() - slope, slope - band.b()});
  }
  rep.spacing_effect = summary.curvature_error;
  const double floor = 1e-9 * std::max({1.0, std::abs(band.a()), std::abs(band.b())});
  rep.tolerance = 10.0 * rep.spacing_effect + floor;
  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

BPrimeReport b_prime_check(const LevelSetSummary& summary) {
  BPrimeReport rep;
  const auto& s = summary.s_uniform;
  const auto& B = summary.B_of_s;
  std::vector<double> errors;
  // The last interval ends at B = inf when the exterior is completed.
  const std::size_t last = s.size() - 1;
  for (std::size_t j = 0; j + 1 < last; ++j) {
    const double ds = s[j + 1] - s[j];
    if (!(ds > 0.0) || !std::isfinite(B[j + 1])) continue;
    const double t = summary.interpolate_t(0.5 * (s[j] + s[j + 1]));
    if (!std::isfinite(t)) continue;
    const double expected = std::exp(-2.0 * t);
    const double fd = (B[j + 1] - B[j]) / ds;
    errors.push_back(std::abs(fd - expected) / expected);
  }
  rep.samples = static_cast<int>(errors.size());
  if (errors.empty()) return rep;
  rep.max_relative_error = *std::max_element(errors.begin(), errors.end());
  rep.median_relative_error = median(errors);
  rep.pass = rep.median_relative_error < kBPrimeMedianTolerance;
  return rep;
}

namespace {

double e_value(double t, double B) {
  if (B == 0.0) return 0.0;
  if (!std::isfinite(t) || !std::isfinite(B)) return 0.0;
  return std::exp(2.0 * t) * B;
}

}  // namespace

double key_inequality_tolerance(const LevelSetSummary& summary) {
  // The B' discrepancy measures how well the cell sums resolve the level sets;
  // the E10 left side differentiates the same (s, B) pairs.
  const BPrimeReport bp = b_prime_check(summary);
  return kKeyInequalityErrorFactor * bp.median_relative_error + 1e-9;
}

KeyInequalityReport key_inequality_check(const LevelSetSummary& summary, double alpha_eff) {
  KeyInequalityReport rep;
  const auto& s = summary.s_uniform;
  const std::size_t M = s.size() - 1;
  rep.min_margin = kInf;
  for (std::size_t j = 0; j < M; ++j) {
    const double ds = s[j + 1] - s[j];
    if (!(ds > 0.0)) continue;
    const double e0 = e_value(summary.t_of_s[j], summary.B_of_s[j]);
    const double e1 = e_value(summary.t_of_s[j + 1], summary.B_of_s[j + 1]);
    const double mid = 0.5 * (s[j] + s[j + 1]);
    const double lhs = (e1 - e0) / ds;
    const double rhs = 1.0 + alpha_eff - summary.integrate_A(s[j], s[j + 1]) / ds / (2.0 * kPi);
    rep.s_mid.push_back(mid);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.min_margin = std::min(rep.min_margin, lhs - rhs);
  }
  const double integral_A = summary.integrate_A(0.0, summary.total_volume);
  rep.defect = (1.0 + alpha_eff) * summary.total_volume - integral_A / (2.0 * kPi);
  rep.tolerance = key_inequality_tolerance(summary);
  rep.pass = rep.min_margin > -rep.tolerance;
  return rep;
}

double iso_deficit(const GriddedMetric& grid, double t) {
  const double h = grid.cell_size();
  const ContourStats st = trace_superlevel(grid.u_values(), grid.n(), h, -grid.half_width(), t);
  if (st.inside_samples == 0) throw InvalidInput("superlevel set is empty");
  if (st.inside_samples == static_cast<long>(grid.u_values().size()))
    throw InvalidInput("superlevel set covers the window");
  if (st.touches_boundary) throw InvalidInput("superlevel set leaves the window");
  return st.perimeter * st.perimeter - 4.0 * kPi * st.area;
}

double mean_deficit(const GriddedMetric& grid, const LevelSetSummary& summary,
                    std::span<const double> volume_fractions) {
  if (volume_fractions.empty()) throw InvalidInput("no volume fractions given");
  double sum = 0.0;
  for (double f : volume_fractions) {
    if (!(f > 0.0 && f < 1.0)) throw InvalidInput("volume fractions must lie in (0, 1)");
    sum += iso_deficit(grid, summary.interpolate_t(f * summary.captured_volume));
  }
  return sum / static_cast<double>(volume_fractions.size());
}

}  // namespace conicvol::levelset
