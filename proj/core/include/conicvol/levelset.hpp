#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "conicvol/bounds.hpp"
#include "conicvol/extremal.hpp"

// Discrete level-set analysis of a conformal factor e^{2u} sampled on a square
// window of the plane: distribution functions of the superlevel sets
// Omega(t) = {u > t}, their reparameterization by enclosed volume s, and the
// differential and integral inequalities they satisfy.
namespace conicvol::levelset {

struct GridSpec {
  double half_width = 8.0;
  int n = 512;
};

// A finite cone point inside the window. Points with negative order are masked.
struct ConePoint {
  double x = 0.0;
  double y = 0.0;
  double order = 0.0;
};

inline constexpr int kDefaultMaskRadiusCells = 8;

/// N x N raster of u at cell centres over [-L, L]^2 (row-major, row = y).
///
/// Curvature per cell is either supplied analytically or derived from the
/// 5-point Laplacian, K = -Lap_h(u) e^{-2u}. The disk of the mask radius around
/// a cone point of negative order is excluded from sums; its content is
/// replaced by a radial model of constant curvature with that cone order.
class GriddedMetric {
 public:
  GriddedMetric(GridSpec spec, std::vector<double> u, std::vector<ConePoint> points,
                double alpha_eff, std::optional<double> beta_inf,
                std::optional<std::vector<double>> curvature = std::nullopt,
                int mask_radius_cells = kDefaultMaskRadiusCells);

  double half_width() const noexcept { return spec_.half_width; }
  int n() const noexcept { return spec_.n; }
  double cell_size() const noexcept { return 2.0 * spec_.half_width / spec_.n; }
  double x(int i) const noexcept { return -spec_.half_width + (i + 0.5) * cell_size(); }
  double y(int j) const noexcept { return x(j); }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * spec_.n + i; }

  std::span<const double> u_values() const noexcept { return u_; }
  double u(int i, int j) const noexcept { return u_[index(i, j)]; }

  std::span<const double> curvature_values() const noexcept { return curvature_; }
  bool curvature_is_analytic() const noexcept { return analytic_curvature_; }

  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  bool masked(int i, int j) const noexcept { return mask_[index(i, j)] != 0; }
  int mask_radius_cells() const noexcept { return mask_radius_cells_; }
  double masked_area_fraction() const noexcept;

  std::span<const ConePoint> points() const noexcept { return points_; }
  double alpha_eff() const noexcept { return alpha_eff_; }
  std::optional<double> beta_inf() const noexcept { return beta_inf_; }

  // Richardson estimate |Lap_h u - Lap_2h u| / 3 scaled by e^{-2u}, median over
  // interior cells; zero when curvature is analytic.
  double curvature_error_estimate() const noexcept { return curvature_error_; }

 private:
  GridSpec spec_;
  std::vector<double> u_;
  std::vector<ConePoint> points_;
  double alpha_eff_;
  std::optional<double> beta_inf_;
  std::vector<double> curvature_;
  bool analytic_curvature_ = false;
  std::vector<std::uint8_t> mask_;
  int mask_radius_cells_;
  double curvature_error_ = 0.0;
};

using PlaneFn = std::function<double(double, double)>;

/// Samples u (and K when given) at cell centres. N must be even so that no
/// centre falls on the origin.
GriddedMetric sample_grid(GridSpec spec, const PlaneFn& u, const PlaneFn& curvature,
                          std::vector<ConePoint> points, double alpha_eff,
                          std::optional<double> beta_inf,
                          int mask_radius_cells = kDefaultMaskRadiusCells);

/// Samples an extremal metric with its closed-form curvature; the cone of
/// order alpha sits at the origin and beta at infinity.
GriddedMetric sample_radial(const extremal::PiecewiseRadialMetric& metric, GridSpec spec,
                            int mask_radius_cells = kDefaultMaskRadiusCells);

/// Gaussian bump amplitude * exp(-|z - c|^2 / width^2) added to u.
struct Bump {
  double amplitude = 0.0;
  double width = 0.5;
  double x = 0.0;
  double y = 0.0;
  double value(double x, double y) const noexcept;
  double laplacian(double x, double y) const noexcept;
};

/// An extremal metric with bumps added to u. Curvature stays analytic:
/// K = (K_0 e^{2u_0} - Lap(bumps)) e^{-2u}. Bumps must decay well inside the
/// window so the exterior keeps the model's cone order at infinity.
GriddedMetric sample_perturbed(const extremal::PiecewiseRadialMetric& metric, GridSpec spec,
                               const std::vector<Bump>& bumps,
                               int mask_radius_cells = kDefaultMaskRadiusCells);

/// 5-point discrete curvature -Lap_h(u) e^{-2u}; edge cells copy their inward
/// neighbour.
std::vector<double> discrete_curvature(std::span<const double> u, int n, double h);

struct JumpInterval {
  double s_lo = 0.0;  // s(psi)
  double s_hi = 0.0;  // s(psi-)
  double t = 0.0;     // psi
};

struct SummaryOptions {
  int n_thresholds = 1024;
  int n_s_intervals = 256;
  // Minimum number of cells on one value for a plateau.
  int plateau_cells = 10;
};

/// Distribution functions of Omega(t) and their volume reparameterization.
struct LevelSetSummary {
  // Per threshold, t strictly decreasing. A jump threshold psi appears once
  // with the right-continuous values s(psi), B(psi), A(psi).
  std::vector<double> t;
  std::vector<double> s_of_t;
  std::vector<double> B_of_t;
  std::vector<double> A_of_t;
  std::vector<JumpInterval> jump_intervals;

  // Uniform grid s_j = j V / M, j = 0..M. t_of_s[0] = +inf and
  // t_of_s[M] = -inf when the window is tail-completed; B_of_s[M] may be +inf.
  std::vector<double> s_uniform;
  std::vector<double> t_of_s;
  std::vector<double> A_of_s;
  std::vector<double> B_of_s;

  double alpha_eff = 0.0;
  double total_volume = 0.0;       // V, including core and tail models
  double captured_volume = 0.0;    // s at the boundary level
  double tail_volume = 0.0;
  double tail_model_error = 0.0;   // estimated error of the tail volume
  double core_volume = 0.0;        // masked cone neighbourhoods
  double boundary_level = 0.0;     // t below which Omega(t) leaves the window
  double cell_size = 0.0;
  double masked_area_fraction = 0.0;
  double curvature_error = 0.0;    // from the grid
  double total_curvature = 0.0;    // A at s = V

  // Piecewise-linear evaluation used to build the uniform arrays. Outside the
  // sampled table the analytic core and tail models are used.
  struct Row {
    double s, t, A, B;
  };
  std::vector<Row> table;
  // Exterior model: constant curvature tail_curvature, cone order tail_beta at
  // infinity, scale tail_scale (see summarize).
  double tail_scale = 0.0;
  double tail_beta = 0.0;
  double tail_curvature = 0.0;
  bool has_tail = false;

  double interpolate_A(double s) const;
  // Exact integral of the piecewise-linear 𝔸 over [s0, s1].
  double integrate_A(double s0, double s1) const;
  double interpolate_B(double s) const;
  double interpolate_t(double s) const;
};

/// Builds the summary. Thresholds are u-quantiles at equal volume spacing.
///
/// Each cell enters Omega(t) with the exact area fraction of {u > t} for u
/// linear across the cell with the sampled gradient; plateau cells enter as a
/// step. When the grid carries
/// beta_inf, only the inscribed disk is sampled and the exterior is completed by
/// the radial metric of constant curvature (the median K near the circle) with
/// cone order beta_inf at infinity, its scale fitted to u near the circle.
/// Without beta_inf, thresholds stop at the boundary level.
///
/// Throws InvalidInput when the thresholds under-resolve the range of u (a
/// non-jump step carrying more than four times the nominal volume).
LevelSetSummary summarize(const GriddedMetric& grid, const SummaryOptions& options = {});
LevelSetSummary summarize(const GriddedMetric& grid, int n_thresholds);

struct SlopeBandReport {
  double min_slope = 0.0;
  double max_slope = 0.0;
  double max_violation = 0.0;  // distance of the worst slope outside [a, b]
  double spacing_effect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Finite-difference slopes of A(s) on the uniform s-grid against [a, b].
SlopeBandReport slope_band_check(const LevelSetSummary& summary, const CurvatureBand& band);

struct BPrimeReport {
  double median_relative_error = 0.0;
  double max_relative_error = 0.0;
  int samples = 0;
  bool pass = false;
};

inline constexpr double kBPrimeMedianTolerance = 0.02;

/// B'(s) by finite differences against e^{-2 t(s)} at interval midpoints.
BPrimeReport b_prime_check(const LevelSetSummary& summary);

struct KeyInequalityReport {
  std::vector<double> s_mid;
  std::vector<double> lhs;  // d/ds [e^{2t} B]
  std::vector<double> rhs;  // 1 + alpha - A / (2 pi), averaged over the interval
  double min_margin = 0.0;
  double tolerance = 0.0;
  double defect = 0.0;  // \int_0^V (1 + alpha - A/(2 pi)) ds
  bool pass = false;
};

/// The inequality d/ds[e^{2t} B] >= 1 + alpha - A/(2 pi) on each interval of
/// the uniform s-grid, both sides integrated over the interval, and the
/// integral defect, which must be <= 0.
KeyInequalityReport key_inequality_check(const LevelSetSummary& summary, double alpha_eff);

inline constexpr double kKeyInequalityErrorFactor = 20.0;

/// Grid-error tolerance for the pointwise margin: kKeyInequalityErrorFactor
/// times the median relative B' error of the same summary.
double key_inequality_tolerance(const LevelSetSummary& summary);

/// Isoperimetric deficit P^2 - 4 pi |Omega(t)| of the superlevel set traced by
/// marching squares; components are summed. Throws InvalidInput when the set
/// is empty, covers the raster, or leaves the window.
double iso_deficit(const GriddedMetric& grid, double t);

/// Mean deficit over the thresholds t(s) at the given volume fractions of the
/// captured volume.
double mean_deficit(const GriddedMetric& grid, const LevelSetSummary& summary,
                    std::span<const double> volume_fractions);

}  // namespace conicvol::levelset
