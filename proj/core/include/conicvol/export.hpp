#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conicvol/bounds.hpp"
#include "conicvol/divisor.hpp"
#include "conicvol/extremal.hpp"
#include "conicvol/levelset.hpp"
#include "conicvol/radial.hpp"

// JSON documents, CSV tables and SVG line plots for library results.
// Non-finite numbers are written to JSON as the strings "inf", "-inf", "nan".
namespace conicvol::io {

using nlohmann::json;

json number(double value);

json to_json(const Divisor& divisor);
json to_json(const BoundsReport& report);
json to_json(const extremal::RadialPiece& piece);
json to_json(const extremal::PiecewiseRadialMetric& metric);
json to_json(const extremal::RegularityReport& report);
json to_json(const geometry::Integral& integral);
json to_json(const geometry::ConeOrderEstimate& estimate);
json to_json(const levelset::SlopeBandReport& report);
json to_json(const levelset::BPrimeReport& report);
/// Scalar fields only; the per-interval arrays go to CSV.
json to_json(const levelset::KeyInequalityReport& report);
/// Scalar fields and jump intervals; the arrays go to CSV.
json summary_json(const levelset::LevelSetSummary& summary);

/// Rebuilds a metric from its JSON document by rerunning the construction
/// from (kind, alpha, beta, a, b) and checking the stored gluing radius.
extremal::PiecewiseRadialMetric metric_from_json(const json& doc);

struct ProfileSample {
  double rho, u, e2u, K;
};

/// Samples at `count` log-spaced radii over [exp(xi_min), exp(xi_max)].
std::vector<ProfileSample> sample_profile(const extremal::PiecewiseRadialMetric& metric,
                                          double xi_min = -6.0, double xi_max = 6.0,
                                          int count = 401);

/// Columns rho,u,e2u,K.
void write_profile_csv(std::ostream& out, const std::vector<ProfileSample>& samples);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 400;
};

/// Polyline SVG with axes and min/max tick labels. Non-finite points break
/// the line.
void write_svg(std::ostream& out, const std::vector<Series>& series, const PlotOptions& options);

}  // namespace conicvol::io
