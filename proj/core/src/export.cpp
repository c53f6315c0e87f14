#include "conicvol/export.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "conicvol/error.hpp"
#include "conicvol/grid_io.hpp"

namespace conicvol::io {

using levelset::format_double;

json number(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

namespace {

json optional_number(const std::optional<double>& value) {
  return value ? number(*value) : json(nullptr);
}

double read_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw InvalidInput("expected a number in JSON document");
}

}  // namespace

json to_json(const Divisor& divisor) {
  json orders = json::array();
  json labels = json::array();
  for (const auto& p : divisor.points()) {
    orders.push_back(p.order);
    labels.push_back(p.label);
  }
  return {{"orders", orders},
          {"labels", labels},
          {"degree", divisor.degree()},
          {"alpha", divisor.alpha()},
          {"beta", divisor.beta()},
          {"criticality", std::string(to_string(divisor.classify()))},
          {"weighted_euler", weighted_euler(divisor)}};
}

json to_json(const BoundsReport& r) {
  return {{"case", std::string(to_string(r.bounds_case))},
          {"v_lower", optional_number(r.v_lower)},
          {"v_upper", optional_number(r.v_upper)},
          {"chi", r.chi},
          {"feasible", r.feasible},
          {"outside_hypotheses", r.outside_hypotheses}};
}

json to_json(const extremal::RadialPiece& p) {
  return {{"kind", std::string(extremal::to_string(p.kind))},
          {"curvature", p.curvature},
          {"cone_order", p.cone_order},
          {"scale", p.scale},
          {"dilation", p.dilation},
          {"r_in", number(p.r_in)},
          {"r_out", number(p.r_out)}};
}

json to_json(const extremal::PiecewiseRadialMetric& m) {
  return {{"kind", std::string(extremal::to_string(m.kind))},
          {"alpha", m.alpha},
          {"beta", m.beta},
          {"a", m.a},
          {"b", m.b},
          {"target_volume", m.target_volume},
          {"glue_radius", number(m.glue_radius)},
          {"inner", m.inner ? to_json(*m.inner) : json(nullptr)},
          {"outer", m.outer ? to_json(*m.outer) : json(nullptr)}};
}

json to_json(const extremal::RegularityReport& r) {
  return {{"single_piece", r.single_piece},
          {"value_jump", number(r.value_jump)},
          {"slope_jump", number(r.slope_jump)},
          {"curvature_jump", number(r.curvature_jump)},
          {"pass", r.pass}};
}

json to_json(const geometry::Integral& i) {
  return {{"value", number(i.value)}, {"error", number(i.error)}};
}

json to_json(const geometry::ConeOrderEstimate& e) {
  return {{"order", number(e.order)},
          {"slope", number(e.slope)},
          {"drift", number(e.drift)},
          {"converged", e.converged}};
}

json to_json(const levelset::SlopeBandReport& r) {
  return {{"min_slope", number(r.min_slope)},
          {"max_slope", number(r.max_slope)},
          {"max_violation", number(r.max_violation)},
          {"spacing_effect", number(r.spacing_effect)},
          {"tolerance", number(r.tolerance)},
          {"pass", r.pass}};
}

json to_json(const levelset::BPrimeReport& r) {
  return {{"median_relative_error", number(r.median_relative_error)},
          {"max_relative_error", number(r.max_relative_error)},
          {"samples", r.samples},
          {"pass", r.pass}};
}

json to_json(const levelset::KeyInequalityReport& r) {
  return {{"min_margin", number(r.min_margin)},
          {"tolerance", number(r.tolerance)},
          {"defect", number(r.defect)},
          {"intervals", r.lhs.size()},
          {"pass", r.pass}};
}

json summary_json(const levelset::LevelSetSummary& s) {
  json jumps = json::array();
  for (const auto& j : s.jump_intervals)
    jumps.push_back({{"s_lo", number(j.s_lo)}, {"s_hi", number(j.s_hi)}, {"t", number(j.t)}});
  return {{"thresholds", s.t.size()},
          {"alpha_eff", s.alpha_eff},
          {"total_volume", number(s.total_volume)},
          {"captured_volume", number(s.captured_volume)},
          {"tail_volume", number(s.tail_volume)},
          {"tail_model_error", number(s.tail_model_error)},
          {"core_volume", number(s.core_volume)},
          {"boundary_level", number(s.boundary_level)},
          {"cell_size", s.cell_size},
          {"masked_area_fraction", s.masked_area_fraction},
          {"curvature_error", number(s.curvature_error)},
          {"total_curvature", number(s.total_curvature)},
          {"has_tail", s.has_tail},
          {"tail_curvature", number(s.tail_curvature)},
          {"tail_beta", number(s.tail_beta)},
          {"jump_intervals", jumps}};
}

extremal::PiecewiseRadialMetric metric_from_json(const json& doc) {
  try {
    const auto kind = extremal::parse_model_kind(doc.at("kind").get<std::string>());
    const double alpha = read_number(doc.at("alpha"));
    const double beta = read_number(doc.at("beta"));
    const double a = read_number(doc.at("a"));
    const double b = read_number(doc.at("b"));
    // A two-point divisor with these invariants: beta at infinity and alpha at
    // the origin. The empty divisor stands for alpha = beta = 0.
    std::vector<double> orders;
    if (alpha != 0.0 || beta != 0.0) orders = {alpha, beta};
    auto metric = extremal::build_extremal(kind, Divisor::from_orders(orders), CurvatureBand(a, b));
    if (doc.contains("glue_radius")) {
      const double r = read_number(doc.at("glue_radius"));
      const bool same = (std::isinf(r) && std::isinf(metric.glue_radius)) ||
                        std::abs(r - metric.glue_radius) <= 1e-9 * std::max(1.0, std::abs(r));
      if (!same) throw InvalidInput("stored gluing radius disagrees with the rebuilt model");
    }
    return metric;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed metric document: ") + e.what());
  }
}

std::vector<ProfileSample> sample_profile(const extremal::PiecewiseRadialMetric& metric,
                                          double xi_min, double xi_max, int count) {
  if (count < 2 || !(xi_max > xi_min)) throw InvalidInput("bad profile sampling range");
  std::vector<ProfileSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double xi = xi_min + (xi_max - xi_min) * k / (count - 1);
    const double rho = std::exp(xi);
    const double u = metric.u(xi);
    out.push_back({rho, u, std::exp(2.0 * u), metric.curvature(rho)});
  }
  return out;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileSample>& samples) {
  out << "rho,u,e2u,K\n";
  for (const auto& s : samples)
    out << format_double(s.rho) << ',' << format_double(s.u) << ',' << format_double(s.e2u) << ','
        << format_double(s.K) << '\n';
}

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<Series>& series, const PlotOptions& options) {
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double W = options.width, H = options.height;
  auto tx = [&](double x) { return options.log_x ? std::log10(x) : x; };
  auto usable = [&](double x, double y) {
    return std::isfinite(y) && std::isfinite(x) && (!options.log_x || x > 0.0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, tx(s.x[k]));
      x1 = std::max(x1, tx(s.x[k]));
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(options.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
      << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string xl = options.log_x ? "1e" : "";
  out << "<text x=\"" << left << "\" y=\"" << H - bottom + 15 << "\">" << xl << short_number(x0) << "</text>\n";
  out << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 15 << "\" text-anchor=\"end\">" << xl
      << short_number(x1) << "</text>\n";
  out << "<text x=\"" << left - 5 << "\" y=\"" << H - bottom << "\" text-anchor=\"end\">" << short_number(y0)
      << "</text>\n";
  out << "<text x=\"" << left - 5 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << short_number(y1)
      << "</text>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << escape(options.x_label)
      << "</text>\n";
  out << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
      << ")\" text-anchor=\"middle\">" << escape(options.y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
            << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        flush();
        continue;
      }
      points += short_number(px(s.x[i])) + "," + short_number(py(s.y[i])) + " ";
    }
    flush();
    out << "<text x=\"" << left + 10 << "\" y=\"" << top + 18 + 16 * static_cast<double>(k) << "\" fill=\""
        << color << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace conicvol::io
