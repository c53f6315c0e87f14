#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "conicvol/bounds.hpp"
#include "conicvol/error.hpp"
#include "conicvol/export.hpp"
#include "conicvol/extremal.hpp"
#include "conicvol/grid_io.hpp"
#include "conicvol/lemma.hpp"
#include "conicvol/levelset.hpp"
#include "conicvol/parallel.hpp"
#include "conicvol/verify.hpp"

namespace conicvol::cli {

namespace {

using nlohmann::json;
using io::number;
using levelset::format_double;

Divisor divisor_of(const JobConfig& c) { return Divisor::from_orders(c.orders); }

json band_json(double a, double b) { return {{"a", a}, {"b", b}}; }

std::filesystem::path out_dir(const JobConfig& c) {
  std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  f << text;
  if (!f) throw InvalidInput("error writing " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

RunResult run_bounds(const JobConfig& c) {
  const Divisor d = divisor_of(c);
  const CurvatureBand band(c.a, c.b);
  const BoundsReport rep = volume_bounds(d, band);
  RunResult r;
  r.report = io::to_json(rep);
  r.report["divisor"] = io::to_json(d);
  r.report["band"] = band_json(c.a, c.b);
  const auto roots = volume_constraint_roots(d.alpha(), d.beta(), c.a, c.b);
  r.report["constraint_roots"] = {{"lower", roots.lower ? json(*roots.lower) : json(nullptr)},
                                  {"upper", roots.upper ? json(*roots.upper) : json(nullptr)}};
  if (c.a > 0.0) {
    const auto p = pinching_details(d, band);
    r.report["pinching"] = {{"feasible", p.feasible}, {"ratio", p.ratio}, {"limit", p.limit},
                            {"discriminant", p.discriminant}, {"routes_agree", p.routes_agree}};
  }
  if (!rep.feasible) r.exit_code = kInfeasible;
  return r;
}

RunResult run_minvol(const JobConfig& c) {
  const Divisor d = divisor_of(c);
  const double v = min_vol(d);
  const auto rep = volume_bounds(d, CurvatureBand(-1.0, 1.0));
  RunResult r;
  r.report = {{"min_vol", v},
              {"alpha", d.alpha()},
              {"beta", d.beta()},
              {"divisor", io::to_json(d)},
              {"bounds_v_lower", rep.v_lower ? json(*rep.v_lower) : json(nullptr)},
              {"outside_hypotheses", rep.outside_hypotheses}};
  return r;
}

extremal::PiecewiseRadialMetric model_of(const JobConfig& c) {
  return extremal::build_extremal(extremal::parse_model_kind(c.kind), divisor_of(c), CurvatureBand(c.a, c.b));
}

RunResult run_build(const JobConfig& c) {
  const auto metric = model_of(c);
  RunResult r;
  r.report = io::to_json(metric);
  r.report["volume_quadrature"] = io::to_json(geometry::volume(metric.profile()));
  if (!c.out.empty()) {
    const auto dir = out_dir(c);
    write_json_file(dir / "model.json", io::to_json(metric));
    const auto samples = io::sample_profile(metric);
    std::ostringstream csv;
    io::write_profile_csv(csv, samples);
    write_file(dir / "profile.csv", csv.str());
    json files = {"model.json", "profile.csv"};
    if (c.svg) {
      io::Series e2u{"e^{2u}", {}, {}}, K{"K", {}, {}};
      for (const auto& s : samples) {
        e2u.x.push_back(s.rho);
        e2u.y.push_back(s.e2u);
        K.x.push_back(s.rho);
        K.y.push_back(s.K);
      }
      const std::string name(extremal::to_string(metric.kind));
      std::ostringstream a, b;
      io::write_svg(a, {e2u}, {name + " conformal factor", "rho", "e^{2u}", true});
      io::write_svg(b, {K}, {name + " curvature", "rho", "K", true});
      write_file(dir / "profile_e2u.svg", a.str());
      write_file(dir / "profile_K.svg", b.str());
      files.push_back("profile_e2u.svg");
      files.push_back("profile_K.svg");
    }
    r.report["files"] = files;
  }
  return r;
}

RunResult run_verify(const JobConfig& c) {
  const auto metric = model_of(c);
  const auto v = extremal::verify_model(metric);
  RunResult r;
  r.report = {{"model", io::to_json(metric)},
              {"regularity", io::to_json(v.regularity)},
              {"gauss_bonnet", {{"value", v.gauss_bonnet.value},
                                {"expected", v.expected_gauss_bonnet},
                                {"relative_error", v.gauss_bonnet_error},
                                {"pass", v.pass_gauss_bonnet}}},
              {"volume", {{"value", v.volume.value},
                          {"expected", v.expected_volume},
                          {"relative_error", v.volume_error},
                          {"pass", v.pass_volume}}},
              {"curvature_band", {{"min", v.curvature_min},
                                  {"max", v.curvature_max},
                                  {"violation", v.band_violation},
                                  {"pass", v.pass_band}}},
              {"finite_difference_curvature", {{"max_error", v.finite_difference_error},
                                               {"pass", v.pass_finite_difference}}},
              {"cone_orders", {{"origin", io::to_json(v.cone_origin)},
                               {"infinity", io::to_json(v.cone_infinity)},
                               {"pass", v.pass_cone_orders}}},
              {"pass", v.pass()}};
  if (!c.out.empty()) write_json_file(out_dir(c) / "verify.json", r.report);
  if (!v.pass()) r.exit_code = kToleranceFailure;
  return r;
}

// ---------------------------------------------------------------------------
// Level sets

struct LevelsetRun {
  json report;
  bool pass = false;
  double volume = 0.0;
  double mean_deficit = NAN;
  levelset::LevelSetSummary summary;
  levelset::KeyInequalityReport key;
};

std::pair<double, double> measured_band(const levelset::GriddedMetric& grid) {
  double lo = INFINITY, hi = -INFINITY;
  const auto K = grid.curvature_values();
  for (std::size_t k = 0; k < K.size(); ++k) {
    if (grid.mask()[k]) continue;
    lo = std::min(lo, K[k]);
    hi = std::max(hi, K[k]);
  }
  return {lo, hi};
}

LevelsetRun analyse_grid(const JobConfig& c, const levelset::GriddedMetric& grid, bool use_config_band) {
  levelset::SummaryOptions opts;
  opts.n_thresholds = c.thresholds;
  opts.n_s_intervals = c.intervals;
  LevelsetRun run;
  run.summary = levelset::summarize(grid, opts);
  const auto& s = run.summary;
  auto [lo, hi] = use_config_band ? std::pair{c.a, c.b} : measured_band(grid);
  const auto slope = levelset::slope_band_check(s, CurvatureBand(lo, hi));
  const auto bp = levelset::b_prime_check(s);
  run.key = levelset::key_inequality_check(s, grid.alpha_eff());
  const double defect_limit = 1e-3 * s.total_volume;
  run.volume = s.total_volume;
  run.report = {{"summary", io::summary_json(s)},
                {"band", band_json(lo, hi)},
                {"band_source", use_config_band ? "config" : "measured"},
                {"slope_band", io::to_json(slope)},
                {"b_prime", io::to_json(bp)},
                {"key_inequality", io::to_json(run.key)}};
  if (!c.deficit_fractions.empty()) {
    try {
      run.mean_deficit = levelset::mean_deficit(grid, s, c.deficit_fractions);
      run.report["mean_deficit"] = number(run.mean_deficit);
    } catch (const InvalidInput& e) {
      run.report["mean_deficit"] = nullptr;
      run.report["mean_deficit_error"] = e.what();
    }
  }
  run.pass = slope.pass && bp.pass && run.key.pass;
  run.report["defect_within_equality_tolerance"] = std::abs(run.key.defect) < defect_limit;
  run.report["pass"] = run.pass;
  return run;
}

RunResult run_levelset(const JobConfig& c) {
  if (c.n < 4 || c.n % 2 != 0) throw InvalidInput("--N must be even and at least 4");
  if (!(c.half_width > 0.0)) throw InvalidInput("--L must be positive");
  if (c.thresholds < 2 || c.intervals < 2) throw InvalidInput("--thresholds and --intervals must be at least 2");
  RunResult r;
  const levelset::GridSpec spec{c.half_width, c.n};

  if (!c.family.empty()) {
    if (!c.grid_file.empty()) throw InvalidInput("a deficit family needs a model, not a grid file");
    const auto metric = model_of(c);
    const levelset::Bump shape = c.bumps.empty() ? levelset::Bump{0.0, 0.5, 0.7, 0.0} : c.bumps.front();
    json members = json::array();
    std::ostringstream csv;
    csv << "amplitude,volume,mean_deficit,key_inequality_pass\n";
    std::vector<double> deficits;
    for (double amp : c.family) {
      levelset::Bump b = shape;
      b.amplitude = amp;
      const auto grid = levelset::sample_perturbed(metric, spec, {b}, c.mask_radius_cells);
      auto run = analyse_grid(c, grid, false);
      deficits.push_back(run.mean_deficit);
      members.push_back({{"amplitude", amp}, {"volume", run.volume}, {"mean_deficit", number(run.mean_deficit)},
                         {"key_inequality_pass", run.key.pass}});
      csv << format_double(amp) << ',' << format_double(run.volume) << ',' << format_double(run.mean_deficit)
          << ',' << (run.key.pass ? 1 : 0) << '\n';
    }
    bool monotone = true;
    for (std::size_t k = 1; k < deficits.size(); ++k)
      monotone = monotone && std::isfinite(deficits[k]) && deficits[k] < deficits[k - 1];
    r.report = {{"model", io::to_json(metric)},
                {"extremal_volume", metric.target_volume},
                {"members", members},
                {"deficit_decreasing", monotone}};
    if (!c.out.empty()) {
      const auto dir = out_dir(c);
      write_file(dir / "family.csv", csv.str());
      write_json_file(dir / "report.json", r.report);
    }
    if (!monotone) r.exit_code = kToleranceFailure;
    return r;
  }

  std::optional<levelset::GriddedMetric> grid;
  std::optional<extremal::PiecewiseRadialMetric> metric;
  if (!c.grid_file.empty()) {
    grid = levelset::read_grid(c.grid_file);
  } else {
    metric = model_of(c);
    grid = levelset::sample_perturbed(*metric, spec, c.bumps, c.mask_radius_cells);
  }
  if (!c.save_grid.empty()) levelset::write_grid(c.save_grid, *grid);
  const bool config_band = metric.has_value() && c.bumps.empty();
  auto run = analyse_grid(c, *grid, config_band);
  r.report = run.report;
  if (metric) {
    r.report["model"] = io::to_json(*metric);
    r.report["extremal_volume"] = metric->target_volume;
  }
  if (!c.out.empty()) {
    const auto dir = out_dir(c);
    std::ostringstream t, s;
    levelset::write_threshold_csv(t, run.summary);
    levelset::write_reparameterized_csv(s, run.summary, run.key);
    write_file(dir / "thresholds.csv", t.str());
    write_file(dir / "reparameterized.csv", s.str());
    write_json_file(dir / "report.json", r.report);
    json files = {"thresholds.csv", "reparameterized.csv", "report.json"};
    if (c.svg) {
      io::Series A{"A(s)", run.summary.s_uniform, run.summary.A_of_s};
      io::Series lhs{"d/ds[e^{2t}B]", run.key.s_mid, run.key.lhs};
      io::Series rhs{"1+alpha-A/(2pi)", run.key.s_mid, run.key.rhs};
      std::ostringstream a, b;
      io::write_svg(a, {A}, {"curvature integral against volume", "s", "A", false});
      io::write_svg(b, {lhs, rhs}, {"key inequality", "s", "value", false});
      write_file(dir / "A_of_s.svg", a.str());
      write_file(dir / "key_inequality.svg", b.str());
      files.push_back("A_of_s.svg");
      files.push_back("key_inequality.svg");
    }
    r.report["files"] = files;
  }
  if (!run.pass) r.exit_code = kToleranceFailure;
  return r;
}

// ---------------------------------------------------------------------------

RunResult run_lemma(const JobConfig& c) {
  const double bound = lemma::lemma_bound(c.V, c.chi, c.a, c.b);
  const auto bb = lemma::bang_bang(c.V, c.chi, c.a, c.b);
  const double greedy = lemma::brute_force_max(c.V, c.chi, c.a, c.b, c.segments);
  lemma::RandomSearchOptions opts;
  opts.restarts = c.restarts;
  opts.steps = c.steps;
  opts.seed = c.seed;
  const double search = lemma::random_search_max(c.V, c.chi, c.a, c.b, c.segments, opts);
  const double slack = 1e-12 * std::max(1.0, std::abs(bound));
  const bool certified = greedy <= bound + slack && search <= bound + slack && search <= greedy + slack;
  RunResult r;
  r.report = {{"V", c.V},
              {"chi", c.chi},
              {"band", band_json(c.a, c.b)},
              {"segments", c.segments},
              {"bound", bound},
              {"breakpoint", lemma::breakpoint(c.V, c.chi, c.a, c.b)},
              {"bang_bang_integral", bb.integral()},
              {"greedy_max", greedy},
              {"random_search_max", search},
              {"gap", bound - greedy},
              {"seed", c.seed},
              {"certified", certified}};
  if (!c.out.empty()) write_json_file(out_dir(c) / "lemma.json", r.report);
  if (!certified) r.exit_code = kToleranceFailure;
  return r;
}

RunResult run_sweep(const JobConfig& c) {
  if (c.a_steps < 1 || c.b_steps < 1) throw InvalidInput("sweep steps must be positive");
  const Divisor d = divisor_of(c);
  const double limit = (1.0 + d.beta()) * (1.0 + d.beta()) / ((1.0 + d.alpha()) * (1.0 + d.alpha()));
  struct Point {
    double a, b;
    bool boundary;
  };
  auto lin = [](double lo, double hi, int steps, int k) {
    return steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1);
  };
  std::vector<Point> points;
  for (int j = 0; j < c.b_steps; ++j) {
    const double b = lin(c.b_min, c.b_max, c.b_steps, j);
    for (int i = 0; i < c.a_steps; ++i) {
      const double a = lin(c.a_min, c.a_max, c.a_steps, i);
      if (a <= b) points.push_back({a, b, false});
    }
    // The pinching boundary a = b (1+beta)^2/(1+alpha)^2 for this b.
    points.push_back({b * limit, b, true});
  }
  std::vector<std::string> rows(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    const auto& p = points[k];
    std::ostringstream row;
    row << format_double(p.a) << ',' << format_double(p.b) << ',' << (p.boundary ? 1 : 0) << ',';
    try {
      const auto rep = volume_bounds(d, CurvatureBand(p.a, p.b));
      row << to_string(rep.bounds_case) << ',' << (rep.feasible ? 1 : 0) << ','
          << (rep.v_lower ? format_double(*rep.v_lower) : "") << ','
          << (rep.v_upper ? format_double(*rep.v_upper) : "") << ',';
    } catch (const Error& e) {
      row << ",,,," << '"' << e.what() << '"';
    }
    rows[k] = row.str();
  });
  std::ostringstream csv;
  csv << "a,b,boundary,case,feasible,v_lower,v_upper,error\n";
  for (const auto& row : rows) csv << row << '\n';
  RunResult r;
  r.report = {{"divisor", io::to_json(d)}, {"points", points.size()}, {"pinching_limit", limit}};
  if (c.out.empty()) {
    r.stdout_text = csv.str();
  } else {
    write_file(out_dir(c) / "sweep.csv", csv.str());
    r.report["files"] = {"sweep.csv"};
  }
  return r;
}

}  // namespace

RunResult run(const JobConfig& config) {
  try {
    switch (config.command) {
      case Command::bounds: return run_bounds(config);
      case Command::minvol: return run_minvol(config);
      case Command::build: return run_build(config);
      case Command::verify: return run_verify(config);
      case Command::levelset: return run_levelset(config);
      case Command::lemma: return run_lemma(config);
      case Command::sweep: return run_sweep(config);
    }
    throw InvalidInput("unknown command");
  } catch (const Infeasible& e) {
    return {kInfeasible, {{"error", e.what()}, {"kind", "infeasible"}}, {}};
  } catch (const InvalidInput& e) {
    return {kConfigError, {{"error", e.what()}, {"kind", "invalid_input"}}, {}};
  } catch (const ToleranceFailure& e) {
    return {kToleranceFailure, {{"error", e.what()}, {"kind", "tolerance_failure"}}, {}};
  } catch (const std::filesystem::filesystem_error& e) {
    return {kConfigError, {{"error", e.what()}, {"kind", "io"}}, {}};
  } catch (const std::exception& e) {
    return {kInternalError, {{"error", e.what()}, {"kind", "internal"}}, {}};
  }
}

int run_and_print(const JobConfig& config, std::ostream& out, std::ostream& err) {
  RunResult r = run(config);
  if (r.report.contains("error")) err << "conicvol: " << r.report["error"].get<std::string>() << '\n';
  if (!r.stdout_text.empty())
    out << r.stdout_text;
  else
    out << r.report.dump(2) << '\n';
  return r.exit_code;
}

}  // namespace conicvol::cli
