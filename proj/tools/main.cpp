#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "conicvol/error.hpp"
#include "job_config.hpp"

namespace {

using conicvol::cli::Command;
using conicvol::cli::JobConfig;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw conicvol::InvalidInput(std::string("bad number in ") + what + ": '" + item + "'");
    values.push_back(v);
  }
  return values;
}

conicvol::levelset::Bump parse_bump(const std::string& text) {
  const auto v = parse_list(text, "--bump");
  if (v.size() != 4) throw conicvol::InvalidInput("--bump takes amplitude,width,x,y");
  return {v[0], v[1], v[2], v[3]};
}

// Options bind into `flags`; after parsing, each option that was given copies
// its field onto the effective config so it overrides a --config file.
struct Binder {
  JobConfig flags;
  std::vector<std::pair<CLI::Option*, std::function<void(JobConfig&)>>> copies;
  // Raw text of list-valued options, parsed after CLI11 is done.
  std::string orders, family, fractions;
  std::vector<std::string> bumps;

  template <class T>
  void add(CLI::App* app, const std::string& name, T JobConfig::*field, const std::string& help) {
    auto* opt = app->add_option(name, flags.*field, help);
    copies.emplace_back(opt, [this, field](JobConfig& c) { c.*field = flags.*field; });
  }
  void add_orders(CLI::App* app) {
    auto* opt = app->add_option("--orders", orders, "comma-separated cone orders in (-1, 0]; empty for none")
                    ->expected(0, 1)
                    ->allow_extra_args(false);
    copies.emplace_back(opt, [this](JobConfig& c) { c.orders = parse_list(orders, "--orders"); });
  }
  void apply(JobConfig& c) const {
    for (const auto& [opt, copy] : copies)
      if (opt->count() > 0) copy(c);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume bounds, extremal metrics and level-set checks for conic spheres"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  Binder bind;
  std::string config_path;
  bool dump_config = false;
  app.add_option("--config", config_path, "load the job from a JSON config; explicit flags override it");
  app.add_flag("--dump-config", dump_config, "print the effective job config as JSON and exit");
  bind.add(&app, "--out", &JobConfig::out, "directory for output artifacts");
  bind.add(&app, "--seed", &JobConfig::seed, "seed for randomized checks");
  {
    auto* opt = app.add_flag("--svg", bind.flags.svg, "also write SVG plots (with --out)");
    bind.copies.emplace_back(opt, [&bind](JobConfig& c) { c.svg = bind.flags.svg; });
  }

  auto* bounds = app.add_subcommand("bounds", "volume bounds for a divisor and curvature band");
  bind.add_orders(bounds);
  bind.add(bounds, "--a", &JobConfig::a, "lower curvature bound");
  bind.add(bounds, "--b", &JobConfig::b, "upper curvature bound");

  auto* minvol = app.add_subcommand("minvol", "minimal volume under |K| <= 1");
  bind.add_orders(minvol);

  auto model_options = [&](CLI::App* sub) {
    bind.add(sub, "--kind", &JobConfig::kind, "model kind: Vab, V0b, Vmin, Vmax or MinVol");
    bind.add_orders(sub);
    bind.add(sub, "--a", &JobConfig::a, "lower curvature bound");
    bind.add(sub, "--b", &JobConfig::b, "upper curvature bound");
  };
  auto* build = app.add_subcommand("build", "build an extremal metric and export it");
  model_options(build);
  auto* verify = app.add_subcommand("verify", "check the invariants of an extremal metric");
  model_options(verify);

  auto* levelset = app.add_subcommand("levelset", "level-set analysis of a sampled metric");
  model_options(levelset);
  bind.add(levelset, "--L", &JobConfig::half_width, "window half-width");
  bind.add(levelset, "--N", &JobConfig::n, "cells per side (even)");
  bind.add(levelset, "--thresholds", &JobConfig::thresholds, "number of quantile thresholds");
  bind.add(levelset, "--intervals", &JobConfig::intervals, "intervals of the uniform volume grid");
  bind.add(levelset, "--mask-radius", &JobConfig::mask_radius_cells, "cone core radius in cells");
  bind.add(levelset, "--grid", &JobConfig::grid_file, "read the raster from a grid file");
  bind.add(levelset, "--save-grid", &JobConfig::save_grid, "write the sampled raster (.bin for binary)");
  {
    auto* opt = levelset->add_option("--bump", bind.bumps, "add a Gaussian bump amplitude,width,x,y to u")
                    ->allow_extra_args(false);
    bind.copies.emplace_back(opt, [&bind](JobConfig& c) {
      c.bumps.clear();
      for (const auto& text : bind.bumps) c.bumps.push_back(parse_bump(text));
    });
    auto* fam = levelset->add_option("--family", bind.family,
                                     "deficit diagnostic: comma-separated bump amplitudes");
    bind.copies.emplace_back(fam, [&bind](JobConfig& c) { c.family = parse_list(bind.family, "--family"); });
    auto* fr = levelset->add_option("--fractions", bind.fractions,
                                    "volume fractions for the mean isoperimetric deficit");
    bind.copies.emplace_back(fr, [&bind](JobConfig& c) {
      c.deficit_fractions = parse_list(bind.fractions, "--fractions");
    });
  }

  auto* lemma = app.add_subcommand("lemma", "extremal functional bound against brute force");
  bind.add(lemma, "--V", &JobConfig::V, "interval length");
  bind.add(lemma, "--chi", &JobConfig::chi, "end value f(V)");
  bind.add(lemma, "--a", &JobConfig::a, "lower slope bound");
  bind.add(lemma, "--b", &JobConfig::b, "upper slope bound");
  bind.add(lemma, "--n", &JobConfig::segments, "segments of the brute-force profile");
  bind.add(lemma, "--restarts", &JobConfig::restarts, "random-search restarts");
  bind.add(lemma, "--steps", &JobConfig::steps, "random-search steps per restart");

  auto* sweep = app.add_subcommand("sweep", "bounds over a lattice of curvature bands");
  bind.add_orders(sweep);
  bind.add(sweep, "--a-min", &JobConfig::a_min, "smallest a");
  bind.add(sweep, "--a-max", &JobConfig::a_max, "largest a");
  bind.add(sweep, "--a-steps", &JobConfig::a_steps, "lattice points in a");
  bind.add(sweep, "--b-min", &JobConfig::b_min, "smallest b");
  bind.add(sweep, "--b-max", &JobConfig::b_max, "largest b");
  bind.add(sweep, "--b-steps", &JobConfig::b_steps, "lattice points in b");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? conicvol::cli::kOk : conicvol::cli::kConfigError;
  }

  JobConfig config;
  try {
    bool have_command = false;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw conicvol::InvalidInput("cannot open config " + config_path);
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw conicvol::InvalidInput(std::string("config is not valid JSON: ") + e.what());
      }
      config = conicvol::cli::config_from_json(doc);
      have_command = doc.contains("command");
    }
    if (!app.get_subcommands().empty()) {
      config.command = conicvol::cli::parse_command(app.get_subcommands().front()->get_name());
      have_command = true;
    }
    if (!have_command) throw conicvol::InvalidInput("no command given; see --help");
    bind.apply(config);
  } catch (const conicvol::InvalidInput& e) {
    std::cerr << "conicvol: " << e.what() << '\n';
    return conicvol::cli::kConfigError;
  }

  if (dump_config) {
    std::cout << conicvol::cli::to_json(config).dump(2) << '\n';
    return conicvol::cli::kOk;
  }
  return conicvol::cli::run_and_print(config, std::cout, std::cerr);
}
