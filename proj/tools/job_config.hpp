#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conicvol/levelset.hpp"

namespace conicvol::cli {

enum class Command { bounds, minvol, build, verify, levelset, lemma, sweep };

std::string to_string(Command c);
Command parse_command(const std::string& name);

/// Everything one invocation needs. Fields irrelevant to the command are
/// ignored but still round-trip through JSON.
struct JobConfig {
  Command command = Command::bounds;

  // Divisor and band.
  std::vector<double> orders;
  double a = -1.0;
  double b = 1.0;

  // Model kind for build, verify and levelset.
  std::string kind = "MinVol";

  // Level-set grid.
  double half_width = 20.0;
  int n = 1024;
  int thresholds = 1024;
  int intervals = 256;
  int mask_radius_cells = levelset::kDefaultMaskRadiusCells;
  std::string grid_file;  // read the raster from here instead of a model
  std::string save_grid;  // write the sampled raster here
  std::vector<levelset::Bump> bumps;
  // Deficit diagnostic: one member per amplitude, each adding a bump of that
  // amplitude (with the first bump's width and centre) to the model.
  std::vector<double> family;
  std::vector<double> deficit_fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  // Lemma.
  double V = 10.0;
  double chi = 4.0;
  int segments = 1000;
  int restarts = 200;
  int steps = 10'000;

  // Sweep lattice.
  double a_min = -2.0;
  double a_max = 1.0;
  int a_steps = 13;
  double b_min = 0.5;
  double b_max = 2.0;
  int b_steps = 7;

  // Output.
  std::string out;  // directory for artifacts; empty prints JSON only
  bool svg = false;
  std::uint64_t seed = 1;

  friend bool operator==(const JobConfig&, const JobConfig&);
};

nlohmann::json to_json(const JobConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
JobConfig config_from_json(const nlohmann::json& doc);

}  // namespace conicvol::cli
