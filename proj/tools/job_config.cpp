#include "job_config.hpp"

#include <array>
#include <set>

#include "conicvol/error.hpp"

namespace conicvol::cli {

namespace {

constexpr std::array<std::pair<Command, const char*>, 7> kCommands{{
    {Command::bounds, "bounds"},
    {Command::minvol, "minvol"},
    {Command::build, "build"},
    {Command::verify, "verify"},
    {Command::levelset, "levelset"},
    {Command::lemma, "lemma"},
    {Command::sweep, "sweep"},
}};

bool same_bumps(const std::vector<levelset::Bump>& x, const std::vector<levelset::Bump>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k].amplitude != y[k].amplitude || x[k].width != y[k].width || x[k].x != y[k].x || x[k].y != y[k].y)
      return false;
  return true;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, text] : kCommands)
    if (name == text) return cmd;
  throw InvalidInput("unknown command: " + name);
}

bool operator==(const JobConfig& x, const JobConfig& y) {
  return x.command == y.command && x.orders == y.orders && x.a == y.a && x.b == y.b && x.kind == y.kind &&
         x.half_width == y.half_width && x.n == y.n && x.thresholds == y.thresholds &&
         x.intervals == y.intervals && x.mask_radius_cells == y.mask_radius_cells &&
         x.grid_file == y.grid_file && x.save_grid == y.save_grid && same_bumps(x.bumps, y.bumps) &&
         x.family == y.family && x.deficit_fractions == y.deficit_fractions && x.V == y.V && x.chi == y.chi &&
         x.segments == y.segments && x.restarts == y.restarts && x.steps == y.steps && x.a_min == y.a_min &&
         x.a_max == y.a_max && x.a_steps == y.a_steps && x.b_min == y.b_min && x.b_max == y.b_max &&
         x.b_steps == y.b_steps && x.out == y.out && x.svg == y.svg && x.seed == y.seed;
}

nlohmann::json to_json(const JobConfig& c) {
  nlohmann::json bumps = nlohmann::json::array();
  for (const auto& b : c.bumps)
    bumps.push_back({{"amplitude", b.amplitude}, {"width", b.width}, {"x", b.x}, {"y", b.y}});
  return {{"command", to_string(c.command)},
          {"orders", c.orders},
          {"a", c.a},
          {"b", c.b},
          {"kind", c.kind},
          {"half_width", c.half_width},
          {"n", c.n},
          {"thresholds", c.thresholds},
          {"intervals", c.intervals},
          {"mask_radius_cells", c.mask_radius_cells},
          {"grid_file", c.grid_file},
          {"save_grid", c.save_grid},
          {"bumps", bumps},
          {"family", c.family},
          {"deficit_fractions", c.deficit_fractions},
          {"V", c.V},
          {"chi", c.chi},
          {"segments", c.segments},
          {"restarts", c.restarts},
          {"steps", c.steps},
          {"a_min", c.a_min},
          {"a_max", c.a_max},
          {"a_steps", c.a_steps},
          {"b_min", c.b_min},
          {"b_max", c.b_max},
          {"b_steps", c.b_steps},
          {"out", c.out},
          {"svg", c.svg},
          {"seed", c.seed}};
}

JobConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidInput("job config must be a JSON object");
  const auto defaults = to_json(JobConfig{});
  for (const auto& [key, value] : doc.items())
    if (!defaults.contains(key)) throw InvalidInput("unknown job config key: " + key);
  JobConfig c;
  try {
    auto take = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    if (doc.contains("command")) c.command = parse_command(doc.at("command").get<std::string>());
    take("orders", c.orders);
    take("a", c.a);
    take("b", c.b);
    take("kind", c.kind);
    take("half_width", c.half_width);
    take("n", c.n);
    take("thresholds", c.thresholds);
    take("intervals", c.intervals);
    take("mask_radius_cells", c.mask_radius_cells);
    take("grid_file", c.grid_file);
    take("save_grid", c.save_grid);
    if (doc.contains("bumps")) {
      for (const auto& b : doc.at("bumps")) {
        levelset::Bump bump;
        bump.amplitude = b.at("amplitude").get<double>();
        bump.width = b.at("width").get<double>();
        bump.x = b.at("x").get<double>();
        bump.y = b.at("y").get<double>();
        c.bumps.push_back(bump);
      }
    }
    take("family", c.family);
    take("deficit_fractions", c.deficit_fractions);
    take("V", c.V);
    take("chi", c.chi);
    take("segments", c.segments);
    take("restarts", c.restarts);
    take("steps", c.steps);
    take("a_min", c.a_min);
    take("a_max", c.a_max);
    take("a_steps", c.a_steps);
    take("b_min", c.b_min);
    take("b_max", c.b_max);
    take("b_steps", c.b_steps);
    take("out", c.out);
    take("svg", c.svg);
    take("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed job config: ") + e.what());
  }
  return c;
}

}  // namespace conicvol::cli
