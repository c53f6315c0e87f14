#include "conicvol/grid_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "conicvol/error.hpp"

namespace conicvol::levelset {

namespace {

constexpr char kTextMagic[] = "conicvol-grid";
constexpr char kBinaryMagic[8] = {'C', 'V', 'G', 'R', 'I', 'D', 'B', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary grid format assumes a little-endian host");

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw InvalidInput("binary grid: unexpected end of data");
  return value;
}

// Next whitespace-separated token, skipping '#' comment lines.
std::string token(std::istream& in) {
  std::string word;
  while (in >> word) {
    if (word.front() != '#') return word;
    std::string rest;
    std::getline(in, rest);
  }
  throw InvalidInput("text grid: unexpected end of data");
}

void expect(std::istream& in, const std::string& key) {
  const std::string word = token(in);
  if (word != key) throw InvalidInput("text grid: expected '" + key + "', found '" + word + "'");
}

double parse_number(const std::string& word) {
  if (word == "inf") return INFINITY;
  if (word == "-inf") return -INFINITY;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(word, &used);
  } catch (const std::exception&) {
    throw InvalidInput("text grid: not a number: '" + word + "'");
  }
  if (used != word.size()) throw InvalidInput("text grid: not a number: '" + word + "'");
  return value;
}

int parse_int(const std::string& word) {
  const double v = parse_number(word);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidInput("text grid: not an integer: '" + word + "'");
  return static_cast<int>(v);
}

std::vector<double> read_values(std::istream& in, std::size_t count) {
  std::vector<double> values(count);
  for (auto& v : values) v = parse_number(token(in));
  return values;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return buf.data();
}

void write_grid_text(std::ostream& out, const GriddedMetric& grid) {
  const int n = grid.n();
  out << kTextMagic << " 1\n";
  out << "half_width " << format_double(grid.half_width()) << '\n';
  out << "n " << n << '\n';
  out << "alpha_eff " << format_double(grid.alpha_eff()) << '\n';
  out << "beta_inf " << (grid.beta_inf() ? format_double(*grid.beta_inf()) : "none") << '\n';
  out << "mask_radius_cells " << grid.mask_radius_cells() << '\n';
  out << "points " << grid.points().size() << '\n';
  for (const auto& p : grid.points())
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.order) << '\n';
  const bool has_k = grid.curvature_is_analytic();
  out << "curvature " << (has_k ? "yes" : "no") << '\n';
  auto dump = [&](std::span<const double> values) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i) out << ' ';
        out << format_double(values[grid.index(i, j)]);
      }
      out << '\n';
    }
  };
  out << "u\n";
  dump(grid.u_values());
  if (has_k) {
    out << "K\n";
    dump(grid.curvature_values());
  }
}

GriddedMetric read_grid_text(std::istream& in) {
  expect(in, kTextMagic);
  if (token(in) != "1") throw InvalidInput("text grid: unsupported version");
  expect(in, "half_width");
  GridSpec spec;
  spec.half_width = parse_number(token(in));
  expect(in, "n");
  spec.n = parse_int(token(in));
  if (spec.n < 4 || spec.n > 65536) throw InvalidInput("text grid: n out of range");
  expect(in, "alpha_eff");
  const double alpha = parse_number(token(in));
  expect(in, "beta_inf");
  std::optional<double> beta;
  if (const std::string w = token(in); w != "none") beta = parse_number(w);
  expect(in, "mask_radius_cells");
  const int mask = parse_int(token(in));
  expect(in, "points");
  const int k = parse_int(token(in));
  if (k < 0) throw InvalidInput("text grid: negative point count");
  std::vector<ConePoint> points(static_cast<std::size_t>(k));
  for (auto& p : points) {
    p.x = parse_number(token(in));
    p.y = parse_number(token(in));
    p.order = parse_number(token(in));
  }
  expect(in, "curvature");
  const std::string has_k = token(in);
  if (has_k != "yes" && has_k != "no") throw InvalidInput("text grid: curvature must be yes or no");
  const std::size_t cells = static_cast<std::size_t>(spec.n) * spec.n;
  expect(in, "u");
  std::vector<double> u = read_values(in, cells);
  std::optional<std::vector<double>> K;
  if (has_k == "yes") {
    expect(in, "K");
    K = read_values(in, cells);
  }
  return GriddedMetric(spec, std::move(u), std::move(points), alpha, beta, std::move(K), mask);
}

void write_grid_binary(std::ostream& out, const GriddedMetric& grid) {
  out.write(kBinaryMagic, sizeof kBinaryMagic);
  put<double>(out, grid.half_width());
  put<std::int32_t>(out, grid.n());
  put<double>(out, grid.alpha_eff());
  put<std::uint8_t>(out, grid.beta_inf() ? 1 : 0);
  put<double>(out, grid.beta_inf().value_or(0.0));
  put<std::int32_t>(out, grid.mask_radius_cells());
  put<std::int32_t>(out, static_cast<std::int32_t>(grid.points().size()));
  for (const auto& p : grid.points()) {
    put(out, p.x);
    put(out, p.y);
    put(out, p.order);
  }
  const bool has_k = grid.curvature_is_analytic();
  put<std::uint8_t>(out, has_k ? 1 : 0);
  auto dump = [&](std::span<const double> values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  };
  dump(grid.u_values());
  if (has_k) dump(grid.curvature_values());
}

GriddedMetric read_grid_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0)
    throw InvalidInput("binary grid: bad magic");
  GridSpec spec;
  spec.half_width = get<double>(in);
  spec.n = get<std::int32_t>(in);
  if (spec.n < 4 || spec.n > 65536) throw InvalidInput("binary grid: n out of range");
  const double alpha = get<double>(in);
  const bool has_beta = get<std::uint8_t>(in) != 0;
  const double beta_value = get<double>(in);
  const int mask = get<std::int32_t>(in);
  const int k = get<std::int32_t>(in);
  if (k < 0 || k > 1'000'000) throw InvalidInput("binary grid: bad point count");
  std::vector<ConePoint> points(static_cast<std::size_t>(k));
  for (auto& p : points) {
    p.x = get<double>(in);
    p.y = get<double>(in);
    p.order = get<double>(in);
  }
  const bool has_k = get<std::uint8_t>(in) != 0;
  const std::size_t cells = static_cast<std::size_t>(spec.n) * spec.n;
  auto load = [&] {
    std::vector<double> values(cells);
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(cells * sizeof(double))))
      throw InvalidInput("binary grid: unexpected end of data");
    return values;
  };
  std::vector<double> u = load();
  std::optional<std::vector<double>> K;
  if (has_k) K = load();
  std::optional<double> beta;
  if (has_beta) beta = beta_value;
  return GriddedMetric(spec, std::move(u), std::move(points), alpha, beta, std::move(K), mask);
}

GriddedMetric read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open grid file: " + path);
  char head[8] = {};
  in.read(head, sizeof head);
  in.clear();
  in.seekg(0);
  if (std::memcmp(head, kBinaryMagic, sizeof head) == 0) return read_grid_binary(in);
  return read_grid_text(in);
}

void write_grid(const std::string& path, const GriddedMetric& grid) {
  const bool binary = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InvalidInput("cannot write grid file: " + path);
  if (binary)
    write_grid_binary(out, grid);
  else
    write_grid_text(out, grid);
  if (!out) throw InvalidInput("error writing grid file: " + path);
}

void write_threshold_csv(std::ostream& out, const LevelSetSummary& summary) {
  out << "t,s,B,A\n";
  for (std::size_t k = 0; k < summary.t.size(); ++k)
    out << format_double(summary.t[k]) << ',' << format_double(summary.s_of_t[k]) << ','
        << format_double(summary.B_of_t[k]) << ',' << format_double(summary.A_of_t[k]) << '\n';
}

void write_reparameterized_csv(std::ostream& out, const LevelSetSummary& summary,
                               const KeyInequalityReport& report) {
  out << "s_uniform,t_of_s,A_of_s,B_of_s,lhs_E10,rhs_E10\n";
  for (std::size_t j = 0; j < summary.s_uniform.size(); ++j) {
    out << format_double(summary.s_uniform[j]) << ',' << format_double(summary.t_of_s[j]) << ','
        << format_double(summary.A_of_s[j]) << ',' << format_double(summary.B_of_s[j]) << ',';
    if (j < report.lhs.size()) out << format_double(report.lhs[j]) << ',' << format_double(report.rhs[j]);
    else out << ',';
    out << '\n';
  }
}

}  // namespace conicvol::levelset
