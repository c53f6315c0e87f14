#pragma once

#include <iosfwd>
#include <string>

#include "conicvol/levelset.hpp"

// Raster storage for GriddedMetric and CSV output of level-set summaries.
//
// Text format (whitespace separated, '#' starts a comment line):
//   conicvol-grid 1
//   half_width <L>
//   n <N>
//   alpha_eff <alpha>
//   beta_inf <beta | none>
//   mask_radius_cells <m>
//   points <k>            followed by k lines "x y order"
//   curvature <yes | no>
//   u                     followed by N*N values, row-major with row = y
//   [K                    followed by N*N values when curvature is yes]
//
// Binary format: the 8-byte magic "CVGRIDB1", then little-endian
//   f64 L, i32 N, f64 alpha, u8 has_beta, f64 beta, i32 m, i32 k,
//   k x (f64 x, f64 y, f64 order), u8 has_K, N*N f64 u, [N*N f64 K].
namespace conicvol::levelset {

void write_grid_text(std::ostream& out, const GriddedMetric& grid);
void write_grid_binary(std::ostream& out, const GriddedMetric& grid);
GriddedMetric read_grid_text(std::istream& in);
GriddedMetric read_grid_binary(std::istream& in);

/// Reads either format, detected from the leading bytes. Throws InvalidInput
/// on unreadable files or malformed content.
GriddedMetric read_grid(const std::string& path);
/// Writes the binary format when the path ends in ".bin", text otherwise.
void write_grid(const std::string& path, const GriddedMetric& grid);

/// Columns t,s,B,A, one row per threshold.
void write_threshold_csv(std::ostream& out, const LevelSetSummary& summary);

/// Columns s_uniform,t_of_s,A_of_s,B_of_s,lhs_E10,rhs_E10 on the uniform
/// s-grid. The inequality sides belong to the interval starting at each row;
/// the final row leaves them empty.
void write_reparameterized_csv(std::ostream& out, const LevelSetSummary& summary,
                               const KeyInequalityReport& report);

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for the
/// special values).
std::string format_double(double value);

}  // namespace conicvol::levelset
