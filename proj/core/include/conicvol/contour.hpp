#pragma once

#include <span>

namespace conicvol::levelset {

// Marching squares on a square raster of cell-centre samples. Edge crossings
// are placed by linear interpolation; saddles are resolved by the mean of the
// four corners. Segments are oriented with {value > level} on their left, so
// summing x1*y2 - x2*y1 gives the enclosed area with holes subtracted.
struct ContourStats {
  double perimeter = 0.0;
  double area = 0.0;
  long segments = 0;
  long inside_samples = 0;
  // Some sample on the outermost ring lies above the level: the region is not
  // enclosed by the raster.
  bool touches_boundary = false;
};

// values: n*n row-major samples at (origin + (i + 0.5) h, origin + (j + 0.5) h).
ContourStats trace_superlevel(std::span<const double> values, int n, double h, double origin,
                              double level);

}  // namespace conicvol::levelset
