#include "conicvol/contour.hpp"

#include <array>
#include <cmath>

namespace conicvol::levelset {

namespace {

struct Point {
  double x;
  double y;
};

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

ContourStats trace_superlevel(std::span<const double> values, int n, double h, double origin,
                              double level) {
  ContourStats stats;
  auto at = [&](int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (at(i, j) > level) {
        ++stats.inside_samples;
        if (i == 0 || j == 0 || i == n - 1 || j == n - 1) stats.touches_boundary = true;
      }
    }
  }

  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      // Corners counter-clockwise from bottom-left.
      const std::array<double, 4> v{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const double x0 = origin + (i + 0.5) * h;
      const double y0 = origin + (j + 0.5) * h;
      const std::array<Point, 4> c{Point{x0, y0}, Point{x0 + h, y0}, Point{x0 + h, y0 + h}, Point{x0, y0 + h}};
      std::array<bool, 4> in{};
      int code = 0;
      for (int k = 0; k < 4; ++k) {
        in[k] = v[k] > level;
        code |= in[k] << k;
      }
      if (code == 0 || code == 15) continue;

      // Edge k joins corner k and corner k+1.
      auto crossing = [&](int e) {
        const int a = e;
        const int b = (e + 1) % 4;
        const double f = (level - v[a]) / (v[b] - v[a]);
        return Point{c[a].x + f * (c[b].x - c[a].x), c[a].y + f * (c[b].y - c[a].y)};
      };

      auto emit = [&](int ea, int eb, int witness) {
        Point p = crossing(ea);
        Point q = crossing(eb);
        // Inside corners sit on the left.
        const bool left = cross(p, q, c[witness]) > 0.0;
        if (left != in[witness]) std::swap(p, q);
        stats.perimeter += std::hypot(q.x - p.x, q.y - p.y);
        stats.area += 0.5 * (p.x * q.y - q.x * p.y);
        ++stats.segments;
      };
      // A segment isolating corner k crosses edges k-1 and k.
      auto isolate = [&](int k) { emit((k + 3) % 4, k, k); };

      const int count = in[0] + in[1] + in[2] + in[3];
      if (count == 1 || count == 3) {
        for (int k = 0; k < 4; ++k) {
          const bool odd = count == 1 ? in[k] : !in[k];
          if (odd) isolate(k);
        }
      } else if (code == 5 || code == 10) {
        const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        const bool centre_in = centre > level;
        for (int k = 0; k < 4; ++k) {
          if (in[k] != centre_in) isolate(k);
        }
      } else {
        // Two adjacent inside corners: the segment crosses opposite edges.
        int first_in = 0;
        while (!in[first_in]) ++first_in;
        if (in[0] && in[1]) emit(1, 3, 0);       // bottom pair
        else if (in[1] && in[2]) emit(0, 2, 1);  // right pair
        else if (in[2] && in[3]) emit(1, 3, 2);  // top pair
        else emit(0, 2, first_in);               // left pair
      }
    }
  }
  return stats;
}

}  // namespace conicvol::levelset
