#pragma once

#include <cstdint>
#include <vector>

// The linear functional f -> \int_0^V f over piecewise-linear f with f(0) = 0,
// f(V) = chi and a <= f' <= b. Its maximum is attained by the bang-bang profile
// with slope b up to delta = (chi - aV)/(b - a) and slope a after it.
namespace conicvol::lemma {

/// Piecewise-linear f with f(0) = 0 given by its slopes on consecutive
/// segments [knots[i], knots[i+1]].
struct SlopeProfile {
  double V = 0.0;
  double chi = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> knots;   // size n + 1, knots[0] = 0, knots[n] = V
  std::vector<double> slopes;  // size n

  std::size_t n() const noexcept { return slopes.size(); }
  /// f at x by summing the slopes.
  double value_at(double x) const;
  /// f(V).
  double end_value() const;
  /// Exact \int_0^V f.
  double integral() const;
  /// f(V) = chi to within `tol` and every slope in [a - tol, b + tol].
  bool admissible(double tol = 1e-12) const;
};

/// n equal segments of width V/n.
SlopeProfile uniform_profile(double V, double chi, double a, double b, std::vector<double> slopes);

/// Relative slack for the admissibility test a V <= chi <= b V.
inline constexpr double kAdmissibilityTolerance = 1e-12;

/// (-a/2) V^2 - (chi - aV)^2 / (2(b - a)) + V chi. For a == b the unique
/// admissible f = ax gives a V^2 / 2. Throws InvalidInput unless V > 0,
/// a <= b and aV <= chi <= bV.
double lemma_bound(double V, double chi, double a, double b);

/// Breakpoint (chi - aV)/(b - a), clamped to [0, V]; V when a == b.
double breakpoint(double V, double chi, double a, double b);

/// Slope b on [0, delta), a on [delta, V]; zero-width segments are dropped.
SlopeProfile bang_bang(double V, double chi, double a, double b);

/// Maximum of \int_0^V f over profiles with n equal segments, by greedy
/// allocation: slope b on the earliest segments, one segment with the
/// remainder, slope a after it. Exact for this linear program because the
/// weight of a segment's slope decreases with its position.
SlopeProfile greedy_profile(double V, double chi, double a, double b, int n);
double brute_force_max(double V, double chi, double a, double b, int n);

struct RandomSearchOptions {
  int restarts = 200;
  int steps = 10'000;
  std::uint64_t seed = 1;
};

/// Independent check of the greedy maximum: hill climbing from random
/// admissible starts, each move transferring slope between two segments while
/// keeping every slope in [a, b] and the sum fixed. Restarts run in parallel,
/// each seeded from options.seed and its index.
double random_search_max(double V, double chi, double a, double b, int n,
                         const RandomSearchOptions& options = {});

}  // namespace conicvol::lemma
