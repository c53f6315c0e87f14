#include "conicvol/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "conicvol/error.hpp"
#include "conicvol/parallel.hpp"

namespace conicvol::lemma {

namespace {

void check_inputs(double V, double chi, double a, double b) {
  if (!std::isfinite(V) || !std::isfinite(chi) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidInput("lemma inputs must be finite");
  if (!(V > 0.0)) throw InvalidInput("lemma requires V > 0");
  if (a > b) throw InvalidInput("lemma requires a <= b");
  const double slack = kAdmissibilityTolerance * std::max({1.0, std::abs(a * V), std::abs(b * V)});
  if (chi < a * V - slack || chi > b * V + slack)
    throw InvalidInput("inadmissible lemma inputs: chi must lie in [aV, bV]");
}

// Weight of segment k's slope in \int_0^V f for n segments of width w:
// the slope acts on the rest of the interval, w (V - (k + 1/2) w).
double weight(double V, double w, int k) { return w * (V - (k + 0.5) * w); }

}  // namespace

double SlopeProfile::value_at(double x) const {
  double f = 0.0;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (x <= knots[k]) break;
    f += slopes[k] * (std::min(x, knots[k + 1]) - knots[k]);
  }
  return f;
}

double SlopeProfile::end_value() const {
  double f = 0.0;
  for (std::size_t k = 0; k < slopes.size(); ++k) f += slopes[k] * (knots[k + 1] - knots[k]);
  return f;
}

double SlopeProfile::integral() const {
  double f = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    const double w = knots[k + 1] - knots[k];
    total += f * w + 0.5 * slopes[k] * w * w;
    f += slopes[k] * w;
  }
  return total;
}

bool SlopeProfile::admissible(double tol) const {
  for (double s : slopes)
    if (s < a - tol || s > b + tol) return false;
  return std::abs(end_value() - chi) <= tol * std::max(1.0, std::abs(chi));
}

SlopeProfile uniform_profile(double V, double chi, double a, double b, std::vector<double> slopes) {
  SlopeProfile p{V, chi, a, b, {}, std::move(slopes)};
  const std::size_t n = p.slopes.size();
  p.knots.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) p.knots[k] = V * static_cast<double>(k) / static_cast<double>(n);
  return p;
}

double lemma_bound(double V, double chi, double a, double b) {
  check_inputs(V, chi, a, b);
  if (a == b) return 0.5 * a * V * V;
  const double excess = chi - a * V;
  return -0.5 * a * V * V - excess * excess / (2.0 * (b - a)) + V * chi;
}

double breakpoint(double V, double chi, double a, double b) {
  check_inputs(V, chi, a, b);
  if (a == b) return V;
  return std::clamp((chi - a * V) / (b - a), 0.0, V);
}

SlopeProfile bang_bang(double V, double chi, double a, double b) {
  const double delta = breakpoint(V, chi, a, b);
  SlopeProfile p{V, chi, a, b, {0.0}, {}};
  if (a == b) {
    p.knots.push_back(V);
    p.slopes.push_back(a);
    return p;
  }
  if (delta > 0.0) {
    p.knots.push_back(delta);
    p.slopes.push_back(b);
  }
  if (delta < V) {
    p.knots.push_back(V);
    p.slopes.push_back(a);
  }
  return p;
}

SlopeProfile greedy_profile(double V, double chi, double a, double b, int n) {
  check_inputs(V, chi, a, b);
  if (n < 1) throw InvalidInput("segment count must be positive");
  const double w = V / n;
  // Slope budget above a, handed out front to back.
  double budget = std::max(chi - a * V, 0.0) / w;
  std::vector<double> slopes(static_cast<std::size_t>(n), a);
  for (auto& s : slopes) {
    const double extra = std::min(b - a, budget);
    s = a + extra;
    budget -= extra;
    if (budget <= 0.0) break;
  }
  return uniform_profile(V, chi, a, b, std::move(slopes));
}

double brute_force_max(double V, double chi, double a, double b, int n) {
  if (n < 2) throw InvalidInput("brute_force_max requires n >= 2");
  return greedy_profile(V, chi, a, b, n).integral();
}

double random_search_max(double V, double chi, double a, double b, int n,
                         const RandomSearchOptions& options) {
  check_inputs(V, chi, a, b);
  if (n < 2) throw InvalidInput("random search requires n >= 2");
  if (options.restarts < 1 || options.steps < 0) throw InvalidInput("bad random search options");
  const double w = V / n;
  const double mean = std::clamp(chi / V, a, b);
  std::vector<double> best(static_cast<std::size_t>(options.restarts));

  parallel_for(best.size(), [&](std::size_t r) {
    std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + r);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = a + (b - a) * unit(rng);
    // Shift toward the required mean slope and clamp until the sum matches.
    for (int pass = 0; pass < 64; ++pass) {
      double sum = 0.0;
      for (double v : s) sum += v;
      const double shift = (mean * n - sum) / n;
      if (std::abs(shift) < 1e-15 * std::max(1.0, std::abs(mean))) break;
      for (auto& v : s) v = std::clamp(v + shift, a, b);
    }
    // Hand any residual to segments with room, in random order.
    double residual = mean * n;
    for (double v : s) residual -= v;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
    std::shuffle(order.begin(), order.end(), rng);
    for (int k : order) {
      auto& v = s[static_cast<std::size_t>(k)];
      const double d = residual > 0.0 ? std::min(residual, b - v) : std::max(residual, a - v);
      v += d;
      residual -= d;
    }
    for (int step = 0; step < options.steps; ++step) {
      const int i = pick(rng);
      const int j = pick(rng);
      if (i == j) continue;
      // Move d of slope from j to i; improves iff weight(i) > weight(j).
      auto& si = s[static_cast<std::size_t>(i)];
      auto& sj = s[static_cast<std::size_t>(j)];
      const double room = std::min(b - si, sj - a);
      if (room <= 0.0) continue;
      const double d = room * unit(rng);
      const double gain = d * (weight(V, w, i) - weight(V, w, j));
      if (gain > 0.0) {
        si += d;
        sj -= d;
      }
    }
    double acc = 0.0;
    double f = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += f * w + 0.5 * s[static_cast<std::size_t>(k)] * w * w;
      f += s[static_cast<std::size_t>(k)] * w;
    }
    best[r] = acc;
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace conicvol::lemma
