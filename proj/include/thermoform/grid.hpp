#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "thermoform/error.hpp"

namespace thermoform {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Convexity { Unknown, Convex, Concave };

// Sampled function of one real variable; +inf marks points outside the domain.
struct GridFunction {
  std::vector<double> grid;
  std::vector<double> values;
  Convexity convexity = Convexity::Unknown;

  std::size_t size() const { return grid.size(); }

  std::size_t finite_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return std::isfinite(v); }));
  }

  void validate(std::size_t min_finite = 3) const {
    if (grid.size() != values.size()) throw DomainError("grid and values differ in length");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
    }
    for (double v : values) {
      if (std::isnan(v) || v == -kInf) throw DomainError("grid values must be finite or +inf");
    }
    if (finite_count() < min_finite) {
      throw DomainError("grid function needs at least " + std::to_string(min_finite) + " finite values");
    }
  }

  // Piecewise-linear interpolation; +inf outside the grid or next to an
  // infinite sample.
  double interpolate(double x) const {
    if (grid.empty() || x < grid.front() || x > grid.back()) return kInf;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.end()) return values.back();
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    if (hi == 0) return values.front();
    const std::size_t lo = hi - 1;
    if (x == grid[lo]) return values[lo];
    if (!std::isfinite(values[lo]) || !std::isfinite(values[hi])) return kInf;
    const double w = (x - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
  }
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw DomainError("uniform grid needs n >= 2 and hi > lo");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.back() = hi;
  return g;
}

// Odd point count on [-half, half], mirrored so that g[n-1-i] == -g[i] exactly.
inline std::vector<double> symmetric_grid(double half, std::size_t n) {
  if (n < 3 || n % 2 == 0 || !(half > 0)) throw DomainError("symmetric grid needs odd n >= 3 and half > 0");
  std::vector<double> g(n);
  const std::size_t mid = n / 2;
  for (std::size_t i = 0; i < mid; ++i) {
    g[i] = -half * static_cast<double>(mid - i) / static_cast<double>(mid);
    g[n - 1 - i] = -g[i];
  }
  g[mid] = 0.0;
  return g;
}

// Slope monotonicity over the finite part, with absolute slack on second differences.
inline bool is_convex(const GridFunction& f, double slack = 1e-9) {
  double prev_slope = -kInf;
  std::size_t prev = f.size();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f.values[i])) continue;
    if (prev < f.size()) {
      const double slope = (f.values[i] - f.values[prev]) / (f.grid[i] - f.grid[prev]);
      const double step = f.grid[i] - f.grid[prev];
      if (slope < prev_slope - slack / step) return false;
      prev_slope = slope;
    }
    prev = i;
  }
  return true;
}

inline GridFunction negate(const GridFunction& f) {
  GridFunction g = f;
  for (double& v : g.values) v = -v;
  g.convexity = f.convexity == Convexity::Convex    ? Convexity::Concave
                : f.convexity == Convexity::Concave ? Convexity::Convex
                                                    : Convexity::Unknown;
  return g;
}

// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2) with x0 < x1 < x2.
// Falls back to the middle sample when the parabola is flat or its vertex
// leaves the bracket.
struct Vertex {
  double x;
  double value;
};

inline Vertex parabolic_vertex(double x0, double x1, double x2, double y0, double y1, double y2) {
  const double u0 = x0 - x1, u2 = x2 - x1;
  const double d0 = y0 - y1, d2 = y2 - y1;
  const double det = u0 * u2 * (u2 - u0);
  const double b = (d0 * u2 * u2 - d2 * u0 * u0) / det;
  const double c = (u0 * d2 - u2 * d0) / det;
  if (c == 0.0 || !std::isfinite(b) || !std::isfinite(c)) return {x1, y1};
  const double u = -b / (2.0 * c);
  if (u < u0 || u > u2) return {x1, y1};
  return {x1 + u, y1 - b * b / (4.0 * c)};
}

}  // namespace thermoform
