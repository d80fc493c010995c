#pragma once

// Legendre-Fenchel transforms on grids, rate functions of Birkhoff averages,
// Varadhan suprema, tilted rate functions and exact finite-n deviation masses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "thermoform/enumerate.hpp"
#include "thermoform/error.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/shift.hpp"
#include "thermoform/transfer.hpp"

namespace thermoform::ldp {

// sup_i { s x_i - f(x_i) } refined by a parabola through the three samples
// around the discrete arg max.
struct ConjugatePoint {
  double value = -kInf;
  double argmax = 0.0;
  bool at_boundary = false;  // arg max is the first or last finite sample
};

inline ConjugatePoint conjugate_at(const GridFunction& f, double s) {
  ConjugatePoint best;
  std::size_t arg = f.size();
  std::size_t first = f.size(), last = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f.values[i])) continue;
    first = std::min(first, i);
    last = i;
    const double v = s * f.grid[i] - f.values[i];
    if (v > best.value) {
      best.value = v;
      arg = i;
    }
  }
  if (arg == f.size()) return best;
  best.argmax = f.grid[arg];
  if (arg == first || arg == last) {
    // one-sided parabola; only a vertex inside the end cell counts as attained
    best.at_boundary = true;
    if (last - first < 2) return best;
    const std::size_t i0 = arg == first ? arg : arg - 2;
    double y[3];
    for (std::size_t k = 0; k < 3; ++k) y[k] = s * f.grid[i0 + k] - f.values[i0 + k];
    if (!std::isfinite(y[0] + y[1] + y[2])) return best;
    const Vertex v = parabolic_vertex(f.grid[i0], f.grid[i0 + 1], f.grid[i0 + 2], y[0], y[1], y[2]);
    const bool inside = arg == first ? (v.x > f.grid[arg] && v.x < f.grid[arg + 1])
                                     : (v.x < f.grid[arg] && v.x > f.grid[arg - 1]);
    if (inside && v.value >= best.value) {
      best.value = v.value;
      best.argmax = v.x;
      best.at_boundary = false;
    }
    return best;
  }
  const double l = s * f.grid[arg - 1] - f.values[arg - 1];
  const double r = s * f.grid[arg + 1] - f.values[arg + 1];
  if (!std::isfinite(l) || !std::isfinite(r)) return best;
  const Vertex v = parabolic_vertex(f.grid[arg - 1], f.grid[arg], f.grid[arg + 1], l, best.value, r);
  best.value = std::max(best.value, v.value);
  best.argmax = v.x;
  return best;
}

// Conjugate evaluated on the slope range of f. A linear f has a degenerate
// slope range; its conjugate is returned on three points with +inf either side.
inline GridFunction legendre_transform(const GridFunction& f, std::size_t points = 0, bool accept_hull = false) {
  f.validate(3);
  if (!accept_hull && !is_convex(f)) throw DomainError("Legendre transform of a nonconvex grid function");
  std::vector<std::size_t> fin;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::isfinite(f.values[i])) fin.push_back(i);
  }
  auto slope = [&](std::size_t a, std::size_t b) {
    return (f.values[b] - f.values[a]) / (f.grid[b] - f.grid[a]);
  };
  double s_lo = slope(fin[0], fin[1]);
  double s_hi = slope(fin[fin.size() - 2], fin.back());
  if (accept_hull) {
    for (std::size_t i = 1; i < fin.size(); ++i) {
      s_lo = std::min(s_lo, slope(fin[i - 1], fin[i]));
      s_hi = std::max(s_hi, slope(fin[i - 1], fin[i]));
    }
  }
  if (points == 0) points = f.size();

  GridFunction out;
  out.convexity = Convexity::Convex;
  if (s_hi - s_lo <= 1e-12 * (1.0 + std::abs(s_lo) + std::abs(s_hi))) {
    const double c = 0.5 * (s_lo + s_hi);
    const double cell = (f.grid[fin.back()] - f.grid[fin[0]]) / static_cast<double>(fin.size() - 1);
    out.grid = {c - cell, c, c + cell};
    out.values = {kInf, conjugate_at(f, c).value, kInf};
    return out;
  }
  out.grid = uniform_grid(s_lo, s_hi, points);
  out.values.resize(points);
  for (std::size_t j = 0; j < points; ++j) out.values[j] = conjugate_at(f, out.grid[j]).value;
  return out;
}

struct RateFunction {
  GridFunction fn;         // I on an x-grid over [lower, upper]
  GridFunction source;     // the pressure curve it was conjugated from
  double lower = 0.0;      // m_A = -em(-A)
  double upper = 0.0;      // M_A = em(A)
  double minimizer = 0.0;  // c'(0), where I vanishes

  bool degenerate() const { return upper - lower <= 1e-12 * (1.0 + std::abs(lower) + std::abs(upper)); }

  // I(x) from the source curve; +inf outside [lower, upper] or where the
  // supremum is not attained inside the t-grid.
  double evaluate(double x) const {
    if (degenerate()) return std::abs(x - minimizer) <= 1e-12 ? 0.0 : kInf;
    if (x < lower || x > upper) return kInf;
    const ConjugatePoint c = conjugate_at(source, x);
    return c.at_boundary ? kInf : c.value;
  }
};

// Derivative of the curve at t = 0 from the two samples bracketing 0 on each side.
inline double slope_at_zero(const GridFunction& c) {
  auto it = std::lower_bound(c.grid.begin(), c.grid.end(), 0.0);
  if (it == c.grid.begin() || it == c.grid.end()) throw DomainError("t-grid must contain 0 in its interior");
  std::size_t i = static_cast<std::size_t>(it - c.grid.begin());
  if (c.grid[i] == 0.0) {
    if (i + 1 >= c.size()) throw DomainError("t-grid must contain 0 in its interior");
    const double h0 = c.grid[i] - c.grid[i - 1], h1 = c.grid[i + 1] - c.grid[i];
    // three-point derivative on a possibly uneven stencil
    return (-h1 / (h0 * (h0 + h1))) * c.values[i - 1] + ((h1 - h0) / (h0 * h1)) * c.values[i] +
           (h0 / (h1 * (h0 + h1))) * c.values[i + 1];
  }
  return (c.values[i] - c.values[i - 1]) / (c.grid[i] - c.grid[i - 1]);
}

// I(x) = sup_t { t x - c(t) } for the normalized pressure curve c (c(0) = 0).
inline RateFunction rate_function(const GridFunction& curve, double em_plus, double em_minus, std::size_t x_points = 2001) {
  curve.validate(3);
  if (!is_convex(curve)) throw DomainError("pressure curve is not convex");
  RateFunction I;
  I.source = curve;
  I.lower = -em_minus;
  I.upper = em_plus;
  if (I.lower > I.upper + 1e-12) throw DomainError("rate function domain is empty");
  I.fn.convexity = Convexity::Convex;
  if (I.degenerate()) {
    I.minimizer = 0.5 * (I.lower + I.upper);
    I.fn.grid = {I.minimizer};
    I.fn.values = {0.0};
    return I;
  }
  I.minimizer = slope_at_zero(curve);
  I.fn.grid = uniform_grid(I.lower, I.upper, x_points);
  I.fn.values.resize(x_points);
  for (std::size_t j = 0; j < x_points; ++j) I.fn.values[j] = I.evaluate(I.fn.grid[j]);
  return I;
}

// Rate function of A under the maximal entropy measure on a symmetric t-window.
inline RateFunction rate_function_of(const Potential& A, double t_half = 8.0, std::size_t t_points = 4001,
                                     std::size_t x_points = 2001, const SpectralOptions& opt = {}) {
  const Potential f = Potential::constant(A.config(), -std::log(static_cast<double>(A.d())));
  const GridFunction c = pressure_curve(f, A, symmetric_grid(t_half, t_points), opt);
  return rate_function(c, ergodic_max(A), ergodic_max(Potential::affine(A, -1.0)), x_points);
}

// sup_x { F(x) - I(x) }: grid supremum, then the true value at the vertex of
// the parabola through the three samples around the arg max.
inline double varadhan_value(const std::function<double(double)>& F, const RateFunction& I) {
  if (I.degenerate()) return F(I.minimizer);
  const auto& g = I.fn.grid;
  const auto& iv = I.fn.values;
  std::vector<double> h(g.size(), -kInf);
  std::size_t arg = g.size();
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!std::isfinite(iv[j])) continue;
    h[j] = F(g[j]) - iv[j];
    if (arg == g.size() || h[j] > h[arg]) arg = j;
  }
  if (arg == g.size()) throw DomainError("F and I have no common finite points");
  double best = h[arg];
  if (arg > 0 && arg + 1 < g.size() && std::isfinite(h[arg - 1]) && std::isfinite(h[arg + 1])) {
    const Vertex v = parabolic_vertex(g[arg - 1], g[arg], g[arg + 1], h[arg - 1], h[arg], h[arg + 1]);
    const double iv_at = I.evaluate(v.x);
    if (std::isfinite(iv_at)) best = std::max(best, F(v.x) - iv_at);
  }
  return best;
}

inline double varadhan_value(const GridFunction& F, const RateFunction& I) {
  return varadhan_value([&](double x) { return F.interpolate(x); }, I);
}

struct TiltedRate {
  GridFunction fn;             // I(x) - F(x) - inf_y { I(y) - F(y) }
  double constant = 0.0;       // inf_y { I(y) - F(y) } over the grid
  std::vector<double> zeros;   // refined positions of the zero set
};

// Tilted rate on the grid of `rate` (I sampled on a grid, possibly from a
// closed form). Zeros are grid local minima with value <= zero_tol, refined
// by a parabola.
inline TiltedRate tilted_rate(const std::function<double(double)>& F, const GridFunction& rate, double zero_tol = 1e-9) {
  TiltedRate out;
  out.fn.grid = rate.grid;
  out.fn.values.resize(rate.size());
  out.constant = kInf;
  for (std::size_t j = 0; j < rate.size(); ++j) {
    out.fn.values[j] = std::isfinite(rate.values[j]) ? rate.values[j] - F(rate.grid[j]) : kInf;
    out.constant = std::min(out.constant, out.fn.values[j]);
  }
  if (!std::isfinite(out.constant)) throw DomainError("tilted rate has no finite values");
  for (double& v : out.fn.values) {
    if (std::isfinite(v)) v -= out.constant;
  }
  const auto& g = out.fn.grid;
  const auto& v = out.fn.values;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!(v[j] <= zero_tol)) continue;
    const bool left_ok = j == 0 || v[j] < v[j - 1];  // leftmost point of a plateau
    const bool right_ok = j + 1 == v.size() || v[j] <= v[j + 1];
    if (!(left_ok && right_ok)) continue;
    double x = g[j];
    if (j > 0 && j + 1 < v.size() && std::isfinite(v[j - 1]) && std::isfinite(v[j + 1])) {
      x = parabolic_vertex(g[j - 1], g[j], g[j + 1], v[j - 1], v[j], v[j + 1]).x;
    }
    out.zeros.push_back(x);
  }
  return out;
}

inline TiltedRate tilted_rate(const std::function<double(double)>& F, const RateFunction& I, double zero_tol = 1e-9) {
  return tilted_rate(F, I.fn, zero_tol);
}

struct EmpiricalLD {
  int n = 0;
  double lo = 0.0, hi = 0.0;  // closed interval B
  double mass = 0.0;          // mu_n(B)
  double log_rate = -kInf;    // (1/n) log mu_n(B)
};

// Exact mass of {A_n in [lo, hi]} under the maximal entropy measure.
inline EmpiricalLD empirical_ld(const Potential& A, int n, double lo, double hi, unsigned threads = default_thread_count()) {
  if (n < 1) throw DomainError("n must be positive");
  const int K = A.depth();
  const int length = n + K - 1;
  if (length > kMaxEnumerationLength) {
    throw CapacityError("n + K - 1 = " + std::to_string(length) + " exceeds the enumeration cap of " +
                        std::to_string(kMaxEnumerationLength));
  }
  WordEnumerator e(A.d(), length, {window_sum(A, n)});
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto parts = e.run<double>(threads, [&](double& acc, std::span<const double> sums, double log_mass) {
    const double avg = sums[0] * inv_n;
    if (avg >= lo && avg <= hi) acc += std::exp(log_mass);
  });
  EmpiricalLD out;
  out.n = n;
  out.lo = lo;
  out.hi = hi;
  for (double p : parts) out.mass += p;
  out.mass = std::min(out.mass, 1.0);
  out.log_rate = out.mass > 0 ? std::log(out.mass) / static_cast<double>(n) : -kInf;
  return out;
}

}  // namespace thermoform::ldp
