#pragma once

// Bogoliubov's variational principle for nonlinear pressures
//   sup_rho { F(rho(A)) + h(rho) }   (F convex)   and   the concave analogue,
// reduced to one-dimensional problems over linear pressures P(f + sA).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thermoform/error.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/ldp.hpp"
#include "thermoform/shift.hpp"
#include "thermoform/transfer.hpp"

namespace thermoform::bogoliubov {

enum class NonlinearityKind { QuadraticConvex, QuadraticConcave, ConvexGrid, ConcaveGrid };

struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::QuadraticConvex;
  double beta = 1.0;
  GridFunction samples;  // grid variants only

  static Nonlinearity quadratic_convex(double beta) { return make_quadratic(NonlinearityKind::QuadraticConvex, beta); }
  static Nonlinearity quadratic_concave(double beta) { return make_quadratic(NonlinearityKind::QuadraticConcave, beta); }

  static Nonlinearity convex_grid(GridFunction F) {
    F.validate(3);
    if (!is_convex(F)) throw DomainError("ConvexGrid nonlinearity is not convex");
    F.convexity = Convexity::Convex;
    return Nonlinearity{NonlinearityKind::ConvexGrid, 0.0, std::move(F)};
  }

  static Nonlinearity concave_grid(GridFunction F) {
    F.validate(3);
    if (!is_convex(negate(F))) throw DomainError("ConcaveGrid nonlinearity is not concave");
    F.convexity = Convexity::Concave;
    return Nonlinearity{NonlinearityKind::ConcaveGrid, 0.0, std::move(F)};
  }

  bool convex() const { return kind == NonlinearityKind::QuadraticConvex || kind == NonlinearityKind::ConvexGrid; }

  double operator()(double x) const {
    switch (kind) {
      case NonlinearityKind::QuadraticConvex: return 0.5 * beta * x * x;
      case NonlinearityKind::QuadraticConcave: return -0.5 * beta * x * x;
      default: return samples.interpolate(x);
    }
  }

 private:
  static Nonlinearity make_quadratic(NonlinearityKind k, double beta) {
    if (!(beta > 0)) throw DomainError("beta must be positive");
    return Nonlinearity{k, beta, {}};
  }
};

enum class CriticalKind { LocalMax, LocalMin, Degenerate };

inline const char* to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::LocalMax: return "local_max";
    case CriticalKind::LocalMin: return "local_min";
    default: return "degenerate";
  }
}

struct CriticalPoint {
  double t = 0.0;         // variational parameter; the effective potential is f + scale * A
  double scale = 0.0;
  double v_value = 0.0;
  double residual = 0.0;  // |v'(t)|
  double v_second = 0.0;
  CriticalKind kind = CriticalKind::Degenerate;
};

struct SolveReport {
  std::vector<CriticalPoint> critical_points;  // sorted by t
  std::vector<CriticalPoint> global_optimizers;
  double nonlinear_pressure = 0.0;
  bool phase_transition = false;
  bool suspected_tie = false;  // a runner-up within 1e-6 relative but outside the tie tolerance
  bool edge_warning = false;   // optimizer on the edge of the scan window
  std::string value_convention;
  Potential f;
  Potential A;
};

struct SolverOptions {
  std::size_t scan_points = 2001;
  double root_tol = 1e-12;
  double tie_rel = 1e-9;
  double suspect_rel = 1e-6;
  double degenerate_curvature = 1e-9;
  double fd_step = 1e-4;
  SpectralOptions spectral{};
};

inline Potential max_entropy_base(const Potential& A) {
  return Potential::constant(A.config(), -std::log(static_cast<double>(A.d())));
}

// -beta/2 t^2 + P(f + beta t A). With f = -log d this is -beta/2 t^2 + P(beta t A) - log d.
inline double approximating_pressure(const Potential& f, const Potential& A, double beta, double t,
                                     const SpectralOptions& opt = {}) {
  if (!(beta > 0)) throw DomainError("beta must be positive");
  return -0.5 * beta * t * t + pressure(Potential::combine(f, A, beta * t), opt);
}

// v''(t) = beta (beta P''(beta t) - 1)
inline double approximating_second_derivative(const Potential& f, const Potential& A, double beta, double t,
                                              const SolverOptions& opt = {}) {
  return beta * (beta * pressure_second_derivative(f, A, beta * t, opt.fd_step, opt.spectral) - 1.0);
}

namespace detail {

inline void refuse_degenerate(const Potential& A) {
  if (is_coboundary_to_constant(A)) {
    throw DomainError("potential is cohomologous to a constant; phase-transition analysis does not apply");
  }
}

inline CriticalKind classify(double v2, double tol) {
  if (std::abs(v2) < tol) return CriticalKind::Degenerate;
  return v2 < 0 ? CriticalKind::LocalMax : CriticalKind::LocalMin;
}

// Roots of g on [lo, hi]: exact zeros on the grid plus sign changes, each
// refined by bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& g, const std::vector<double>& grid,
                                      const std::vector<double>& values, double zero_tol, double root_tol) {
  std::vector<double> roots;
  std::vector<bool> zero(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) zero[i] = std::abs(values[i]) <= zero_tol;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (zero[i]) {
      roots.push_back(grid[i]);
      continue;
    }
    if (i + 1 < values.size() && !zero[i + 1] && (values[i] < 0) != (values[i + 1] < 0)) {
      double a = grid[i], b = grid[i + 1];
      double ga = values[i];
      while (b - a > root_tol) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double gm = g(m);
        if (gm == 0.0) {
          a = b = m;
          break;
        }
        if ((gm < 0) == (ga < 0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  return roots;
}

inline void select_optimizers(SolveReport& r, bool maximize, const SolverOptions& opt) {
  if (r.critical_points.empty()) throw DomainError("no critical points found in the scan window");
  double best = maximize ? -kInf : kInf;
  for (const auto& c : r.critical_points) {
    if (maximize && c.kind == CriticalKind::LocalMin) continue;
    if (!maximize && c.kind == CriticalKind::LocalMax) continue;
    best = maximize ? std::max(best, c.v_value) : std::min(best, c.v_value);
  }
  const double tie = opt.tie_rel * (1.0 + std::abs(best));
  const double suspect = opt.suspect_rel * (1.0 + std::abs(best));
  for (const auto& c : r.critical_points) {
    if (maximize && c.kind == CriticalKind::LocalMin) continue;
    if (!maximize && c.kind == CriticalKind::LocalMax) continue;
    const double gap = std::abs(c.v_value - best);
    if (gap <= tie) {
      r.global_optimizers.push_back(c);
    } else if (gap <= suspect) {
      r.suspected_tie = true;
    }
  }
  r.nonlinear_pressure = best;
  r.phase_transition = r.global_optimizers.size() >= 2;
}

}  // namespace detail

// All t in [-W, W], W = sup_norm(A) + 1, with mu_{f + beta t A}(A) = t.
inline std::vector<CriticalPoint> solve_self_consistency(const Potential& f, const Potential& A, double beta,
                                                         const SolverOptions& opt = {}) {
  if (!(beta > 0)) throw DomainError("beta must be positive");
  detail::refuse_degenerate(A);
  const double W = sup_norm(A) + 1.0;
  const auto grid = symmetric_grid(W, opt.scan_points | 1u);
  auto g = [&](double t) { return mean_under(f, A, beta * t, opt.spectral) - t; };
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = g(grid[i]);
  const double zero_tol = 1e-13 * (1.0 + sup_norm(A));
  std::vector<CriticalPoint> out;
  for (double t : detail::scan_roots(g, grid, values, zero_tol, opt.root_tol)) {
    CriticalPoint c;
    c.t = t;
    c.scale = beta * t;
    const Equilibrium eq = equilibrium(Potential::combine(f, A, c.scale), opt.spectral);
    c.v_value = -0.5 * beta * t * t + eq.log_lambda();
    c.residual = beta * std::abs(expectation(eq, A) - t);
    c.v_second = approximating_second_derivative(f, A, beta, t, opt);
    c.kind = detail::classify(c.v_second, opt.degenerate_curvature);
    out.push_back(c);
  }
  return out;
}

// Dense samples of the approximating pressure on the self-consistency scan grid.
inline GridFunction approximating_curve(const Potential& f, const Potential& A, double beta, std::size_t points = 2001,
                                        const SpectralOptions& spectral = {}) {
  GridFunction v;
  v.grid = symmetric_grid(sup_norm(A) + 1.0, points | 1u);
  v.values.resize(v.grid.size());
  for (std::size_t i = 0; i < v.grid.size(); ++i) v.values[i] = approximating_pressure(f, A, beta, v.grid[i], spectral);
  return v;
}

namespace detail {

// Optimizes value(s) = sign * conj(s) + P(f + sA) over the finite samples of
// a conjugate grid; returns the report with t == s.
inline SolveReport optimize_over_conjugate(const Potential& f, const Potential& A, const GridFunction& conj, double sign,
                                           bool maximize, const SolverOptions& opt) {
  SolveReport r{{}, {}, 0.0, false, false, false, "", f, A};
  std::vector<std::size_t> fin;
  for (std::size_t i = 0; i < conj.size(); ++i) {
    if (std::isfinite(conj.values[i])) fin.push_back(i);
  }
  if (fin.empty()) throw DomainError("conjugate has no finite samples");
  std::vector<double> val(conj.size(), maximize ? -kInf : kInf);
  for (std::size_t i : fin) val[i] = sign * conj.values[i] + pressure(Potential::combine(f, A, conj.grid[i]), opt.spectral);
  auto better = [&](double a, double b) { return maximize ? a > b : a < b; };
  for (std::size_t k = 0; k < fin.size(); ++k) {
    const std::size_t i = fin[k];
    const bool left = k == 0 || better(val[i], val[fin[k - 1]]) || val[i] == val[fin[k - 1]];
    const bool right = k + 1 == fin.size() || !better(val[fin[k + 1]], val[i]);
    if (!(left && right)) continue;
    if (k > 0 && val[i] == val[fin[k - 1]]) continue;  // plateau: keep its first point
    CriticalPoint c;
    c.t = conj.grid[i];
    c.v_value = val[i];
    if (k > 0 && k + 1 < fin.size()) {
      const Vertex v = parabolic_vertex(conj.grid[fin[k - 1]], conj.grid[i], conj.grid[fin[k + 1]], val[fin[k - 1]],
                                        val[i], val[fin[k + 1]]);
      c.t = v.x;
      c.v_value = v.value;
    } else {
      r.edge_warning = r.edge_warning || fin.size() > 1;
    }
    c.scale = c.t;
    c.kind = maximize ? CriticalKind::LocalMax : CriticalKind::LocalMin;
    r.critical_points.push_back(c);
  }
  select_optimizers(r, maximize, opt);
  return r;
}

}  // namespace detail

// sup_s { -F*(s) + P(f + sA) }; for F = beta x^2 / 2 this is sup_t of the approximating pressure.
inline SolveReport nonlinear_pressure_convex(const Nonlinearity& F, const Potential& A, std::optional<Potential> f = std::nullopt,
                                             const SolverOptions& opt = {}) {
  if (!F.convex()) throw DomainError("nonlinear_pressure_convex needs a convex nonlinearity");
  const Potential base = f ? *f : max_entropy_base(A);
  if (F.kind == NonlinearityKind::QuadraticConvex) {
    SolveReport r{solve_self_consistency(base, A, F.beta, opt), {}, 0.0, false, false, false,
                  "-beta/2 t^2 + P(f + beta t A)", base, A};
    detail::select_optimizers(r, true, opt);
    const double W = sup_norm(A) + 1.0;
    for (const auto& c : r.global_optimizers) r.edge_warning = r.edge_warning || std::abs(c.t) >= W;
    return r;
  }
  const GridFunction conj = ldp::legendre_transform(F.samples);
  SolveReport r = detail::optimize_over_conjugate(base, A, conj, -1.0, true, opt);
  r.f = base;
  r.value_convention = "-F*(s) + P(f + sA)";
  return r;
}

// inf_s { G*(-s) + P(f + sA) } with G = -F convex.
inline SolveReport nonlinear_pressure_concave(const Nonlinearity& F, const Potential& A, std::optional<Potential> f = std::nullopt,
                                              const SolverOptions& opt = {}) {
  if (F.convex()) throw DomainError("nonlinear_pressure_concave needs a concave nonlinearity");
  const Potential base = f ? *f : max_entropy_base(A);
  if (F.kind == NonlinearityKind::QuadraticConcave) {
    detail::refuse_degenerate(A);
    const double beta = F.beta;
    // w(t) = beta/2 t^2 + P(f + beta t A) is strictly convex; w'(t) = beta (t + mu_{f+beta t A}(A)) increases.
    auto h = [&](double t) { return t + mean_under(base, A, beta * t, opt.spectral); };
    const double W = sup_norm(A) + 1.0;
    double a = -W, b = W;
    double ha = h(a);
    if (ha > 0 || h(b) < 0) throw DomainError("concave optimizer not bracketed by the scan window");
    while (b - a > opt.root_tol) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double hm = h(m);
      if (hm == 0.0) {
        a = b = m;
        break;
      }
      if ((hm < 0) == (ha < 0)) {
        a = m;
        ha = hm;
      } else {
        b = m;
      }
    }
    CriticalPoint c;
    c.t = 0.5 * (a + b);
    c.scale = beta * c.t;
    const Equilibrium eq = equilibrium(Potential::combine(base, A, c.scale), opt.spectral);
    c.v_value = 0.5 * beta * c.t * c.t + eq.log_lambda();
    c.residual = beta * std::abs(c.t + expectation(eq, A));
    c.v_second = beta * (beta * pressure_second_derivative(base, A, c.scale, opt.fd_step, opt.spectral) + 1.0);
    c.kind = CriticalKind::LocalMin;
    SolveReport r{{c}, {}, 0.0, false, false, false, "beta/2 t^2 + P(f + beta t A)", base, A};
    detail::select_optimizers(r, false, opt);
    return r;
  }
  // G*(-s) on the grid of s: reflect the conjugate of G = -F
  const GridFunction gstar = ldp::legendre_transform(negate(F.samples));
  GridFunction reflected;
  reflected.grid.resize(gstar.size());
  reflected.values.resize(gstar.size());
  for (std::size_t i = 0; i < gstar.size(); ++i) {
    reflected.grid[i] = -gstar.grid[gstar.size() - 1 - i];
    reflected.values[i] = gstar.values[gstar.size() - 1 - i];
  }
  SolveReport r = detail::optimize_over_conjugate(base, A, reflected, 1.0, false, opt);
  r.value_convention = "G*(-s) + P(f + sA)";
  return r;
}

inline SolveReport nonlinear_pressure(const Nonlinearity& F, const Potential& A, std::optional<Potential> f = std::nullopt,
                                      const SolverOptions& opt = {}) {
  return F.convex() ? nonlinear_pressure_convex(F, A, std::move(f), opt)
                    : nonlinear_pressure_concave(F, A, std::move(f), opt);
}

// |Bogoliubov value - sup_x { F(x) - I(x) }| with I the rate function of A under the maximal entropy measure.
inline double cross_check_varadhan(const SolveReport& report, const std::function<double(double)>& F, const Potential& A,
                                   double t_half = 8.0, std::size_t t_points = 4001, std::size_t x_points = 2001) {
  const ldp::RateFunction I = ldp::rate_function_of(A, t_half, t_points, x_points);
  return std::abs(report.nonlinear_pressure - ldp::varadhan_value(F, I));
}

inline Equilibrium equilibrium_for_optimizer(const SolveReport& report, std::size_t index,
                                             const SpectralOptions& opt = {}) {
  if (index >= report.global_optimizers.size()) throw DomainError("optimizer index out of range");
  return equilibrium(Potential::combine(report.f, report.A, report.global_optimizers[index].scale), opt);
}

}  // namespace thermoform::bogoliubov
