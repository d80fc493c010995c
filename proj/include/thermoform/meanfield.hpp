#pragma once

// Quadratic mean-field Gibbs probabilities: the Laplace-method mixture of
// eigenprobabilities, finite-n tilted measures by exact enumeration, the
// Delta functional and the mean-field free energies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "thermoform/analytic.hpp"
#include "thermoform/bogoliubov.hpp"
#include "thermoform/enumerate.hpp"
#include "thermoform/error.hpp"
#include "thermoform/shift.hpp"
#include "thermoform/transfer.hpp"

namespace thermoform::meanfield {

struct MixtureComponent {
  double t = 0.0;
  double weight = 0.0;
  double log_lambda = 0.0;
  double v_second = 0.0;
  double v_value = 0.0;
  Equilibrium eq;  // of f + beta t g; eigenmeasure from its left Perron data

  // nu_{f + beta t g} on words of length m
  std::vector<double> eigenmeasure(int m) const { return eq.eigenmeasure_marginals(m); }
};

struct MixtureResult {
  std::vector<MixtureComponent> components;
  double v_at_max = 0.0;
  bool gibbs_phase_transition = false;

  // sum_j w_j nu_j(psi) for an observable of finite depth
  double predict(const Potential& psi) const {
    const int k = psi.depth();
    const std::vector<double> table = psi.tabulate(k).as_tabulated().table;
    double s = 0.0;
    for (const auto& c : components) {
      const auto nu = c.eigenmeasure(k);
      double e = 0.0;
      for (std::size_t w = 0; w < nu.size(); ++w) e += nu[w] * table[w];
      s += c.weight * e;
    }
    return s;
  }

  // sum_j w_j mu_j(psi) with mu_j the equilibrium (invariant) measures instead
  double predict_invariant(const Potential& psi) const {
    double s = 0.0;
    for (const auto& c : components) s += c.weight * expectation(c.eq, psi);
    return s;
  }
};

// Weights proportional to mu_f(h_j) / sqrt|v''(t_j)| over the global maximizers of v.
inline MixtureResult laplace_mixture(const Potential& f, const Potential& g, double beta,
                                     const bogoliubov::SolverOptions& opt = {}) {
  const auto report = bogoliubov::nonlinear_pressure_convex(bogoliubov::Nonlinearity::quadratic_convex(beta), g, f, opt);
  MixtureResult out;
  out.v_at_max = report.nonlinear_pressure;
  const Equilibrium base = equilibrium(f, opt.spectral);
  std::vector<double> log_w;
  for (const auto& c : report.global_optimizers) {
    if (c.kind == bogoliubov::CriticalKind::Degenerate) {
      throw DomainError("Laplace method inapplicable: v'' vanishes at the optimizer t = " + std::to_string(c.t));
    }
    Equilibrium eq = equilibrium(Potential::combine(f, g, c.scale), opt.spectral);
    // h depends on the first depth-1 coordinates; integrate it against mu_f
    const int k1 = eq.depth() - 1;
    double mu_h = 0.0;
    if (k1 == 0) {
      mu_h = eq.perron().right[0];
    } else {
      const auto marg = base.cylinder_marginals(k1);
      for (std::size_t w = 0; w < marg.size(); ++w) mu_h += marg[w] * eq.perron().right[w];
    }
    log_w.push_back(std::log(mu_h) - 0.5 * std::log(std::abs(c.v_second)));
    out.components.push_back(MixtureComponent{c.t, 0.0, eq.log_lambda(), c.v_second, c.v_value, std::move(eq)});
  }
  const double mx = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  for (double lw : log_w) total += std::exp(lw - mx);
  for (std::size_t j = 0; j < log_w.size(); ++j) out.components[j].weight = std::exp(log_w[j] - mx) / total;
  out.gibbs_phase_transition = out.components.size() >= 2;
  return out;
}

// Indicator of the cylinder [w_0 ... w_{L-1}] as a depth-L potential.
inline Potential cylinder_indicator(const ShiftConfig& cfg, const Word& w) {
  if (w.empty()) throw DomainError("cylinder needs at least one symbol");
  const std::size_t n = checked_pow(static_cast<std::size_t>(cfg.d()), w.size());
  std::vector<double> table(n, 0.0);
  table[word_index(w, cfg.d())] = 1.0;
  return Potential::tabulated(cfg, static_cast<int>(w.size()), std::move(table));
}

// x_1 x_2 ... x_k on spins.
inline Potential spin_product(int k) {
  const ShiftConfig cfg = ShiftConfig::spins();
  const std::size_t n = checked_pow(2, static_cast<std::size_t>(k));
  std::vector<double> table(n);
  for (std::size_t w = 0; w < n; ++w) {
    double v = 1.0;
    for (const int sym : word_from_index(w, 2, k)) v *= cfg.label(sym);
    table[w] = v;
  }
  return Potential::tabulated(cfg, k, std::move(table));
}

// psi o T as a potential of depth k+1.
inline Potential shift_compose(const Potential& psi) {
  const int k = psi.depth();
  const std::vector<double> t = psi.tabulate(k).as_tabulated().table;
  const std::size_t d = static_cast<std::size_t>(psi.d());
  std::vector<double> out(t.size() * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t w = 0; w < t.size(); ++w) out[a * t.size() + w] = t[w];
  }
  return Potential::tabulated(psi.config(), k + 1, std::move(out));
}

struct EnumerationEstimate {
  int n = 0;
  int depth = 0;           // K, the depth of g
  double value = 0.0;
  double log_Z = 0.0;
  double Z = 0.0;          // may overflow to inf for large n beta; log_Z is authoritative
  int capacity = 0;        // length of the enumerated words
};

namespace detail {

inline bool is_constant(const Potential& f) {
  const std::vector<double> t = f.tabulate(f.depth()).as_tabulated().table;
  return std::all_of(t.begin(), t.end(), [&](double v) { return v == t.front(); });
}

// Shared-scale sum of exp(w) and exp(w) * values[j].
struct MultiLogSum {
  double max_log = -kInf;
  double weight = 0.0;
  std::vector<double> weighted;

  void add(double log_w, std::span<const double> values) {
    if (weighted.empty()) weighted.assign(values.size(), 0.0);
    if (log_w > max_log) {
      const double r = std::exp(max_log - log_w);
      weight *= r;
      for (double& x : weighted) x *= r;
      max_log = log_w;
    }
    const double e = std::exp(log_w - max_log);
    weight += e;
    for (std::size_t j = 0; j < values.size(); ++j) weighted[j] += e * values[j];
  }

  void merge(const MultiLogSum& o) {
    if (o.max_log == -kInf) return;
    if (weighted.empty()) weighted.assign(o.weighted.size(), 0.0);
    if (o.max_log > max_log) {
      const double r = std::exp(max_log - o.max_log);
      weight *= r;
      for (double& x : weighted) x *= r;
      max_log = o.max_log;
    }
    const double r = std::exp(o.max_log - max_log);
    weight += o.weight * r;
    for (std::size_t j = 0; j < weighted.size(); ++j) weighted[j] += o.weighted[j] * r;
  }
};

struct TiltedResult {
  double log_Z = 0.0;
  std::vector<double> ratios;
  int length = 0;
};

// Exact E[exp(beta S^2 / 2n) X_j] / E[exp(beta S^2 / 2n)] with S the n-window
// sum of g and X_j = observables[j] sums (already scaled by `scales[j]`).
inline TiltedResult tilted(const Potential& g, int n, double beta, const std::optional<Potential>& f,
                           const std::vector<WindowSum>& observables, const std::vector<double>& scales, int length,
                           unsigned threads) {
  if (n < 1) throw DomainError("n must be positive");
  if (!(beta >= 0)) throw DomainError("beta must be nonnegative");
  if (length > kMaxEnumerationLength) {
    throw CapacityError("n + K - 1 = " + std::to_string(length) + " exceeds the enumeration cap of " +
                        std::to_string(kMaxEnumerationLength));
  }
  std::optional<Equilibrium> base;
  if (f && !is_constant(*f)) base = equilibrium(*f);
  std::vector<WindowSum> sums{window_sum(g, n)};
  sums.insert(sums.end(), observables.begin(), observables.end());
  WordEnumerator e(g.d(), length, std::move(sums), std::move(base));
  const double c = beta / (2.0 * static_cast<double>(n));
  const std::size_t m = observables.size();
  const auto parts = e.run<MultiLogSum>(threads, [&](MultiLogSum& acc, std::span<const double> s, double log_mass) {
    acc.add(c * s[0] * s[0] + log_mass, s.subspan(1, m));
  });
  MultiLogSum total;
  for (const auto& p : parts) total.merge(p);
  TiltedResult r;
  r.log_Z = total.max_log + std::log(total.weight);
  r.length = length;
  for (std::size_t j = 0; j < m; ++j) r.ratios.push_back(total.weighted[j] / total.weight * scales[j]);
  return r;
}

}  // namespace detail

// m_n(psi) = mu_f(psi e^{beta n g_n^2 / 2}) / mu_f(e^{beta n g_n^2 / 2}) by summing over all words.
inline EnumerationEstimate enumerate_m_n(const Potential& psi, int n, double beta, const Potential& f, const Potential& g,
                                         unsigned threads = default_thread_count()) {
  if (!(psi.config() == g.config()) || !(f.config() == g.config())) throw DomainError("observables live on different alphabets");
  const int K = g.depth();
  const int length = std::max({n + K - 1, psi.depth(), f.depth() - 1});
  const auto r = detail::tilted(g, n, beta, f, {window_sum(psi, 1)}, {1.0}, length, threads);
  return EnumerationEstimate{n, K, r.ratios[0], r.log_Z, std::exp(r.log_Z), r.length};
}

// M^(n)(psi): the same tilt under the maximal entropy measure with psi replaced by its Birkhoff average.
inline EnumerationEstimate enumerate_M_n(const Potential& psi, int n, double beta, const Potential& g,
                                         unsigned threads = default_thread_count()) {
  if (!(psi.config() == g.config())) throw DomainError("observables live on different alphabets");
  const int K = g.depth();
  const int length = std::max(n + K - 1, n + psi.depth() - 1);
  const double inv = 1.0 / static_cast<double>(n);
  const auto r = detail::tilted(g, n, beta, std::nullopt, {window_sum(psi, n)}, {inv}, length, threads);
  return EnumerationEstimate{n, K, r.ratios[0], r.log_Z, std::exp(r.log_Z), r.length};
}

struct InvarianceDefect {
  double M_psi = 0.0;
  double M_psi_T = 0.0;
  double defect = 0.0;
  double bound = 0.0;  // 2 |psi|_inf / n
};

// |M^(n)(psi) - M^(n)(psi o T)| from one enumeration.
inline InvarianceDefect M_n_invariance_defect(const Potential& psi, int n, double beta, const Potential& g,
                                              unsigned threads = default_thread_count()) {
  const Potential psiT = shift_compose(psi);
  const int length = std::max(n + g.depth() - 1, n + psiT.depth() - 1);
  const double inv = 1.0 / static_cast<double>(n);
  const auto r = detail::tilted(g, n, beta, std::nullopt, {window_sum(psi, n), window_sum(psiT, n)}, {inv, inv}, length,
                                threads);
  InvarianceDefect out;
  out.M_psi = r.ratios[0];
  out.M_psi_T = r.ratios[1];
  out.defect = std::abs(out.M_psi - out.M_psi_T);
  out.bound = 2.0 * sup_norm(psi) * inv;
  return out;
}

// (1/2) E[A_n^2] under the i.i.d. spin measure with mean m, exactly.
inline double delta_functional(double m, const Potential& A, int n) {
  if (!(std::abs(m) <= 1.0)) throw DomainError("i.i.d. bias must lie in [-1, 1]");
  if (n < 1) throw DomainError("n must be positive");
  const analytic::ProductModel pm = analytic::ProductModel::from(A);
  const int K = static_cast<int>(pm.K());
  // n A_n = sum_i c_i x_i, c_i = sum of a_k over windows covering coordinate i
  double sum_c = 0.0, sum_c2 = 0.0;
  for (int i = 1; i <= n + K - 1; ++i) {
    double c = 0.0;
    for (int k = std::max(1, i - n + 1); k <= std::min(K, i); ++k) c += pm.a[static_cast<std::size_t>(k - 1)];
    sum_c += c;
    sum_c2 += c * c;
  }
  const double nn = static_cast<double>(n);
  return 0.5 * (m * m * sum_c * sum_c + sum_c2 * (1.0 - m * m)) / (nn * nn);
}

inline double iid_entropy(double m) {
  const double p = 0.5 * (1.0 + m), q = 0.5 * (1.0 - m);
  auto xlogx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  return -(xlogx(p) + xlogx(q));
}

struct FunctionalReport {
  double m = 0.0;  // i.i.d. bias of the measure
  double delta = 0.0;
  double f_plus = 0.0, f_minus = 0.0;
  double g_plus = 0.0, g_minus = 0.0;
};

inline FunctionalReport free_energy_functionals(double m, const Potential& A, double beta) {
  if (!(std::abs(m) <= 1.0)) throw DomainError("i.i.d. bias must lie in [-1, 1]");
  const analytic::ProductModel pm = analytic::ProductModel::from(A);
  const double mean = m * pm.u;
  const double h = iid_entropy(m);
  const double log_d = std::log(2.0);
  FunctionalReport r;
  r.m = m;
  r.delta = 0.5 * mean * mean;  // ergodic limit
  r.f_plus = -(beta * r.delta + h - log_d);
  r.f_minus = -(-beta * r.delta + h - log_d);
  r.g_plus = -(0.5 * beta * mean * mean + h - log_d);
  r.g_minus = -(-0.5 * beta * mean * mean + h - log_d);
  return r;
}

struct IidMinimum {
  double m = 0.0;
  double value = 0.0;
};

// min over the i.i.d. family of g+, by a grid scan followed by golden-section refinement.
inline IidMinimum minimize_g_plus(const Potential& A, double beta, std::size_t points = 2001) {
  auto obj = [&](double m) { return free_energy_functionals(m, A, beta).g_plus; };
  const auto grid = symmetric_grid(1.0, points | 1u);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (obj(grid[i]) < obj(grid[arg])) arg = i;
  }
  double a = grid[arg == 0 ? 0 : arg - 1];
  double b = grid[std::min(arg + 1, grid.size() - 1)];
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = obj(x2);
    }
  }
  const double m = 0.5 * (a + b);
  return IidMinimum{m, obj(m)};
}

struct HsCheck {
  double quadrature = 0.0;
  double exact = 0.0;
  double discrepancy = 0.0;
};

// (1/sqrt(2 pi)) int exp(-y^2/2 + sqrt(2) a y) dy against e^{a^2}, trapezoid rule.
inline HsCheck hubbard_stratonovich_check(double a, double step = 0.05) {
  if (!(std::abs(a) <= 20.0)) throw DomainError("|a| must not exceed 20");
  const double c = std::sqrt(2.0) * a;
  const double L = std::sqrt(2.0) * std::abs(a) + 12.0;
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * L / step));
  const double h = 2.0 * L / static_cast<double>(n);
  // Kahan-compensated sum
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double y = -L + h * static_cast<double>(i);
    double v = std::exp(-0.5 * y * y + c * y);
    if (i == 0 || i == n) v *= 0.5;
    const double yk = v - comp;
    const double tk = s + yk;
    comp = (tk - s) - yk;
    s = tk;
  }
  HsCheck r;
  r.quadrature = s * h / std::sqrt(2.0 * std::numbers::pi);
  r.exact = std::exp(a * a);
  r.discrepancy = std::abs(r.quadrature - r.exact);
  return r;
}

}  // namespace thermoform::meanfield
