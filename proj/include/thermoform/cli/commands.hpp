#pragma once

// The CLI subcommands as library functions producing CSV tables.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "thermoform/analytic.hpp"
#include "thermoform/bogoliubov.hpp"
#include "thermoform/cli/config.hpp"
#include "thermoform/cli/csv.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/ldp.hpp"
#include "thermoform/meanfield.hpp"
#include "thermoform/parallel.hpp"
#include "thermoform/transfer.hpp"

namespace thermoform::cli {

struct CommandOutput {
  Csv csv;
  std::string summary;  // human-readable notes, written to stderr by the CLI
};

inline Potential config_A(const ExperimentConfig& c) { return build_potential(c.potential); }
inline Potential config_f(const ExperimentConfig& c) { return build_potential(c.f, config_A(c).config()); }

inline std::vector<double> config_t_grid(const ExperimentConfig& c) { return uniform_grid(c.t_min, c.t_max, c.t_points); }

inline bogoliubov::Nonlinearity config_nonlinearity(const ExperimentConfig& c) {
  using bogoliubov::Nonlinearity;
  if (c.nonlinearity == "quadratic_convex") return Nonlinearity::quadratic_convex(c.beta);
  if (c.nonlinearity == "quadratic_concave") return Nonlinearity::quadratic_concave(c.beta);
  GridFunction F{c.F_x, c.F_values, Convexity::Unknown};
  if (c.nonlinearity == "convex_grid") return Nonlinearity::convex_grid(std::move(F));
  return Nonlinearity::concave_grid(std::move(F));
}

inline std::string word_label(const ShiftConfig& cfg, std::size_t index, int length) {
  std::string s;
  for (const int sym : word_from_index(index, cfg.d(), length)) {
    if (!s.empty()) s += ';';
    s += format_number(cfg.label(sym));
  }
  return s;
}

// t, P(f + t beta A), c-hat = P(f + t beta A) - P(f), c = c-hat + log d
inline CommandOutput cmd_pressure(const ExperimentConfig& c) {
  const Potential A = config_A(c), f = config_f(c);
  const double Pf = pressure(f);
  const double log_d = std::log(static_cast<double>(A.d()));
  CommandOutput out;
  out.csv.header = {"t", "P", "c_hat", "c"};
  for (double t : config_t_grid(c)) {
    const double P = pressure(Potential::combine(f, A, t * c.beta));
    out.csv.add_numbers({t, P, P - Pf, P - Pf + log_d});
  }
  return out;
}

inline std::string describe(const bogoliubov::SolveReport& r) {
  std::ostringstream os;
  os << "value convention: " << r.value_convention << '\n';
  for (const auto& cp : r.critical_points) {
    os << "critical t=" << format_number(cp.t) << " v=" << format_number(cp.v_value)
       << " v''=" << format_number(cp.v_second) << " residual=" << format_number(cp.residual) << " "
       << bogoliubov::to_string(cp.kind) << '\n';
  }
  os << "nonlinear pressure: " << format_number(r.nonlinear_pressure) << '\n';
  os << "global optimizers: " << r.global_optimizers.size() << '\n';
  os << "phase transition: " << (r.phase_transition ? "yes" : "no") << '\n';
  if (r.suspected_tie) os << "warning: suspected tie between optimizers\n";
  if (r.edge_warning) os << "warning: optimizer on the edge of the scan window\n";
  return os.str();
}

// t, R(t) = mu_{f + beta t A}(A), t
inline CommandOutput cmd_selfconsistency(const ExperimentConfig& c) {
  const Potential A = config_A(c), f = config_f(c);
  CommandOutput out;
  out.csv.header = {"t", "R", "identity"};
  for (double t : config_t_grid(c)) out.csv.add_numbers({t, mean_under(f, A, c.beta * t), t});
  out.summary = describe(bogoliubov::nonlinear_pressure_convex(bogoliubov::Nonlinearity::quadratic_convex(c.beta), A, f));
  return out;
}

// x, I_A(x), I^{F,A}(x) with F from the configured nonlinearity
inline CommandOutput cmd_rate(const ExperimentConfig& c) {
  const Potential A = config_A(c);
  const ldp::RateFunction I = ldp::rate_function_of(A, c.rate_t_half, c.rate_t_points | 1u, c.x_points);
  const bogoliubov::Nonlinearity F = config_nonlinearity(c);
  const ldp::TiltedRate tilted = ldp::tilted_rate([&](double x) { return F(x); }, I);
  CommandOutput out;
  out.csv.header = {"x", "I", "I_tilted"};
  for (std::size_t i = 0; i < I.fn.size(); ++i) out.csv.add_numbers({I.fn.grid[i], I.fn.values[i], tilted.fn.values[i]});
  std::ostringstream os;
  os << "zeros of the tilted rate:";
  for (double z : tilted.zeros) os << ' ' << format_number(z);
  os << '\n';
  out.summary = os.str();
  return out;
}

inline CommandOutput cmd_bogoliubov(const ExperimentConfig& c) {
  const Potential A = config_A(c), f = config_f(c);
  const auto r = bogoliubov::nonlinear_pressure(config_nonlinearity(c), A, f);
  CommandOutput out;
  out.csv.header = {"t", "s", "value", "v_second", "kind", "global", "nonlinear_pressure", "phase_transition"};
  for (const auto& cp : r.critical_points) {
    bool global = false;
    for (const auto& g : r.global_optimizers) global = global || g.t == cp.t;
    out.csv.add({format_number(cp.t), format_number(cp.scale), format_number(cp.v_value), format_number(cp.v_second),
                 bogoliubov::to_string(cp.kind), global ? "1" : "0", format_number(r.nonlinear_pressure),
                 r.phase_transition ? "1" : "0"});
  }
  out.summary = describe(r);
  return out;
}

inline CommandOutput cmd_mixture(const ExperimentConfig& c) {
  const Potential A = config_A(c), f = config_f(c);
  if (!(c.beta > 0)) throw DomainError("beta must be positive");
  const auto mix = meanfield::laplace_mixture(f, A, c.beta);
  const int depth = c.mixture_depth;
  CommandOutput out;
  out.csv.header = {"t", "weight", "log_lambda", "v_second"};
  const std::size_t words = checked_pow(static_cast<std::size_t>(A.d()), static_cast<std::size_t>(depth));
  for (std::size_t w = 0; w < words; ++w) out.csv.header.push_back("nu[" + word_label(A.config(), w, depth) + "]");
  for (const auto& comp : mix.components) {
    std::vector<double> row{comp.t, comp.weight, comp.log_lambda, comp.v_second};
    for (double p : comp.eigenmeasure(depth)) row.push_back(p);
    out.csv.add_numbers(row);
  }
  std::ostringstream os;
  os << "components: " << mix.components.size() << "\nv at max: " << format_number(mix.v_at_max)
     << "\nmean-field phase transition: " << (mix.gibbs_phase_transition ? "yes" : "no") << '\n';
  out.summary = os.str();
  return out;
}

inline Potential config_observable(const ExperimentConfig& c, const ShiftConfig& cfg) {
  if (c.observable == "spin_product") return meanfield::spin_product(c.spins);
  return meanfield::cylinder_indicator(cfg, word_from_labels(cfg, c.cylinder));
}

// n, m_n(psi) or M^(n)(psi), Z_n, mixture prediction, gap
inline CommandOutput cmd_enumerate(const ExperimentConfig& c, unsigned threads = default_thread_count()) {
  const Potential A = config_A(c), f = config_f(c);
  const Potential psi = config_observable(c, A.config());
  double prediction = kInf;
  std::string note;
  if (c.beta > 0) {
    try {
      const auto mix = meanfield::laplace_mixture(f, A, c.beta);
      prediction = c.mode == "m_n" ? mix.predict(psi) : mix.predict_invariant(psi);
    } catch (const DomainError& e) {
      note = std::string("no mixture prediction: ") + e.what() + '\n';
    }
  } else {
    prediction = expectation(equilibrium(f), psi);  // no tilt, and mu_f is invariant
  }
  CommandOutput out;
  out.csv.header = {"n", c.mode, "Z", "log_Z", "prediction", "gap"};
  for (int n : c.n_list) {
    const auto e = c.mode == "m_n" ? meanfield::enumerate_m_n(psi, n, c.beta, f, A, threads)
                                   : meanfield::enumerate_M_n(psi, n, c.beta, A, threads);
    const double gap = std::isfinite(prediction) ? std::abs(e.value - prediction) : kInf;
    out.csv.add_numbers({static_cast<double>(n), e.value, e.Z, e.log_Z, prediction, gap});
  }
  out.summary = note;
  return out;
}

inline double figure21_beta() { return (std::cbrt(4.0) + 0.2) / 2.0; }

// Figures 1-3: R_u(t) = u tanh(t u) against the identity.
inline Csv figure_R(double u, const std::vector<double>& t) {
  Csv csv;
  csv.header = {"t", "R", "identity"};
  for (double x : t) csv.add_numbers({x, analytic::product_dpressure(x, u), x});
  return csv;
}

// Figure 4: the go potential at beta = 0.6.
inline Csv figure_4(const std::vector<double>& t) {
  const double beta = 0.6;
  const Potential A = Potential::go();
  const Potential f = bogoliubov::max_entropy_base(A);
  Csv csv;
  csv.header = {"t", "beta_t", "dP", "phi", "phi_second"};
  for (double x : t) {
    const Equilibrium eq = equilibrium(Potential::combine(f, A, beta * x));
    const double dP = beta * expectation(eq, A);
    const double phi = -0.5 * beta * x * x + eq.log_lambda();
    csv.add_numbers({x, beta * x, dP, phi, bogoliubov::approximating_second_derivative(f, A, beta, x)});
  }
  return csv;
}

// Figure 21: y -> I_A(y) - beta y^2 normalized to minimum 0, a_n = 2^{-n}, J = 2.
inline ldp::TiltedRate figure_21_curve(std::size_t points = 2001) {
  const double beta = figure21_beta();
  const double u = 1.0;  // J/2 sum 2^{-n}
  GridFunction I;
  I.grid = symmetric_grid(u, points | 1u);
  I.values.resize(I.grid.size());
  for (std::size_t i = 0; i < I.grid.size(); ++i) I.values[i] = analytic::product_rate(I.grid[i], u);
  return ldp::tilted_rate([&](double y) { return beta * y * y; }, I);
}

inline Csv figure_21(std::size_t points = 2001) {
  const ldp::TiltedRate r = figure_21_curve(points);
  Csv csv;
  csv.header = {"y", "tilted_rate"};
  for (std::size_t i = 0; i < r.fn.size(); ++i) csv.add_numbers({r.fn.grid[i], r.fn.values[i]});
  return csv;
}

inline CommandOutput cmd_figure(int id, const ExperimentConfig& c) {
  CommandOutput out;
  switch (id) {
    case 1: out.csv = figure_R(1.0, config_t_grid(c)); break;
    case 2: out.csv = figure_R(1.2, config_t_grid(c)); break;
    case 3: out.csv = figure_R(0.8, config_t_grid(c)); break;
    case 4: out.csv = figure_4(config_t_grid(c)); break;
    case 21: out.csv = figure_21(c.x_points); break;
    default: throw ConfigError("unknown figure id " + std::to_string(id) + " (expected 1, 2, 3, 4 or 21)");
  }
  return out;
}

}  // namespace thermoform::cli
