#pragma once

// Closed forms for the product-type spin potential A(x) = sum a_n x_n and
// for the four-cylinder potential go = 3 I[-1,-1] - 5 I[-1,1] + I[1,1] + 2 I[1,-1].

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "thermoform/error.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/shift.hpp"

namespace thermoform::analytic {

// log(1 + e^{-x}) for x >= 0 without cancellation.
inline double log1p_exp_neg(double x) { return std::log1p(std::exp(-x)); }

// log(2 cosh(x))
inline double log_2cosh(double x) {
  const double ax = std::abs(x);
  return ax + log1p_exp_neg(2.0 * ax);
}

inline double log_cosh(double x) { return log_2cosh(x) - std::log(2.0); }

struct ProductModel {
  std::vector<double> a;  // already multiplied by J/2
  double u = 0.0;         // sum of a

  explicit ProductModel(std::vector<double> coefficients) : a(std::move(coefficients)) {
    for (double x : a) u += x;
  }

  // From a Product potential with h = 0; J/2 is absorbed into the coefficients.
  static ProductModel from(const Potential& p) {
    const auto* r = std::get_if<Product>(&p.rep());
    if (r == nullptr) throw DomainError("not a product potential");
    if (r->h != 0.0) throw DomainError("closed forms need h = 0");
    std::vector<double> c = r->a;
    for (double& x : c) x *= r->J / 2.0;
    return ProductModel(std::move(c));
  }

  std::size_t K() const { return a.size(); }

  // alpha_n = u - sum_{k <= n} a_k, n = 1..K (alpha_K == 0 for the truncation).
  std::vector<double> alphas() const {
    std::vector<double> al(a.size());
    double partial = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
      partial += a[n];
      al[n] = u - partial;
    }
    if (!al.empty()) al.back() = 0.0;
    return al;
  }
};

inline double product_pressure(double t, double u) { return log_2cosh(t * u); }
inline double product_dpressure(double t, double u) { return u * std::tanh(t * u); }
inline double product_d2pressure(double t, double u) {
  const double c = std::cosh(t * u);
  return std::isfinite(c) ? u * u / (c * c) : 0.0;
}

// Rate function of Birkhoff averages of A under the maximal entropy measure:
// y atanh(y) - log cosh(atanh(y)) with y = x/u, +inf for |x| >= u.
inline double product_rate(double x, double u) {
  if (u == 0.0) return x == 0.0 ? 0.0 : kInf;
  const double y = std::abs(x / u);
  if (y >= 1.0) return kInf;
  const double yc = std::min(y, 1.0 - 1e-14);
  const double at = 0.5 * std::log((1.0 + yc) / (1.0 - yc));
  // log cosh(atanh y) = -0.5 log(1 - y^2)
  return yc * at + 0.5 * std::log1p(-yc * yc);
}

// log psi_{tA}(x) = t sum alpha_n x_n over the first K-1 coordinates.
inline double product_eigenfunction_log(double t, const ProductModel& m, std::span<const double> spins) {
  const auto al = m.alphas();
  const std::size_t need = m.K() == 0 ? 0 : m.K() - 1;
  if (spins.size() < need) throw LengthError("word too short for eigenfunction", need);
  double s = 0.0;
  for (std::size_t n = 0; n < need; ++n) s += al[n] * spins[n];
  return t * s;
}

// nu_n({+1}), nu_n({-1}) of the product eigenprobability, n = 1..K.
inline std::pair<double, double> product_eigenmeasure_marginal(double t, const ProductModel& m, std::size_t n) {
  if (n < 1 || n > m.K()) throw DomainError("eigenmeasure coordinate out of range");
  double partial = 0.0;
  for (std::size_t k = 0; k < n; ++k) partial += m.a[k];
  const double plus = 1.0 / (1.0 + std::exp(-2.0 * t * partial));
  const double minus = 1.0 / (1.0 + std::exp(2.0 * t * partial));
  return {plus, minus};
}

// Equilibrium weights p_{+1}, p_{-1} of the i.i.d. equilibrium for tA.
inline std::pair<double, double> product_iid_weights(double t, double u) {
  const double plus = 1.0 / (1.0 + std::exp(-2.0 * t * u));
  return {plus, 1.0 - plus};
}

// log mu(psi_{tA}) under the maximal entropy measure: sum_n log cosh(t alpha_n).
inline double log_mu_of_product_eigenfunction(double t, const ProductModel& m) {
  double s = 0.0;
  for (double al : m.alphas()) s += log_cosh(t * al);
  return s;
}

inline double mu_of_product_eigenfunction(double t, const ProductModel& m) {
  return std::exp(log_mu_of_product_eigenfunction(t, m));
}

// Pressure of (beta t) go via the larger root of the 2x2 characteristic
// polynomial. With s = beta t the matrix is [[e^{3s}, e^{2s}], [e^{-5s}, e^{s}]].
inline double go_pressure(double t, double beta) {
  const double s = beta * t;
  // lambda = (a + d + sqrt((a - d)^2 + 4 bc)) / 2 with a = e^{3s}, d = e^{s}, bc = e^{-3s};
  // everything is scaled by e^{m}, m the largest of 3s, s, -1.5s
  const double m = std::max({3.0 * s, s, -1.5 * s});
  const double a = std::exp(3.0 * s - m), d = std::exp(s - m), bc = std::exp(-3.0 * s - 2.0 * m);
  return m + std::log(0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4.0 * bc)));
}

// The expanded beta = 0.6 closed form
//   log( 1/2 e^{-3t} ( e^{3.6t} + e^{4.8t} + e^{2.1t} sqrt(4 + e^{3t} - 2 e^{4.2t} + e^{5.4t}) ) ),
// evaluated with every exponent shifted by the largest one.
inline double go_expanded_pressure(double t) {
  // the square root is e^{2.7t} sqrt(4 e^{-5.4t} + e^{-2.4t} - 2 e^{-1.2t} + 1) when t >= 0
  const double root_scale = t >= 0 ? 2.7 * t : 0.0;
  const double inner = 4.0 * std::exp(-2.0 * root_scale) + std::exp(3.0 * t - 2.0 * root_scale) -
                       2.0 * std::exp(4.2 * t - 2.0 * root_scale) + std::exp(5.4 * t - 2.0 * root_scale);
  const double e1 = 3.6 * t, e2 = 4.8 * t, e3 = 2.1 * t + root_scale;
  const double m = std::max({e1, e2, e3});
  const double sum = std::exp(e1 - m) + std::exp(e2 - m) + std::exp(e3 - m) * std::sqrt(std::max(inner, 0.0));
  return std::log(0.5) - 3.0 * t + m + std::log(sum);
}

}  // namespace thermoform::analytic
