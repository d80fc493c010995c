#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "thermoform/analytic.hpp"
#include "thermoform/shift.hpp"
#include "thermoform/transfer.hpp"

using namespace thermoform;
using namespace thermoform::analytic;

namespace {

Potential max_entropy() { return Potential::constant(ShiftConfig::spins(), -std::log(2.0)); }

// golden-section maximum of x s - log 2cosh(s u) over s, an oracle independent of the closed rate
double numeric_rate(double x, double u) {
  double lo = -40.0, hi = 40.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double s) { return x * s - log_cosh(s * u); };
  for (int i = 0; i < 200; ++i) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (f(a) < f(b)) lo = a; else hi = b;
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST(LogCosh, StableAndExact) {
  EXPECT_DOUBLE_EQ(log_2cosh(0.0), std::log(2.0));
  EXPECT_NEAR(log_2cosh(1.3), std::log(2 * std::cosh(1.3)), 1e-15);
  EXPECT_NEAR(log_2cosh(800.0), 800.0, 1e-12);
  EXPECT_NEAR(log_cosh(-800.0), 800.0 - std::log(2.0), 1e-12);
}

TEST(ProductClosedForms, DerivativesMatchFiniteDifferences) {
  const double u = 1.2, h = 1e-5;
  for (double t : {-2.0, -0.3, 0.0, 0.7, 2.5}) {
    EXPECT_NEAR(product_dpressure(t, u), (product_pressure(t + h, u) - product_pressure(t - h, u)) / (2 * h), 1e-8);
    EXPECT_NEAR(product_d2pressure(t, u), (product_dpressure(t + h, u) - product_dpressure(t - h, u)) / (2 * h), 1e-8);
  }
  EXPECT_EQ(product_d2pressure(1e4, 1.0), 0.0);
}

TEST(ProductClosedForms, PressureMatchesTransferOperator) {
  const auto A = geometric_product(1.2, 10);
  for (double t : {-1.5, 0.2, 1.1}) EXPECT_NEAR(pressure(Potential::affine(A, t)), product_pressure(t, 1.2), 1e-11);
}

TEST(ProductRate, FrozenValueAndOracle) {
  // 40-digit value of y atanh y + 0.5 log(1 - y^2) at y = 0.5/1.2
  EXPECT_NEAR(product_rate(0.5, 1.2), 0.08950992905961913411, 1e-15);
  for (double x : {-1.1, -0.6, 0.0, 0.3, 0.9, 1.15}) EXPECT_NEAR(product_rate(x, 1.2), numeric_rate(x, 1.2), 1e-9);
}

TEST(ProductRate, DomainAndShape) {
  EXPECT_EQ(product_rate(0.0, 1.2), 0.0);
  EXPECT_EQ(product_rate(1.2, 1.2), kInf);
  EXPECT_EQ(product_rate(-2.0, 1.2), kInf);
  EXPECT_EQ(product_rate(0.0, 0.0), 0.0);
  EXPECT_EQ(product_rate(0.1, 0.0), kInf);
  // at the boundary the rate tends to log 2
  EXPECT_NEAR(product_rate(1.2 * (1 - 1e-12), 1.2), std::log(2.0), 1e-10);
  for (double x = 0.05; x < 1.15; x += 0.05) {
    EXPECT_EQ(product_rate(x, 1.2), product_rate(-x, 1.2));
    EXPECT_GT(product_rate(x, 1.2), product_rate(x - 0.05, 1.2));
  }
}

TEST(ProductModel, FromPotentialAbsorbsCoupling) {
  const auto m = ProductModel::from(Potential::product(4.0, 0.0, {0.5, 0.25}));
  EXPECT_DOUBLE_EQ(m.a[0], 1.0);
  EXPECT_DOUBLE_EQ(m.a[1], 0.5);
  EXPECT_DOUBLE_EQ(m.u, 1.5);
  EXPECT_THROW(ProductModel::from(Potential::product(2.0, 0.1, {0.5})), DomainError);
  EXPECT_THROW(ProductModel::from(Potential::go()), DomainError);
  const auto al = m.alphas();
  EXPECT_DOUBLE_EQ(al[0], 0.5);
  EXPECT_DOUBLE_EQ(al[1], 0.0);
}

TEST(ProductEigenfunction, SatisfiesEigenEquation) {
  // L psi(x) = sum_a e^{t A(a x)} psi(a x) = lambda psi(x) with lambda = 2 cosh(t u)
  const ProductModel m({0.6, 0.3, 0.2, 0.1});
  const double t = 0.8;
  const double lambda = std::exp(product_pressure(t, m.u));
  for (std::size_t i = 0; i < 8; ++i) {
    const Word w = word_from_index(i, 2, 3);
    std::vector<double> x(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) x[j] = w[j] == 1 ? 1.0 : -1.0;
    double lhs = 0.0;
    for (double a : {-1.0, 1.0}) {
      std::vector<double> ax{a};
      ax.insert(ax.end(), x.begin(), x.end());
      double A = 0.0;
      for (std::size_t n = 0; n < m.K(); ++n) A += m.a[n] * ax[n];
      lhs += std::exp(t * A + product_eigenfunction_log(t, m, ax));
    }
    EXPECT_NEAR(lhs, lambda * std::exp(product_eigenfunction_log(t, m, x)), 1e-12);
  }
  EXPECT_THROW(product_eigenfunction_log(t, m, std::vector<double>{1.0}), LengthError);
}

TEST(ProductEigenmeasure, MarginalsAndNormalization) {
  const ProductModel m({0.6, 0.3, 0.2});
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto [p, q] = product_eigenmeasure_marginal(0.9, m, n);
    EXPECT_NEAR(p + q, 1.0, 1e-15);
    EXPECT_GT(p, 0.5);
  }
  const auto [p3, q3] = product_eigenmeasure_marginal(0.9, m, 3);
  const auto [pi, qi] = product_iid_weights(0.9, m.u);
  EXPECT_NEAR(p3, pi, 1e-15);
  EXPECT_NEAR(q3, qi, 1e-15);
  EXPECT_THROW(product_eigenmeasure_marginal(0.9, m, 0), DomainError);
  EXPECT_THROW(product_eigenmeasure_marginal(0.9, m, 4), DomainError);
}

TEST(ProductEigenmeasure, MuOfEigenfunctionByEnumeration) {
  const ProductModel m({0.6, 0.3, 0.2, 0.1});
  const double t = -1.3;
  double s = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const Word w = word_from_index(i, 2, 3);
    std::vector<double> x(3);
    for (std::size_t j = 0; j < 3; ++j) x[j] = w[j] == 1 ? 1.0 : -1.0;
    s += std::exp(product_eigenfunction_log(t, m, x)) / 8.0;
  }
  EXPECT_NEAR(mu_of_product_eigenfunction(t, m), s, 1e-14);
}

TEST(GoPressure, MatchesPerronAndExpandedForm) {
  for (double t : {-3.0, -1.0, -0.2, 0.0, 0.5, 2.0, 3.0}) {
    EXPECT_NEAR(go_pressure(t, 0.6), pressure(Potential::affine(Potential::go(), 0.6 * t)), 1e-12);
    EXPECT_NEAR(go_expanded_pressure(t), go_pressure(t, 0.6), 1e-11 * std::max(1.0, std::abs(go_pressure(t, 0.6))));
  }
  EXPECT_NEAR(go_pressure(0.0, 1.0), std::log(2.0), 1e-15);
}

TEST(GoPressure, DerivativeIsEquilibriumMean) {
  const double h = 1e-5;
  for (double s : {-1.0, 0.3, 1.5}) {
    const double fd = (go_pressure(s + h, 1.0) - go_pressure(s - h, 1.0)) / (2 * h);
    EXPECT_NEAR(fd, expectation(equilibrium(Potential::affine(Potential::go(), s)), Potential::go()), 1e-7);
  }
}

TEST(GoPressure, NotEven) {
  // unlike the product case the curve is not symmetric
  const auto curve = [](double t) { return go_pressure(t, 1.0) - std::log(2.0); };
  EXPECT_GT(std::abs(curve(1.0) - curve(-1.0)), 0.1);
}

TEST(GoPressure, GrowthRatesAreErgodicExtremes) {
  EXPECT_NEAR(go_pressure(200.0, 1.0) / 200.0, ergodic_max(Potential::go()), 1e-2);
  EXPECT_NEAR(go_pressure(-200.0, 1.0) / -200.0, ergodic_min(Potential::go()), 1e-2);
  (void)max_entropy;
}
