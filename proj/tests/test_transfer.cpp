#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "thermoform/analytic.hpp"
#include "thermoform/shift.hpp"
#include "thermoform/transfer.hpp"

using namespace thermoform;

namespace {

using Matrix = std::vector<std::vector<double>>;

// Dense operator M[w][prefix(a w)] = e^{A(a w)}.
Matrix dense(const Potential& p) {
  const auto t = p.tabulate(p.depth()).as_tabulated();
  const std::size_t d = static_cast<std::size_t>(p.d());
  const std::size_t D = t.table.size() / d;
  Matrix m(D, std::vector<double>(D, 0.0));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t w = 0; w < D; ++w) m[w][(a * D + w) / d] += std::exp(t.table[a * D + w]);
  }
  return m;
}

// log spectral radius via repeated squaring: log ||M^(2^j)||^(1/2^j).
double oracle_log_radius(const Matrix& m) {
  const std::size_t D = m.size();
  Matrix cur = m;
  double log_scale = 0.0;
  double power = 1.0;
  double est = 0.0;
  for (int j = 0; j < 60; ++j) {
    double mx = 0.0;
    for (const auto& row : cur) mx = std::max(mx, std::accumulate(row.begin(), row.end(), 0.0));
    for (auto& row : cur) {
      for (double& v : row) v /= mx;
    }
    log_scale += std::log(mx) / power;
    est = log_scale;
    Matrix next(D, std::vector<double>(D, 0.0));
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t k = 0; k < D; ++k) {
        if (cur[i][k] == 0.0) continue;
        for (std::size_t j2 = 0; j2 < D; ++j2) next[i][j2] += cur[i][k] * cur[k][j2];
      }
    }
    cur = std::move(next);
    power *= 2.0;
  }
  return est;
}

Potential max_entropy() { return Potential::constant(ShiftConfig::spins(), -std::log(2.0)); }

}  // namespace

TEST(BuildTransfer, ShapesAndEntries) {
  const auto zero = build_transfer(Potential::constant(ShiftConfig::spins(), 0.0));
  EXPECT_EQ(zero.dim(), 1u);
  EXPECT_EQ(zero.log_entry(0, 0), 0.0);
  EXPECT_EQ(zero.log_entry(0, 1), 0.0);
  const auto go = build_transfer(Potential::go());
  EXPECT_EQ(go.dim(), 2u);
  // prepend a to w: entry A(a w)
  EXPECT_EQ(go.log_entry(0, 0), 3.0);
  EXPECT_EQ(go.log_entry(1, 0), -5.0);
  EXPECT_EQ(go.log_entry(0, 1), 2.0);
  EXPECT_EQ(go.log_entry(1, 1), 1.0);
  EXPECT_EQ(go.target(1, 0), 0u);
  const auto half = build_transfer(max_entropy());
  EXPECT_NEAR(std::exp(half.log_entry(0, 1)), 0.5, 1e-16);
}

TEST(Perron, SimpleEigenvalues) {
  EXPECT_NEAR(pressure(Potential::constant(ShiftConfig::spins(), 0.0)), std::log(2.0), 1e-15);
  EXPECT_NEAR(pressure(max_entropy()), 0.0, 1e-15);
  EXPECT_NEAR(pressure(Potential::constant(ShiftConfig::alphabet(5), 0.0)), std::log(5.0), 1e-14);
}

TEST(Perron, GoAtOnePointEightMatchesExpandedForm) {
  // expanded closed form at t = 3 (beta = 0.6), evaluated in 40-digit arithmetic
  const double frozen = 5.400000094724213040805751436584714661293;
  EXPECT_NEAR(pressure(Potential::affine(Potential::go(), 1.8)), frozen, 1e-12);
  EXPECT_NEAR(analytic::go_expanded_pressure(3.0), frozen, 1e-12);
}

TEST(Perron, ResidualsAndNormalization) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + trial % 3, k = 1 + trial % 4;
    std::vector<double> table(checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(k)));
    for (double& v : table) v = u(rng);
    const auto p = Potential::tabulated(ShiftConfig::alphabet(d), k, table);
    const auto m = build_transfer(p);
    const auto pt = perron(m);
    EXPECT_LE(pt.right_residual, 1e-12);
    EXPECT_LE(pt.left_residual, 1e-12);
    EXPECT_NEAR(std::accumulate(pt.left.begin(), pt.left.end(), 0.0), 1.0, 1e-14);
    EXPECT_NEAR(std::inner_product(pt.left.begin(), pt.left.end(), pt.right.begin(), 0.0), 1.0, 1e-14);
    for (double v : pt.right) EXPECT_GT(v, 0.0);
    EXPECT_NEAR(pt.log_lambda, oracle_log_radius(dense(p)), 1e-11) << "trial " << trial;
  }
}

TEST(Perron, LargeScalesStayFinite) {
  for (double s : {-80.0, -25.0, 25.0, 80.0}) {
    const double P = pressure(Potential::affine(Potential::go(), s));
    EXPECT_TRUE(std::isfinite(P));
    EXPECT_NEAR(P, analytic::go_pressure(s, 1.0), 1e-12 * std::max(1.0, std::abs(P)));
  }
}

TEST(Perron, NonConvergenceReportsResidual) {
  SpectralOptions opt;
  opt.max_iterations = 2;
  try {
    perron(build_transfer(geometric_product(1.2, 6)), opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Pressure, TruncatedProductClosedForm) {
  const auto A = halving_product(10);
  const double uK = 1.0 - std::ldexp(1.0, -10);
  EXPECT_NEAR(pressure(Potential::affine(A, 0.7)), std::log(2.0 * std::cosh(0.7 * uK)), 1e-12);
}

TEST(Pressure, LipschitzInSupNorm) {
  const auto A = Potential::product(2.0, 0.0, {0.4, 0.3, 0.2, 0.1});
  const auto B = Potential::product(2.0, 0.0, {0.4, 0.3, 0.2, 0.1, 0.05, 0.025});
  for (double t : {-2.0, 0.5, 3.0}) {
    const double diff = std::abs(pressure(Potential::affine(A, t)) - pressure(Potential::affine(B, t)));
    EXPECT_LE(diff, sup_norm(Potential::combine(Potential::affine(A, t), Potential::affine(B, t).tabulate(6), -1.0)) + 1e-12);
  }
}

TEST(Pressure, ProductSymmetry) {
  const auto A = geometric_product(1.2, 8);
  for (double t = -3.0; t <= 3.0; t += 0.25) {
    EXPECT_NEAR(pressure(Potential::affine(A, t)), pressure(Potential::affine(A, -t)), 1e-10);
  }
}

TEST(PressureCurve, Examples) {
  const auto zero = pressure_curve(max_entropy(), Potential::constant(ShiftConfig::spins(), 0.0), {-1.0, 0.0, 1.0});
  for (double v : zero.values) EXPECT_NEAR(v, 0.0, 1e-15);
  const auto A = geometric_product(1.2, 10);
  const auto grid = uniform_grid(-3.0, 3.0, 25);
  const auto c = pressure_curve(max_entropy(), A, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(c.values[i], analytic::log_cosh(1.2 * grid[i]), 1e-11);
  EXPECT_NEAR(c.values[12], 0.0, 1e-15);
}

TEST(PressureCurve, GeneralBaseMatchesDirectPerron) {
  const auto f = Potential::go();
  const auto A = geometric_product(0.9, 5);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> ts(5);
  for (double& t : ts) t = u(rng);
  std::sort(ts.begin(), ts.end());
  const auto c = pressure_curve(f, A, ts);
  const double Pf = oracle_log_radius(dense(f.tabulate(5)));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(c.values[i], oracle_log_radius(dense(Potential::combine(f, A, ts[i]).tabulate(5))) - Pf, 1e-10);
  }
}

TEST(PressureCurve, Convexity) {
  const auto c = pressure_curve(max_entropy(), Potential::go(), uniform_grid(-4.0, 4.0, 161));
  for (std::size_t i = 1; i + 1 < c.size(); ++i) EXPECT_GE(c.values[i + 1] - 2 * c.values[i] + c.values[i - 1], -1e-9);
}

TEST(Equilibrium, MaximalEntropyIsUniform) {
  const auto eq = equilibrium(Potential::constant(ShiftConfig::spins(), 0.0).tabulate(2));
  for (double p : eq.stationary()) EXPECT_NEAR(p, 0.5, 1e-15);
  for (std::size_t w = 0; w < eq.dim(); ++w) {
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(eq.transition(w, a), 0.5, 1e-15);
  }
  for (double p : eq.cylinder_marginals(3)) EXPECT_NEAR(p, 0.125, 1e-15);
}

TEST(Equilibrium, ProductIsIid) {
  const double t = 0.6, u = 1.2;
  const auto eq = equilibrium(Potential::affine(geometric_product(u, 6), t));
  const auto [pp, pm] = analytic::product_iid_weights(t, u);
  const auto m1 = eq.cylinder_marginals(1);
  EXPECT_NEAR(m1[1], pp, 1e-10);
  EXPECT_NEAR(m1[0], pm, 1e-10);
  const auto m2 = eq.cylinder_marginals(2);
  EXPECT_NEAR(m2[0], pm * pm, 1e-10);
  EXPECT_NEAR(m2[1], pm * pp, 1e-10);
  EXPECT_NEAR(m2[3], pp * pp, 1e-10);
}

TEST(Equilibrium, GoTwoStateChain) {
  // With states = first coordinate, the chain prepends a to w with weight e^{s A(a w)} psi(a)/(lambda psi(w)).
  const double s = 0.8;
  const auto eq = equilibrium(Potential::affine(Potential::go(), s));
  // hand-built 2x2: matrix M[w][a] = e^{s A(a w)}; stationary of the prepending chain
  const double e00 = std::exp(3 * s), e10 = std::exp(2 * s), e01 = std::exp(-5 * s), e11 = std::exp(s);
  // left/right Perron vectors of L with L psi(w) = sum_a M[w][a] psi(a)
  const double tr = e00 + e11, det = e00 * e11 - e10 * e01;
  const double lam = 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
  // rows of L: w=0: (e00, e10) ; w=1: (e01, e11)
  const double psi0 = 1.0, psi1 = (lam - e00) / e10;    // L psi = lam psi, row 0
  const double nu0 = 1.0, nu1 = (lam - e00) / e01;      // nu L = lam nu, column 0
  const double z = nu0 * psi0 + nu1 * psi1;
  EXPECT_NEAR(eq.stationary()[0], nu0 * psi0 / z, 1e-12);
  EXPECT_NEAR(eq.stationary()[1], nu1 * psi1 / z, 1e-12);
  EXPECT_NEAR(eq.log_lambda(), std::log(lam), 1e-13);
  const auto m2 = eq.cylinder_marginals(2);
  // [a w] = pi_w Q[w -> a]
  for (int a = 0; a < 2; ++a) {
    for (std::size_t w = 0; w < 2; ++w) {
      EXPECT_NEAR(m2[static_cast<std::size_t>(a) * 2 + w], eq.stationary()[w] * eq.transition(w, a), 1e-15);
    }
  }
}

TEST(Equilibrium, ChainInvariants) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> table(27);
  for (double& v : table) v = u(rng);
  const auto eq = equilibrium(Potential::tabulated(ShiftConfig::alphabet(3), 3, table));
  std::vector<double> pushed(eq.dim(), 0.0);
  for (std::size_t w = 0; w < eq.dim(); ++w) {
    double row = 0.0;
    for (int a = 0; a < 3; ++a) {
      row += eq.transition(w, a);
      pushed[eq.next_state(w, a)] += eq.stationary()[w] * eq.transition(w, a);
    }
    EXPECT_NEAR(row, 1.0, 1e-12);
  }
  for (std::size_t w = 0; w < eq.dim(); ++w) EXPECT_NEAR(pushed[w], eq.stationary()[w], 1e-12);
  // marginal consistency: summing out the last coordinate of depth m+1 gives depth m
  for (int m = 1; m <= 4; ++m) {
    const auto a = eq.cylinder_marginals(m), b = eq.cylinder_marginals(m + 1);
    EXPECT_NEAR(std::accumulate(b.begin(), b.end(), 0.0), 1.0, 1e-12);
    for (std::size_t w = 0; w < a.size(); ++w) EXPECT_NEAR(a[w], b[3 * w] + b[3 * w + 1] + b[3 * w + 2], 1e-11);
    // shift invariance: summing out the first coordinate also gives depth m
    for (std::size_t w = 0; w < a.size(); ++w) EXPECT_NEAR(a[w], b[w] + b[a.size() + w] + b[2 * a.size() + w], 1e-11);
  }
}

TEST(Expectation, Examples) {
  const auto eq = equilibrium(Potential::affine(geometric_product(1.2, 6), 0.9));
  EXPECT_NEAR(expectation(eq, Potential::constant(ShiftConfig::spins(), 2.5)), 2.5, 1e-14);
  EXPECT_NEAR(expectation(eq, geometric_product(1.2, 6)), 1.2 * std::tanh(0.9 * 1.2), 1e-10);
  const auto go = Potential::go();
  const double s = 0.4, h = 1e-5;
  const double fd = (pressure(Potential::affine(go, s + h)) - pressure(Potential::affine(go, s - h))) / (2 * h);
  EXPECT_NEAR(expectation(equilibrium(Potential::affine(go, s)), go), fd, 1e-6);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(Potential::constant(ShiftConfig::spins(), 0.0)), std::log(2.0), 1e-15);
  EXPECT_NEAR(entropy(max_entropy()), std::log(2.0), 1e-15);
  const double t = 0.8, u = 1.2;
  EXPECT_NEAR(entropy(Potential::affine(geometric_product(u, 6), t)),
              std::log(2 * std::cosh(t * u)) - t * u * std::tanh(t * u), 1e-10);
  for (double s : {-3.0, -0.5, 0.7, 2.0}) {
    const double h = entropy(Potential::affine(Potential::go(), s));
    EXPECT_GE(h, -1e-12);
    EXPECT_LE(h, std::log(2.0) + 1e-12);
  }
}

TEST(SecondDerivative, Examples) {
  const auto zero = Potential::constant(ShiftConfig::spins(), 0.0);
  EXPECT_NEAR(pressure_second_derivative(max_entropy(), zero, 0.3), 0.0, 1e-12);
  const auto A = geometric_product(1.2, 8);
  for (double t : {-1.0, 0.0, 0.4, 1.5}) {
    const double sech = 1.0 / std::cosh(1.2 * t);
    EXPECT_NEAR(pressure_second_derivative(max_entropy(), A, t), 1.44 * sech * sech, 1e-5);
  }
}

TEST(SecondDerivative, GoSignsAtCriticalPoints) {
  // phi'' = beta (beta P''(beta t) - 1) is negative at the two local maxima and positive at the local minimum
  const double beta = 0.6;
  auto phi2 = [&](double t) {
    return beta * (beta * pressure_second_derivative(max_entropy(), Potential::go(), beta * t) - 1.0);
  };
  EXPECT_LT(phi2(-1.2474283907101), 0.0);
  EXPECT_GT(phi2(-0.2309968414759), 0.0);
  EXPECT_LT(phi2(2.9999991421564), 0.0);
}

TEST(Coboundary, Detection) {
  EXPECT_TRUE(is_coboundary_to_constant(Potential::constant(ShiftConfig::spins(), 1.3)));
  // B(x2) - B(x1) + 0.5 is cohomologous to 0.5
  const auto cob = Potential::tabulated(ShiftConfig::spins(), 2, {0.5, 0.5 + 0.7, 0.5 - 0.7, 0.5});
  EXPECT_TRUE(is_coboundary_to_constant(cob));
  EXPECT_FALSE(is_coboundary_to_constant(Potential::go()));
  EXPECT_FALSE(is_coboundary_to_constant(geometric_product(1.0, 4)));
}
