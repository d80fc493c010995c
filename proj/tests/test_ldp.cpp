#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "thermoform/analytic.hpp"
#include "thermoform/ldp.hpp"

using namespace thermoform;
using namespace thermoform::ldp;

namespace {

GridFunction sample(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
  GridFunction g;
  g.grid = uniform_grid(lo, hi, n);
  for (double x : g.grid) g.values.push_back(f(x));
  return g;
}

// brute binomial mass of {|#plus/n - 1/2| ...}: P(mean of n fair spins in [lo, hi])
double binomial_mass(int n, double lo, double hi) {
  double m = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double avg = (2.0 * k - n) / n;
    if (avg >= lo && avg <= hi) m += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  }
  return m;
}

}  // namespace

TEST(Legendre, HalfSquareIsSelfDual) {
  const auto f = sample([](double x) { return 0.5 * x * x; }, -4, 4, 801);
  const auto g = legendre_transform(f);
  EXPECT_NEAR(g.grid.front(), -4.0, 0.02);
  EXPECT_NEAR(g.grid.back(), 4.0, 0.02);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.grid[j]) < 3.5) { EXPECT_NEAR(g.values[j], 0.5 * g.grid[j] * g.grid[j], 1e-9); }
  }
}

TEST(Legendre, ScaledSquare) {
  const double beta = 2.5;
  const auto f = sample([&](double x) { return 0.5 * beta * x * x; }, -2, 2, 801);
  const auto g = legendre_transform(f);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(g.grid[j]) < 4.5) { EXPECT_NEAR(g.values[j], g.grid[j] * g.grid[j] / (2 * beta), 1e-9); }
  }
}

TEST(Legendre, LinearHasPointDomain) {
  const auto f = sample([](double x) { return 1.5 * x + 0.25; }, -1, 1, 101);
  const auto g = legendre_transform(f);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g.grid[1], 1.5, 1e-12);
  EXPECT_NEAR(g.values[1], -0.25, 1e-12);
  EXPECT_EQ(g.values[0], kInf);
  EXPECT_EQ(g.values[2], kInf);
}

TEST(Legendre, RejectsNonconvexUnlessHull) {
  const auto f = sample([](double x) { return std::cos(3 * x); }, -1, 1, 101);
  EXPECT_THROW(legendre_transform(f), DomainError);
  EXPECT_NO_THROW(legendre_transform(f, 0, true));
}

TEST(Legendre, BiconjugationRecoversConvexFunction) {
  const auto f = sample([](double x) { return std::cosh(x) + 0.3 * x; }, -2, 2, 801);
  const auto g = legendre_transform(f, 1601);
  const auto ff = legendre_transform(g, 801);
  for (std::size_t j = 0; j < ff.size(); ++j) {
    if (std::abs(ff.grid[j]) < 1.8) { EXPECT_NEAR(ff.values[j], std::cosh(ff.grid[j]) + 0.3 * ff.grid[j], 1e-6); }
  }
}

TEST(Legendre, FenchelYoungInequality) {
  const auto f = sample([](double x) { return x * x * x * x + x; }, -1.5, 1.5, 601);
  const auto g = legendre_transform(f);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ux(-1.5, 1.5), us(g.grid.front(), g.grid.back());
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng), s = us(rng);
    EXPECT_GE(f.interpolate(x) + g.interpolate(s), s * x - 1e-6);
  }
}

TEST(RateFunction, ProductMatchesClosedForm) {
  const auto I = rate_function_of(geometric_product(1.2, 10));
  EXPECT_NEAR(I.lower, -1.2, 1e-12);
  EXPECT_NEAR(I.upper, 1.2, 1e-12);
  EXPECT_NEAR(I.minimizer, 0.0, 1e-12);
  for (double x : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.9}) EXPECT_NEAR(I.evaluate(x), analytic::product_rate(x, 1.2), 1e-6);
  EXPECT_NEAR(I.evaluate(0.5), 0.08950992905961913411, 1e-7);
  EXPECT_EQ(I.evaluate(1.3), kInf);
}

TEST(RateFunction, GoVanishesAtUniformMean) {
  // the maximal entropy mean of go is (3 - 5 + 2 + 1) / 4
  const auto I = rate_function_of(Potential::go());
  // three-point slope at t-spacing 0.004
  EXPECT_NEAR(I.minimizer, 0.25, 1e-4);
  EXPECT_NEAR(I.evaluate(0.25), 0.0, 1e-8);
  EXPECT_NEAR(I.upper, 3.0, 1e-12);
  EXPECT_NEAR(I.lower, -1.5, 1e-12);
  for (std::size_t j = 0; j < I.fn.size(); ++j) {
    if (std::isfinite(I.fn.values[j])) { EXPECT_GE(I.fn.values[j], -1e-12); }
  }
  EXPECT_TRUE(is_convex(I.fn, 1e-7));
}

TEST(RateFunction, ZeroPotentialIsDegenerate) {
  const auto I = rate_function_of(Potential::constant(ShiftConfig::spins(), 0.0));
  EXPECT_TRUE(I.degenerate());
  EXPECT_EQ(I.evaluate(0.0), 0.0);
  EXPECT_EQ(I.evaluate(0.1), kInf);
}

TEST(RateFunction, EntropyIdentityOnSupport) {
  // I(x) = log 2 - h(mu_t) at x = P'(t)
  const auto A = Potential::go();
  const auto I = rate_function_of(A);
  const Potential half = Potential::constant(ShiftConfig::spins(), -std::log(2.0));
  for (double t : {-1.2, -0.4, 0.3, 1.0}) {
    const auto eq = equilibrium(Potential::combine(half, A, t));
    const double x = expectation(eq, A);
    EXPECT_NEAR(I.evaluate(x), std::log(2.0) - entropy(Potential::affine(A, t)), 1e-6) << "t " << t;
  }
}

TEST(RateFunction, RejectsGridWithoutZero) {
  const auto c = sample([](double t) { return t * t; }, 0.5, 2.0, 50);
  EXPECT_THROW(rate_function(c, 1.0, 1.0), DomainError);
}

TEST(Varadhan, QuadraticTiltOfProduct) {
  const auto I = rate_function_of(geometric_product(1.2, 10));
  // sup_x { x^2/2 - I(x) } equals the frozen quadratic nonlinear pressure
  EXPECT_NEAR(varadhan_value([](double x) { return 0.5 * x * x; }, I), 0.09368910407123933581, 1e-7);
  // linear F gives the pressure: sup { s x - I(x) } = log cosh(1.2 s)
  for (double s : {-0.8, 0.4, 1.5}) {
    EXPECT_NEAR(varadhan_value([&](double x) { return s * x; }, I), analytic::log_cosh(1.2 * s), 1e-6);
  }
  EXPECT_NEAR(varadhan_value([](double) { return 0.0; }, I), 0.0, 1e-12);
}

TEST(TiltedRate, ZerosOfSymmetricDoubleWell) {
  const double u = 1.2, beta = 1.0;
  auto rate = sample([&](double x) { return analytic::product_rate(x, u); }, -1.2, 1.2, 2401);
  const auto tr = tilted_rate([&](double x) { return 0.5 * beta * x * x; }, rate);
  // the two zeros sit at +-u m* with m* = tanh(beta u^2 m*)
  ASSERT_EQ(tr.zeros.size(), 2u);
  EXPECT_NEAR(tr.zeros[0], -tr.zeros[1], 1e-9);
  EXPECT_NEAR(tr.zeros[1], 1.2 * 0.83390593915734112236, 1e-4);
  EXPECT_NEAR(tr.constant, -0.09368910407123933581, 1e-6);
  for (double v : tr.fn.values) EXPECT_GE(v, 0.0);
}

TEST(TiltedRate, SingleZeroWhenUntilted) {
  auto rate = sample([](double x) { return analytic::product_rate(x, 1.0); }, -1.0, 1.0, 201);
  const auto tr = tilted_rate([](double) { return 0.0; }, rate);
  ASSERT_EQ(tr.zeros.size(), 1u);
  EXPECT_NEAR(tr.zeros[0], 0.0, 1e-12);
  EXPECT_EQ(tr.constant, 0.0);
}

TEST(EmpiricalLd, SingleSpinMatchesBinomial) {
  const auto A = Potential::product(2.0, 0.0, {1.0});
  for (int n : {1, 2, 5, 12}) {
    const auto e = empirical_ld(A, n, 0.3, 1.0, 1);
    EXPECT_NEAR(e.mass, binomial_mass(n, 0.3, 1.0), 1e-14) << n;
  }
  const auto e = empirical_ld(A, 2, 0.0, 0.0, 1);
  EXPECT_NEAR(e.mass, 0.5, 1e-15);
  EXPECT_NEAR(e.log_rate, 0.5 * std::log(0.5), 1e-15);
  const auto top = empirical_ld(A, 3, 1.0, 1.0, 1);
  EXPECT_NEAR(top.mass, 0.125, 1e-15);
}

TEST(EmpiricalLd, ApproachesRateFunction) {
  const auto A = Potential::product(2.0, 0.0, {1.0});
  // -(1/n) log mu_n(A_n >= 0.5) decreases toward I(0.5) of the single spin model
  const double I = analytic::product_rate(0.5, 1.0);
  double prev = kInf;
  for (int n : {4, 8, 16, 20}) {
    const double r = -empirical_ld(A, n, 0.5, 1.0, 1).log_rate;
    EXPECT_GT(r, I - 1e-12);
    EXPECT_LT(r, prev + 1e-12);
    prev = r;
  }
}

TEST(EmpiricalLd, EmptyEventAndCapacity) {
  const auto A = Potential::product(2.0, 0.0, {1.0});
  const auto e = empirical_ld(A, 3, 2.0, 3.0, 1);
  EXPECT_EQ(e.mass, 0.0);
  EXPECT_EQ(e.log_rate, -kInf);
  EXPECT_THROW(empirical_ld(A, 27, 0.0, 1.0, 1), CapacityError);
  EXPECT_THROW(empirical_ld(A, 0, 0.0, 1.0, 1), DomainError);
}

TEST(EmpiricalLd, ThreadCountDoesNotChangeResult) {
  const auto A = Potential::go();
  const auto a = empirical_ld(A, 14, 0.0, 1.0, 1);
  const auto b = empirical_ld(A, 14, 0.0, 1.0, 3);
  EXPECT_EQ(a.mass, b.mass);
}
