#pragma once

// Ruelle transfer operator on finite-range potentials and its Perron data.
//
// For a depth-k potential the operator acts on functions of the first k-1
// coordinates. State w is a (k-1)-word; prepending a symbol a gives the
// k-word a.w, the transition carries weight exp(A(a.w)) and lands on the
// (k-1)-prefix of a.w.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "thermoform/error.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/shift.hpp"

namespace thermoform {

struct SpectralOptions {
  double tol = 1e-12;
  int max_iterations = 100000;
};

class TransferMatrix {
 public:
  explicit TransferMatrix(const Potential& tabulated) : cfg_(tabulated.config()) {
    if (!tabulated.is_tabulated()) throw DomainError("transfer matrix needs a tabulated potential");
    const Tabulated& t = tabulated.as_tabulated();
    depth_ = t.depth;
    dim_ = checked_pow(static_cast<std::size_t>(cfg_.d()), static_cast<std::size_t>(depth_ - 1));
    if (t.table.size() != dim_ * static_cast<std::size_t>(cfg_.d())) throw DomainError("malformed potential table");
    log_weight_ = t.table;
  }

  const ShiftConfig& config() const { return cfg_; }
  int d() const { return cfg_.d(); }
  int depth() const { return depth_; }
  std::size_t dim() const { return dim_; }

  // log weight of the transition from state w under symbol a.
  double log_entry(std::size_t w, int a) const { return log_weight_[static_cast<std::size_t>(a) * dim_ + w]; }
  // Target state of that transition.
  std::size_t target(std::size_t w, int a) const {
    return (static_cast<std::size_t>(a) * dim_ + w) / static_cast<std::size_t>(cfg_.d());
  }
  // Indexed by the k-word a.w, i.e. a * dim() + w.
  const std::vector<double>& log_weights() const { return log_weight_; }

 private:
  ShiftConfig cfg_;
  int depth_ = 1;
  std::size_t dim_ = 1;
  std::vector<double> log_weight_;
};

inline TransferMatrix build_transfer(const Potential& p) { return TransferMatrix(p.tabulate(p.depth())); }

struct PerronTriple {
  double log_lambda = 0.0;
  std::vector<double> right;  // psi > 0, scaled so that sum(left * right) == 1
  std::vector<double> left;   // nu >= 0, sum(left) == 1
  double right_residual = 0.0;
  double left_residual = 0.0;
  int iterations = 0;
};

// Power iteration on the operator and its dual. Weights are shifted by the
// largest log entry so that iterates stay in range; both iterates are
// renormalized each step. When plain iteration contracts slowly (an
// eigenvalue close to -lambda, as for nearly periodic chains) the iteration
// switches to L + sigma I with sigma the upper Collatz-Wielandt bound, which
// has the same Perron vectors. Residuals are relative to the eigenvalue.
inline PerronTriple perron(const TransferMatrix& m, const SpectralOptions& opt = {}) {
  if (!(opt.tol > 0)) throw DomainError("Perron tolerance must be positive");
  const std::size_t D = m.dim();
  const std::size_t d = static_cast<std::size_t>(m.d());
  const auto& lw = m.log_weights();
  const double shift = *std::max_element(lw.begin(), lw.end());
  std::vector<double> w(lw.size());
  for (std::size_t e = 0; e < lw.size(); ++e) w[e] = std::exp(lw[e] - shift);

  std::vector<double> psi(D, 1.0), nu(D, 1.0 / static_cast<double>(D));
  std::vector<double> y(D), z(D);
  double lam = 0.0, res_r = kInf, res_l = kInf, prev_res = kInf;
  bool shifted = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      const double* wa = &w[a * D];
      for (std::size_t x = 0; x < D; ++x) {
        const std::size_t to = (a * D + x) / d;
        y[x] += wa[x] * psi[to];
        z[to] += nu[x] * wa[x];
      }
    }
    double cw_lo = kInf, cw_hi = 0.0;
    for (std::size_t x = 0; x < D; ++x) {
      const double r = y[x] / psi[x];
      cw_lo = std::min(cw_lo, r);
      cw_hi = std::max(cw_hi, r);
    }
    lam = 0.5 * (cw_lo + cw_hi);
    const double lam_l = std::accumulate(z.begin(), z.end(), 0.0);
    res_r = 0.0;
    res_l = 0.0;
    for (std::size_t x = 0; x < D; ++x) {
      res_r = std::max(res_r, std::abs(y[x] - lam * psi[x]));
      res_l += std::abs(z[x] - lam_l * nu[x]);
    }
    res_r /= lam;  // psi is max-normalized
    res_l /= lam_l;
    if (res_r <= opt.tol && res_l <= opt.tol) {
      // two-sided Rayleigh quotient, second order in the residuals
      lam = std::inner_product(nu.begin(), nu.end(), y.begin(), 0.0) /
            std::inner_product(nu.begin(), nu.end(), psi.begin(), 0.0);
      break;
    }

    const double res = std::max(res_r, res_l);
    if (!shifted && it >= 12 && res > 0.5 * prev_res) shifted = true;
    prev_res = res;
    const double sigma = shifted ? cw_hi : 0.0;
    double ymax = 0.0, zsum = 0.0;
    for (std::size_t x = 0; x < D; ++x) {
      y[x] += sigma * psi[x];
      z[x] += sigma * nu[x];
      ymax = std::max(ymax, y[x]);
      zsum += z[x];
    }
    for (std::size_t x = 0; x < D; ++x) {
      psi[x] = y[x] / ymax;
      nu[x] = z[x] / zsum;
    }
  }
  if (!(res_r <= opt.tol && res_l <= opt.tol)) {
    throw ConvergenceError("Perron power iteration did not converge", std::max(res_r, res_l));
  }
  for (double v : psi) {
    if (!(v > 0)) throw ConvergenceError("Perron eigenfunction is not strictly positive", v);
  }
  const double pairing = std::inner_product(nu.begin(), nu.end(), psi.begin(), 0.0);
  for (double& v : psi) v /= pairing;

  PerronTriple out;
  out.log_lambda = std::log(lam) + shift;
  out.right = std::move(psi);
  out.left = std::move(nu);
  out.right_residual = res_r;
  out.left_residual = res_l;
  out.iterations = it + 1;
  return out;
}

inline double pressure(const Potential& p, const SpectralOptions& opt = {}) {
  return perron(build_transfer(p), opt).log_lambda;
}

// Equilibrium measure as a stationary Markov chain that extends words to the
// left: from state w (a (k-1)-word) the symbol a is prepended with
// probability transition(w, a).
class Equilibrium {
 public:
  Equilibrium(const TransferMatrix& m, PerronTriple perron)
      : cfg_(m.config()), depth_(m.depth()), dim_(m.dim()), perron_(std::move(perron)), log_weight_(m.log_weights()) {
    const std::size_t d = static_cast<std::size_t>(cfg_.d());
    stationary_.resize(dim_);
    for (std::size_t w = 0; w < dim_; ++w) stationary_[w] = perron_.left[w] * perron_.right[w];
    transition_.resize(dim_ * d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t w = 0; w < dim_; ++w) {
        const std::size_t e = a * dim_ + w;
        transition_[e] = std::exp(log_weight_[e] - perron_.log_lambda) * perron_.right[e / d] / perron_.right[w];
      }
    }
  }

  const ShiftConfig& config() const { return cfg_; }
  int d() const { return cfg_.d(); }
  int depth() const { return depth_; }
  std::size_t dim() const { return dim_; }
  double log_lambda() const { return perron_.log_lambda; }
  const PerronTriple& perron() const { return perron_; }
  const std::vector<double>& stationary() const { return stationary_; }
  double transition(std::size_t w, int a) const { return transition_[static_cast<std::size_t>(a) * dim_ + w]; }
  // Target state after prepending a to w.
  std::size_t next_state(std::size_t w, int a) const {
    return (static_cast<std::size_t>(a) * dim_ + w) / static_cast<std::size_t>(cfg_.d());
  }

  // Cylinder probabilities of all words of length m.
  std::vector<double> cylinder_marginals(int m) const {
    return extend(m, stationary_, [&](std::size_t e) { return transition_[e]; });
  }

  // Cylinder masses of the eigenprobability nu (generally not shift-invariant).
  std::vector<double> eigenmeasure_marginals(int m) const {
    return extend(m, perron_.left,
                  [&](std::size_t e) { return std::exp(log_weight_[e] - perron_.log_lambda); });
  }

 private:
  template <typename Step>
  std::vector<double> extend(int m, const std::vector<double>& base, Step step) const {
    if (m < 1) throw DomainError("marginal depth must be positive");
    const std::size_t d = static_cast<std::size_t>(cfg_.d());
    const std::size_t k1 = static_cast<std::size_t>(depth_ - 1);
    const std::size_t mm = static_cast<std::size_t>(m);
    const std::size_t out_size = checked_pow(d, mm);
    if (mm <= k1) {
      std::vector<double> out(out_size, 0.0);
      const std::size_t div = checked_pow(d, k1 - mm);
      for (std::size_t w = 0; w < dim_; ++w) out[w / div] += base[w];
      return out;
    }
    std::vector<double> cur = base;
    for (std::size_t len = k1; len < mm; ++len) {
      const std::size_t n = cur.size();
      const std::size_t div = checked_pow(d, len - k1);
      std::vector<double> next(n * d);
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t word = 0; word < n; ++word) {
          next[a * n + word] = cur[word] * step(a * dim_ + word / div);
        }
      }
      cur = std::move(next);
    }
    return cur;
  }

  ShiftConfig cfg_;
  int depth_;
  std::size_t dim_;
  PerronTriple perron_;
  std::vector<double> log_weight_;
  std::vector<double> stationary_;
  std::vector<double> transition_;
};

inline Equilibrium equilibrium(const Potential& p, const SpectralOptions& opt = {}) {
  const TransferMatrix m = build_transfer(p);
  return Equilibrium(m, perron(m, opt));
}

inline std::vector<double> cylinder_marginals(const Equilibrium& eq, int m) { return eq.cylinder_marginals(m); }

// mu(B) for a finite-range observable B.
inline double expectation(const Equilibrium& eq, const Potential& B) {
  if (!(B.config() == eq.config())) throw DomainError("observable lives on a different alphabet");
  const int k = B.depth();
  const Potential t = B.tabulate(k);
  const auto marg = eq.cylinder_marginals(k);
  const auto& table = t.as_tabulated().table;
  double s = 0.0;
  for (std::size_t w = 0; w < marg.size(); ++w) s += marg[w] * table[w];
  return s;
}

// h(mu_A) = P(A) - mu_A(A)
inline double entropy(const Potential& p, const SpectralOptions& opt = {}) {
  const Equilibrium eq = equilibrium(p, opt);
  return eq.log_lambda() - expectation(eq, p);
}

// t -> P(f + tA) - P(f) on a grid.
inline GridFunction pressure_curve(const Potential& f, const Potential& A, const std::vector<double>& t_grid,
                                   const SpectralOptions& opt = {}) {
  GridFunction out;
  out.grid = t_grid;
  out.values.resize(t_grid.size());
  out.convexity = Convexity::Convex;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("t grid must be strictly increasing");
  }
  const double base = pressure(f, opt);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    out.values[i] = pressure(Potential::combine(f, A, t_grid[i]), opt) - base;
  }
  return out;
}

// s -> mu_{f + sA}(A), the derivative of the pressure curve.
inline double mean_under(const Potential& f, const Potential& A, double s, const SpectralOptions& opt = {}) {
  return expectation(equilibrium(Potential::combine(f, A, s), opt), A);
}

// d^2/dt^2 P(f + tA): Richardson-refined central difference of the derivative.
inline double pressure_second_derivative(const Potential& f, const Potential& A, double t, double h = 1e-4,
                                         const SpectralOptions& opt = {}) {
  auto central = [&](double step) {
    return (mean_under(f, A, t + step, opt) - mean_under(f, A, t - step, opt)) / (2.0 * step);
  };
  const double coarse = central(h);
  const double fine = central(h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

// A finite-range A is cohomologous to a constant exactly when every invariant
// measure gives it the same mean, i.e. when all cycle means coincide.
inline bool is_coboundary_to_constant(const Potential& A, double tol = 1e-12) {
  const double hi = ergodic_max(A);
  const double lo = ergodic_min(A);
  return hi - lo <= tol * (1.0 + std::abs(hi) + std::abs(lo));
}

}  // namespace thermoform
