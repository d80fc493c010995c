#pragma once

// Finite-alphabet one-sided shift: words, finite-range potentials,
// Birkhoff sums and extremal cycle means.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "thermoform/error.hpp"

namespace thermoform {

// Largest table (d^k entries) any module will materialize.
inline constexpr std::size_t kMaxTableSize = std::size_t{1} << 26;

inline std::size_t checked_pow(std::size_t base, std::size_t exp,
                               std::size_t cap = kMaxTableSize) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > cap / base) {
      throw CapacityError(std::to_string(base) + "^" + std::to_string(exp) +
                          " exceeds the table capacity of " + std::to_string(cap));
    }
    r *= base;
  }
  return r;
}

class ShiftConfig {
 public:
  // Spins: symbol 0 is labelled -1, symbol 1 is labelled +1.
  static ShiftConfig spins() { return ShiftConfig({-1.0, 1.0}); }

  // Alphabet {1, ..., d}.
  static ShiftConfig alphabet(int d) {
    std::vector<double> labels(static_cast<std::size_t>(std::max(d, 0)));
    std::iota(labels.begin(), labels.end(), 1.0);
    return ShiftConfig(std::move(labels));
  }

  explicit ShiftConfig(std::vector<double> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw DomainError("alphabet size must be at least 2");
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("symbol labels must be pairwise distinct");
    }
  }

  int d() const { return static_cast<int>(labels_.size()); }
  double label(int symbol) const { return labels_.at(static_cast<std::size_t>(symbol)); }
  const std::vector<double>& labels() const { return labels_; }

  int symbol_of(double label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return static_cast<int>(i);
    }
    throw DomainError("unknown symbol label " + std::to_string(label));
  }

  bool is_spin() const { return labels_.size() == 2 && labels_[0] == -1.0 && labels_[1] == 1.0; }

  friend bool operator==(const ShiftConfig&, const ShiftConfig&) = default;

 private:
  std::vector<double> labels_;
};

// Finite word of symbol indices in [0, d).
using Word = std::vector<int>;

// Base-d index of a word, first coordinate most significant.
inline std::size_t word_index(std::span<const int> word, int d) {
  std::size_t idx = 0;
  for (int s : word) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(s);
  return idx;
}

inline Word word_from_index(std::size_t index, int d, int length) {
  Word w(static_cast<std::size_t>(length));
  for (int j = length - 1; j >= 0; --j) {
    w[static_cast<std::size_t>(j)] = static_cast<int>(index % static_cast<std::size_t>(d));
    index /= static_cast<std::size_t>(d);
  }
  return w;
}

inline Word word_from_labels(const ShiftConfig& cfg, std::span<const double> labels) {
  Word w;
  w.reserve(labels.size());
  for (double l : labels) w.push_back(cfg.symbol_of(l));
  return w;
}

struct Tabulated {
  int depth = 1;
  std::vector<double> table;  // d^depth entries indexed by word_index
  double tail_bound = 0.0;    // sup-norm distance to the potential it approximates
};

// A(x) = J/2 sum_n a_n x_n + h x_1 on spins, truncated after a.size() terms.
struct Product {
  double J = 2.0;
  double h = 0.0;
  std::vector<double> a;
  std::optional<double> u_full;  // declared J/2 sum of the untruncated series
  double tail_bound = 0.0;       // sum_{n > K} |a_n|
};

class Potential;

struct Affine {
  std::shared_ptr<const Potential> base;
  double scale = 1.0;
  double offset = 0.0;
  std::shared_ptr<const Potential> plus;
  double plus_scale = 0.0;
};

class Potential {
 public:
  using Rep = std::variant<Tabulated, Product, Affine>;

  static Potential tabulated(ShiftConfig cfg, int depth, std::vector<double> table) {
    if (depth < 1) throw DomainError("tabulated depth must be positive");
    const std::size_t n = checked_pow(static_cast<std::size_t>(cfg.d()), static_cast<std::size_t>(depth));
    if (table.size() != n) {
      throw DomainError("tabulated potential of depth " + std::to_string(depth) + " needs " +
                        std::to_string(n) + " entries, got " + std::to_string(table.size()));
    }
    for (double v : table) {
      if (!std::isfinite(v)) throw DomainError("tabulated potential values must be finite");
    }
    return Potential(std::move(cfg), Tabulated{depth, std::move(table), 0.0});
  }

  static Potential constant(ShiftConfig cfg, double c) {
    const std::size_t d = static_cast<std::size_t>(cfg.d());
    return tabulated(std::move(cfg), 1, std::vector<double>(d, c));
  }

  static Potential product(double J, double h, std::vector<double> a,
                           std::optional<double> u_full = std::nullopt, double tail_bound = 0.0) {
    if (!(tail_bound >= 0.0)) throw DomainError("tail_bound must be nonnegative");
    if (u_full) {
      double partial = 0.0;
      for (double x : a) partial += x * J / 2.0;
      if (std::abs(*u_full - partial) > std::abs(J) / 2.0 * tail_bound + 1e-12 * (1.0 + std::abs(*u_full))) {
        throw DomainError("declared full sum is inconsistent with coefficients and tail_bound");
      }
    }
    return Potential(ShiftConfig::spins(), Product{J, h, std::move(a), u_full, tail_bound});
  }

  // The four-cylinder potential 3 I[-1,-1] - 5 I[-1,1] + I[1,1] + 2 I[1,-1].
  static Potential go() {
    // index = 2*s1 + s2 with symbol 0 = -1, symbol 1 = +1
    return tabulated(ShiftConfig::spins(), 2, {3.0, -5.0, 2.0, 1.0});
  }

  // scale * base + offset + plus_scale * plus
  static Potential affine(const Potential& base, double scale, double offset = 0.0,
                          const Potential* plus = nullptr, double plus_scale = 0.0) {
    Affine rep;
    rep.base = std::make_shared<const Potential>(base);
    rep.scale = scale;
    rep.offset = offset;
    if (plus != nullptr) {
      if (!(plus->config() == base.config())) throw DomainError("affine parts live on different alphabets");
      rep.plus = std::make_shared<const Potential>(*plus);
      rep.plus_scale = plus_scale;
    }
    return Potential(base.config(), std::move(rep));
  }

  // f + s * A
  static Potential combine(const Potential& f, const Potential& A, double s) {
    return affine(f, 1.0, 0.0, &A, s);
  }

  const ShiftConfig& config() const { return cfg_; }
  const Rep& rep() const { return rep_; }
  int d() const { return cfg_.d(); }

  bool is_tabulated() const { return std::holds_alternative<Tabulated>(rep_); }
  const Tabulated& as_tabulated() const { return std::get<Tabulated>(rep_); }

  // Number of leading coordinates the value depends on.
  int depth() const {
    return std::visit(
        [](const auto& r) -> int {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Tabulated>) {
            return r.depth;
          } else if constexpr (std::is_same_v<T, Product>) {
            return std::max<int>(1, static_cast<int>(r.a.size()));
          } else {
            int k = r.base->depth();
            if (r.plus) k = std::max(k, r.plus->depth());
            return k;
          }
        },
        rep_);
  }

  // Value on a word of length >= depth(); later coordinates are ignored.
  double evaluate(std::span<const int> word) const {
    if (word.size() < static_cast<std::size_t>(depth())) {
      throw LengthError("word too short to evaluate potential", static_cast<std::size_t>(depth()));
    }
    return std::visit(
        [&](const auto& r) -> double {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Tabulated>) {
            return r.table[word_index(word.first(static_cast<std::size_t>(r.depth)), cfg_.d())];
          } else if constexpr (std::is_same_v<T, Product>) {
            double s = 0.0;
            for (std::size_t n = 0; n < r.a.size(); ++n) s += r.a[n] * cfg_.label(word[n]);
            return r.J / 2.0 * s + r.h * cfg_.label(word[0]);
          } else {
            double v = r.scale * r.base->evaluate(word) + r.offset;
            if (r.plus) v += r.plus_scale * r.plus->evaluate(word);
            return v;
          }
        },
        rep_);
  }

  // Finite-range table at the given depth. Product coefficients beyond the
  // depth are dropped and accounted for in tail_bound.
  Potential tabulate(int depth) const {
    if (depth <= 0) throw DomainError("tabulation depth must be positive");
    if (const auto* t = std::get_if<Tabulated>(&rep_); t != nullptr && t->depth == depth) {
      return *this;
    }
    if (const auto* t = std::get_if<Tabulated>(&rep_); t != nullptr && t->depth > depth) {
      throw DomainError("cannot tabulate a depth-" + std::to_string(t->depth) +
                        " table at smaller depth " + std::to_string(depth));
    }
    Tabulated out;
    out.depth = depth;
    out.tail_bound = tail_bound_at(depth);
    const Potential trunc = truncated(depth);
    const std::size_t n = checked_pow(static_cast<std::size_t>(d()), static_cast<std::size_t>(depth));
    out.table.resize(n);
    Word w(static_cast<std::size_t>(depth), 0);
    for (std::size_t i = 0; i < n; ++i) {
      out.table[i] = trunc.evaluate(w);
      for (int j = depth - 1; j >= 0; --j) {
        if (++w[static_cast<std::size_t>(j)] < d()) break;
        w[static_cast<std::size_t>(j)] = 0;
      }
    }
    return Potential(cfg_, std::move(out));
  }

  // Sup-norm error carried by (or introduced when) tabulating at `depth`.
  double tail_bound_at(int depth) const {
    return std::visit(
        [&](const auto& r) -> double {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Tabulated>) {
            return r.tail_bound;
          } else if constexpr (std::is_same_v<T, Product>) {
            double dropped = r.tail_bound;
            for (std::size_t n = static_cast<std::size_t>(depth); n < r.a.size(); ++n) dropped += std::abs(r.a[n]);
            return std::abs(r.J) / 2.0 * dropped;
          } else {
            double tb = std::abs(r.scale) * r.base->tail_bound_at(depth);
            if (r.plus) tb += std::abs(r.plus_scale) * r.plus->tail_bound_at(depth);
            return tb;
          }
        },
        rep_);
  }

 private:
  Potential(ShiftConfig cfg, Rep rep) : cfg_(std::move(cfg)), rep_(std::move(rep)) {}

  Potential truncated(int depth) const {
    return std::visit(
        [&](const auto& r) -> Potential {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Product>) {
            if (r.a.size() <= static_cast<std::size_t>(depth)) return *this;
            Product p = r;
            p.a.resize(static_cast<std::size_t>(depth));
            p.u_full.reset();
            return Potential(cfg_, std::move(p));
          } else if constexpr (std::is_same_v<T, Affine>) {
            Affine a = r;
            a.base = std::make_shared<const Potential>(r.base->truncated(depth));
            if (r.plus) a.plus = std::make_shared<const Potential>(r.plus->truncated(depth));
            return Potential(cfg_, std::move(a));
          } else {
            return *this;
          }
        },
        rep_);
  }

  ShiftConfig cfg_;
  Rep rep_;
};

inline Potential to_tabulated(const Potential& p, int depth) { return p.tabulate(depth); }

// A(x) + A(Tx) + ... + A(T^{n-1}x).
inline double birkhoff_sum(const Potential& p, std::span<const int> word, int n) {
  if (n <= 0) throw DomainError("number of Birkhoff steps must be positive");
  const std::size_t k = static_cast<std::size_t>(p.depth());
  const std::size_t need = static_cast<std::size_t>(n) + k - 1;
  if (word.size() < need) throw LengthError("word too short for Birkhoff sum", need);
  double s = 0.0;
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) s += p.evaluate(word.subspan(j, k));
  return s;
}

inline double sup_norm(const Potential& p) {
  if (const auto* r = std::get_if<Product>(&p.rep())) {
    if (r->a.empty()) return std::abs(r->h);
    double s = std::abs(r->J * r->a[0] / 2.0 + r->h);
    for (std::size_t n = 1; n < r->a.size(); ++n) s += std::abs(r->J * r->a[n] / 2.0);
    return s;
  }
  const Potential t = p.tabulate(p.depth());
  double m = 0.0;
  for (double v : t.as_tabulated().table) m = std::max(m, std::abs(v));
  return m;
}

namespace detail {

// Karp's maximum mean cycle on the depth-k de Bruijn graph: nodes are
// (k-1)-words, each k-word is an edge from its prefix to its suffix.
inline double max_mean_cycle(const Tabulated& t, int d, double sign) {
  const std::size_t nodes = checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(t.depth - 1),
                                        std::size_t{1} << 11);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> walk((nodes + 1) * nodes, ninf);
  for (std::size_t v = 0; v < nodes; ++v) walk[v] = 0.0;
  for (std::size_t j = 1; j <= nodes; ++j) {
    const double* prev = &walk[(j - 1) * nodes];
    double* cur = &walk[j * nodes];
    for (std::size_t e = 0; e < t.table.size(); ++e) {
      const std::size_t from = e / static_cast<std::size_t>(d);
      const std::size_t to = e % nodes;
      if (prev[from] == ninf) continue;
      cur[to] = std::max(cur[to], prev[from] + sign * t.table[e]);
    }
  }
  double best = ninf;
  const double* last = &walk[nodes * nodes];
  for (std::size_t v = 0; v < nodes; ++v) {
    if (last[v] == ninf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nodes; ++j) {
      const double dj = walk[j * nodes + v];
      if (dj == ninf) continue;
      worst = std::min(worst, (last[v] - dj) / static_cast<double>(nodes - j));
    }
    best = std::max(best, worst);
  }
  return best;
}

}  // namespace detail

// Ergodic maximal value sup over invariant measures of rho(A).
inline double ergodic_max(const Potential& p) {
  const Potential t = p.tabulate(p.depth());
  return detail::max_mean_cycle(t.as_tabulated(), p.d(), 1.0);
}

// inf over invariant measures of rho(A).
inline double ergodic_min(const Potential& p) {
  const Potential t = p.tabulate(p.depth());
  return -detail::max_mean_cycle(t.as_tabulated(), p.d(), -1.0);
}

// Geometric coefficients a_n proportional to 2^{-n}, n = 1..K, rescaled so
// that J/2 * sum a_n equals u exactly.
inline Potential geometric_product(double u, int K, double J = 2.0) {
  if (K < 1) throw DomainError("truncation K must be positive");
  std::vector<double> a(static_cast<std::size_t>(K));
  double s = 0.0;
  for (int n = 0; n < K; ++n) {
    a[static_cast<std::size_t>(n)] = std::ldexp(1.0, -(n + 1));
    s += a[static_cast<std::size_t>(n)];
  }
  for (double& x : a) x *= u / (s * J / 2.0);
  return Potential::product(J, 0.0, std::move(a));
}

// a_n = 2^{-n} for n = 1..K (no rescaling); the dropped tail 2^{-K} goes into tail_bound.
inline Potential halving_product(int K, double J = 2.0) {
  if (K < 1) throw DomainError("truncation K must be positive");
  std::vector<double> a(static_cast<std::size_t>(K));
  for (int n = 0; n < K; ++n) a[static_cast<std::size_t>(n)] = std::ldexp(1.0, -(n + 1));
  return Potential::product(J, 0.0, std::move(a), J / 2.0, std::ldexp(1.0, -K));
}

}  // namespace thermoform
