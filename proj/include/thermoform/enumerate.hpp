#pragma once

// Exhaustive enumeration of all words of length N <= 26, assigning symbols
// from the right so that the base measure (a left-extending Markov chain)
// and the window sums complete as positions are filled in.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "thermoform/error.hpp"
#include "thermoform/parallel.hpp"
#include "thermoform/shift.hpp"
#include "thermoform/transfer.hpp"

namespace thermoform {

inline constexpr int kMaxEnumerationLength = 26;

// Sum over windows j = 0..count-1 of table[x_j .. x_{j+depth-1}].
struct WindowSum {
  std::vector<double> table;
  int depth = 1;
  int count = 1;
};

inline WindowSum window_sum(const Potential& p, int count) {
  const int k = p.depth();
  return WindowSum{p.tabulate(k).as_tabulated().table, k, count};
}

class WordEnumerator {
 public:
  // base == nullopt means the uniform (maximal entropy) measure.
  WordEnumerator(int d, int length, std::vector<WindowSum> sums, std::optional<Equilibrium> base = std::nullopt)
      : d_(d), n_(length), sums_(std::move(sums)), base_(std::move(base)) {
    if (length < 1) throw DomainError("enumeration length must be positive");
    if (length > kMaxEnumerationLength) {
      throw CapacityError("exact enumeration over words of length " + std::to_string(length) +
                          " exceeds the cap of " + std::to_string(kMaxEnumerationLength));
    }
    for (const auto& s : sums_) {
      if (s.count < 0 || s.count + s.depth - 1 > length) {
        throw LengthError("window sum needs longer words", static_cast<std::size_t>(s.count + s.depth - 1));
      }
      pow_.push_back(checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(s.depth - 1)));
    }
    if (base_) {
      if (base_->d() != d) throw DomainError("base measure lives on a different alphabet");
      if (base_->depth() - 1 > length) throw LengthError("base measure needs longer words", static_cast<std::size_t>(base_->depth() - 1));
      const int k1 = base_->depth() - 1;
      base_pow_ = k1 == 0 ? 0 : checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(k1 - 1));
    }
    // fixed split into blocks by the rightmost symbols, independent of thread count
    block_positions_ = 0;
    std::size_t blocks = 1;
    while (block_positions_ < length && blocks < 256) {
      blocks *= static_cast<std::size_t>(d);
      ++block_positions_;
    }
    num_blocks_ = blocks;
  }

  int length() const { return n_; }
  std::size_t num_blocks() const { return num_blocks_; }

  // Calls leaf(sums, log_mass) for every word; `sums` holds the window sums in
  // the order given at construction. One accumulator per block, returned in
  // block order for a deterministic reduction.
  template <typename Acc, typename Leaf>
  std::vector<Acc> run(unsigned threads, Leaf leaf) const {
    std::vector<Acc> out(num_blocks_);
    for_each_block(num_blocks_, threads, [&](std::size_t b) { walk_block(b, out[b], leaf); });
    return out;
  }

 private:
  struct Frame {
    std::vector<double> sum;
    std::vector<std::size_t> idx;
    std::size_t base_state = 0;
    double log_mass = 0.0;
  };

  // Assigns position p and updates frame `to` from frame `from` (position p+1).
  void place(int p, int symbol, const Frame& from, Frame& to) const {
    const std::size_t s = static_cast<std::size_t>(symbol);
    for (std::size_t j = 0; j < sums_.size(); ++j) {
      to.idx[j] = s * pow_[j] + from.idx[j] / static_cast<std::size_t>(d_);
      to.sum[j] = from.sum[j];
      if (p < sums_[j].count) to.sum[j] += sums_[j].table[to.idx[j]];
    }
    if (!base_) {
      to.log_mass = from.log_mass;
      return;
    }
    const int k1 = base_->depth() - 1;
    to.base_state = s * base_pow_ + from.base_state / static_cast<std::size_t>(d_);
    if (p > n_ - k1) {
      to.log_mass = 0.0;
    } else if (p == n_ - k1) {
      to.log_mass = std::log(base_->stationary()[to.base_state]);
    } else {
      // from.base_state was the (k-1)-word at position p+1
      to.log_mass = from.log_mass + std::log(base_->transition(from.base_state, symbol));
    }
  }

  template <typename Acc, typename Leaf>
  void walk_block(std::size_t block, Acc& acc, Leaf& leaf) const {
    std::vector<Frame> frames(static_cast<std::size_t>(n_) + 1);
    for (auto& f : frames) {
      f.sum.assign(sums_.size(), 0.0);
      f.idx.assign(sums_.size(), 0);
    }
    Frame& top = frames[static_cast<std::size_t>(n_)];
    top.log_mass = base_ ? 0.0 : -static_cast<double>(n_) * std::log(static_cast<double>(d_));
    if (base_ && base_->depth() == 1) top.log_mass = 0.0;
    // block digits fix positions n-1, n-2, ..., n-block_positions
    std::size_t code = block;
    int p = n_ - 1;
    for (int i = 0; i < block_positions_; ++i, --p) {
      const int symbol = static_cast<int>(code % static_cast<std::size_t>(d_));
      code /= static_cast<std::size_t>(d_);
      place(p, symbol, frames[static_cast<std::size_t>(p) + 1], frames[static_cast<std::size_t>(p)]);
    }
    descend(p, frames, acc, leaf);
  }

  template <typename Acc, typename Leaf>
  void descend(int p, std::vector<Frame>& frames, Acc& acc, Leaf& leaf) const {
    if (p < 0) {
      const Frame& f = frames[0];
      leaf(acc, std::span<const double>(f.sum), f.log_mass);
      return;
    }
    for (int s = 0; s < d_; ++s) {
      place(p, s, frames[static_cast<std::size_t>(p) + 1], frames[static_cast<std::size_t>(p)]);
      descend(p - 1, frames, acc, leaf);
    }
  }

  int d_;
  int n_;
  std::vector<WindowSum> sums_;
  std::vector<std::size_t> pow_;
  std::optional<Equilibrium> base_;
  std::size_t base_pow_ = 1;
  int block_positions_ = 0;
  std::size_t num_blocks_ = 1;
};

// Running sum of exp(w) and of exp(w) * value with a shared scale.
struct WeightedLogSum {
  double max_log = -kInf;
  double weight = 0.0;
  double weighted = 0.0;

  void add(double log_w, double value) {
    if (log_w > max_log) {
      const double r = std::exp(max_log - log_w);
      weight *= r;
      weighted *= r;
      max_log = log_w;
    }
    const double e = std::exp(log_w - max_log);
    weight += e;
    weighted += e * value;
  }

  void merge(const WeightedLogSum& o) {
    if (o.max_log == -kInf) return;
    if (o.max_log > max_log) {
      const double r = std::exp(max_log - o.max_log);
      weight *= r;
      weighted *= r;
      max_log = o.max_log;
    }
    const double r = std::exp(o.max_log - max_log);
    weight += o.weight * r;
    weighted += o.weighted * r;
  }

  double log_total() const { return max_log + std::log(weight); }
  double ratio() const { return weighted / weight; }
};

}  // namespace thermoform
