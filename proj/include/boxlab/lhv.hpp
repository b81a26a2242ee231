#pragma once

// Local deterministic strategies and exact classical maxima of Bell
// functionals.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <vector>

#include "boxlab/boxes.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/parallel.hpp"

namespace boxlab {

struct DeterministicStrategy {
  std::size_t d_a = 0;
  std::size_t d_b = 0;
  std::vector<std::size_t> f_a;  // x -> a
  std::vector<std::size_t> g_b;  // y -> b

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

inline constexpr std::uint64_t kMaxStrategies = 100'000'000;

/// All d_a^{d_x} * d_b^{d_y} strategies in lexicographic order of the tuple
/// (f_a[0], ..., f_a[d_x-1], g_b[0], ..., g_b[d_y-1]). Strategies are
/// decoded on demand from their index, nothing is materialized.
class StrategyEnumerator {
 public:
  StrategyEnumerator(std::size_t d_x, std::size_t d_a, std::size_t d_y, std::size_t d_b)
      : d_x_(d_x), d_a_(d_a), d_y_(d_y), d_b_(d_b) {
    if (d_x == 0 || d_a == 0 || d_y == 0 || d_b == 0) throw InvalidArgument("strategy dimensions must be >= 1");
    std::uint64_t n = 1;
    auto mul = [&n](std::size_t base, std::size_t times) {
      for (std::size_t i = 0; i < times; ++i) {
        if (n > kMaxStrategies / base) throw InvalidArgument("strategy count exceeds 1e8");
        n *= base;
      }
    };
    mul(d_a, d_x);
    mul(d_b, d_y);
    count_ = n;
  }

  explicit StrategyEnumerator(const BoxShape& s) : StrategyEnumerator(s.d_x, s.d_a, s.d_y, s.d_b) {}

  std::uint64_t size() const { return count_; }

  DeterministicStrategy at(std::uint64_t index) const {
    DeterministicStrategy s{d_a_, d_b_, std::vector<std::size_t>(d_x_), std::vector<std::size_t>(d_y_)};
    for (std::size_t y = d_y_; y-- > 0;) {
      s.g_b[y] = static_cast<std::size_t>(index % d_b_);
      index /= d_b_;
    }
    for (std::size_t x = d_x_; x-- > 0;) {
      s.f_a[x] = static_cast<std::size_t>(index % d_a_);
      index /= d_a_;
    }
    return s;
  }

  class iterator {
   public:
    using value_type = DeterministicStrategy;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    iterator(const StrategyEnumerator* e, std::uint64_t i) : e_(e), i_(i) {}
    DeterministicStrategy operator*() const { return e_->at(i_); }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    iterator operator++(int) {
      auto t = *this;
      ++i_;
      return t;
    }
    friend bool operator==(const iterator& l, const iterator& r) { return l.i_ == r.i_; }

   private:
    const StrategyEnumerator* e_ = nullptr;
    std::uint64_t i_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_}; }

 private:
  std::size_t d_x_, d_a_, d_y_, d_b_;
  std::uint64_t count_ = 0;
};

inline StrategyEnumerator enumerate_strategies(std::size_t d_x, std::size_t d_a, std::size_t d_y, std::size_t d_b) {
  return StrategyEnumerator(d_x, d_a, d_y, d_b);
}

/// Deterministic vertex of the local polytope: P = 1 iff a = f_a(x), b = g_b(y).
inline Box strategy_box(const DeterministicStrategy& s) {
  const BoxShape shape{s.f_a.size(), s.g_b.size(), s.d_a, s.d_b};
  std::vector<double> p(shape.size(), 0.0);
  for (std::size_t x = 0; x < shape.d_x; ++x)
    for (std::size_t y = 0; y < shape.d_y; ++y) {
      if (s.f_a[x] >= s.d_a || s.g_b[y] >= s.d_b) throw InvalidArgument("strategy outcome out of range");
      p[shape.offset(s.f_a[x], s.g_b[y], x, y)] = 1.0;
    }
  return Box(shape, std::move(p));
}

struct ClassicalMax {
  double value = 0.0;
  DeterministicStrategy witness;
};

/// Exact maximum over deterministic strategies; ties go to the first
/// maximizer in lexicographic order. Chunks run on `workers` threads and are
/// reduced in index order, so the result does not depend on partitioning.
inline ClassicalMax classical_max(const BellFunctional& f, std::size_t workers = thread_cap()) {
  const auto& shape = f.shape();
  const StrategyEnumerator en(shape);
  const std::uint64_t n = en.size();
  workers = std::max<std::size_t>(1, std::min<std::uint64_t>(workers, n));

  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
  };
  std::vector<Best> best(workers);

  parallel_chunks(static_cast<std::size_t>(n), workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    Best b;
    std::vector<std::size_t> support(shape.d_x * shape.d_y);
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = en.at(i);
      for (std::size_t x = 0; x < shape.d_x; ++x)
        for (std::size_t y = 0; y < shape.d_y; ++y) support[x * shape.d_y + y] = shape.offset(s.f_a[x], s.g_b[y], x, y);
      // same summation order as eval() so the witness reproduces the value bit for bit
      std::sort(support.begin(), support.end());
      detail::CompensatedSum acc;
      for (auto off : support) acc.add(f.coefficients()[off]);
      const double v = acc.value();
      if (v > b.value) b = {v, i};
    }
    best[w] = b;
  });

  Best overall;
  for (const auto& b : best)
    if (b.value > overall.value) overall = b;
  return {overall.value, en.at(overall.index)};
}

}  // namespace boxlab
