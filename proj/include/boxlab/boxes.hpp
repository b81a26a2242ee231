#pragma once

// Conditional probability boxes P(a,b|x,y), the modular PR family, and the
// Bell functional B^d (average probability that a - b = xy mod d).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "boxlab/errors.hpp"

namespace boxlab {

struct BoxShape {
  std::size_t d_x = 0;  // Alice settings
  std::size_t d_y = 0;  // Bob settings
  std::size_t d_a = 0;  // Alice outcomes
  std::size_t d_b = 0;  // Bob outcomes

  static BoxShape square(std::size_t d) { return {d, d, d, d}; }

  std::size_t size() const { return d_x * d_y * d_a * d_b; }
  bool is_square() const { return d_x == d_y && d_y == d_a && d_a == d_b; }

  /// Flat offset for index order [a][b][x][y].
  std::size_t offset(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
    return ((a * d_b + b) * d_x + x) * d_y + y;
  }

  friend bool operator==(const BoxShape&, const BoxShape&) = default;
};

/// (a - b - x*y) reduced into {0, ..., d-1}.
inline std::size_t phase_branch(std::size_t a, std::size_t b, std::size_t x, std::size_t y, std::size_t d) {
  return (a % d + d - b % d + d - (x * y) % d) % d;
}

class Box {
 public:
  Box(BoxShape shape, std::vector<double> probs) : shape_(shape), p_(std::move(probs)) {
    if (shape_.d_x == 0 || shape_.d_y == 0 || shape_.d_a == 0 || shape_.d_b == 0)
      throw InvalidArgument("box dimensions must be positive");
    if (p_.size() != shape_.size()) throw InvalidArgument("probability tensor size does not match box shape");
    for (double v : p_)
      if (!(v >= 0.0)) throw InvalidArgument("box has a negative or NaN entry");
    for (std::size_t x = 0; x < shape_.d_x; ++x)
      for (std::size_t y = 0; y < shape_.d_y; ++y) {
        double s = 0.0;
        for (std::size_t a = 0; a < shape_.d_a; ++a)
          for (std::size_t b = 0; b < shape_.d_b; ++b) s += (*this)(a, b, x, y);
        if (std::abs(s - 1.0) > tol::kBoxNorm)
          throw InvalidArgument("box slice (x=" + std::to_string(x) + ", y=" + std::to_string(y) +
                                ") sums to " + std::to_string(s));
      }
  }

  const BoxShape& shape() const { return shape_; }
  const std::vector<double>& probs() const { return p_; }

  double operator()(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
    return p_[shape_.offset(a, b, x, y)];
  }

  /// Common dimension of a square box; throws otherwise.
  std::size_t square_dim() const {
    if (!shape_.is_square()) throw InvalidArgument("operation needs d_x = d_y = d_a = d_b");
    return shape_.d_a;
  }

  double max_abs_diff(const Box& other) const {
    if (other.shape_ != shape_) throw InvalidArgument("box shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) m = std::max(m, std::abs(p_[i] - other.p_[i]));
    return m;
  }

 private:
  BoxShape shape_;
  std::vector<double> p_;
};

/// P(a,b|x,y) = 1/d when a - b = xy (mod d), else 0.
inline Box pr_box(std::size_t d) {
  if (d < 2) throw InvalidArgument("pr_box needs d >= 2");
  const auto shape = BoxShape::square(d);
  std::vector<double> p(shape.size(), 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
          if (phase_branch(a, b, x, y, d) == 0) p[shape.offset(a, b, x, y)] = 1.0 / static_cast<double>(d);
  return Box(shape, std::move(p));
}

inline Box uniform_box(std::size_t d) {
  if (d < 2) throw InvalidArgument("uniform_box needs d >= 2");
  const auto shape = BoxShape::square(d);
  return Box(shape, std::vector<double>(shape.size(), 1.0 / static_cast<double>(d * d)));
}

/// v*p + (1-v)*q.
inline Box mix(const Box& p, const Box& q, double v) {
  if (p.shape() != q.shape()) throw InvalidArgument("mix: box shapes differ");
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("mix: weight must lie in [0, 1]");
  std::vector<double> out(p.probs().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v * p.probs()[i] + (1.0 - v) * q.probs()[i];
  return Box(p.shape(), std::move(out));
}

struct NoSignallingReport {
  bool is_ns = false;
  double max_violation = 0.0;
};

/// Largest change of either party's marginal under a change of the other
/// party's setting.
inline NoSignallingReport no_signalling_report(const Box& box, double tolerance = 1e-12) {
  const auto& s = box.shape();
  double worst = 0.0;
  // Bob's marginal P(b|x,y) must not depend on x
  for (std::size_t y = 0; y < s.d_y; ++y)
    for (std::size_t b = 0; b < s.d_b; ++b) {
      std::vector<double> marg(s.d_x, 0.0);
      for (std::size_t x = 0; x < s.d_x; ++x)
        for (std::size_t a = 0; a < s.d_a; ++a) marg[x] += box(a, b, x, y);
      const auto [lo, hi] = std::minmax_element(marg.begin(), marg.end());
      worst = std::max(worst, *hi - *lo);
    }
  // Alice's marginal P(a|x,y) must not depend on y
  for (std::size_t x = 0; x < s.d_x; ++x)
    for (std::size_t a = 0; a < s.d_a; ++a) {
      std::vector<double> marg(s.d_y, 0.0);
      for (std::size_t y = 0; y < s.d_y; ++y)
        for (std::size_t b = 0; b < s.d_b; ++b) marg[y] += box(a, b, x, y);
      const auto [lo, hi] = std::minmax_element(marg.begin(), marg.end());
      worst = std::max(worst, *hi - *lo);
    }
  return {worst <= tolerance, worst};
}

/// Linear functional sum_{abxy} c_{abxy} P(a,b|x,y); coefficients share the
/// box's [a][b][x][y] layout.
class BellFunctional {
 public:
  BellFunctional(BoxShape shape, std::vector<double> coefficients) : shape_(shape), c_(std::move(coefficients)) {
    if (c_.size() != shape_.size()) throw InvalidArgument("coefficient tensor size does not match shape");
  }

  const BoxShape& shape() const { return shape_; }
  const std::vector<double>& coefficients() const { return c_; }
  double operator()(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
    return c_[shape_.offset(a, b, x, y)];
  }

 private:
  BoxShape shape_;
  std::vector<double> c_;
};

/// b_{abxy} = 1/d^2 when a - b = xy (mod d).
inline BellFunctional bell_bd(std::size_t d) {
  if (d < 2) throw InvalidArgument("bell_bd needs d >= 2");
  const auto shape = BoxShape::square(d);
  std::vector<double> c(shape.size(), 0.0);
  const double w = 1.0 / static_cast<double>(d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
          if (phase_branch(a, b, x, y, d) == 0) c[shape.offset(a, b, x, y)] = w;
  return BellFunctional(shape, std::move(c));
}

namespace detail {

/// Neumaier-compensated running sum. Sums of a few copies of 1/d^2 come out
/// as the nearest double to the exact multiple.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

inline double eval(const BellFunctional& f, const Box& box) {
  if (f.shape() != box.shape()) throw InvalidArgument("functional and box shapes differ");
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < box.probs().size(); ++i) acc.add(f.coefficients()[i] * box.probs()[i]);
  return acc.value();
}

/// CHSH expression in the [-4, 4] convention, via 8 (B^2 - 1/2).
inline double chsh_value(const Box& box) {
  if (box.shape() != BoxShape::square(2)) throw InvalidArgument("chsh_value needs a 2x2x2x2 box");
  return 8.0 * (eval(bell_bd(2), box) - 0.5);
}

/// w_k(x,y) = sum over a - b - xy = k (mod d) of P(a,b|x,y).
class PhaseBranchWeights {
 public:
  PhaseBranchWeights(std::size_t d, std::vector<double> w) : d_(d), w_(std::move(w)) {
    if (w_.size() != d_ * d_ * d_) throw InvalidArgument("branch weight tensor has wrong size");
  }

  std::size_t d() const { return d_; }
  double operator()(std::size_t k, std::size_t x, std::size_t y) const { return w_[(k * d_ + x) * d_ + y]; }

  /// sum_k exp(2 pi i k / d) w_k(x,y)
  std::complex<double> phasor(std::size_t x, std::size_t y) const {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < d_; ++k)
      acc += std::polar((*this)(k, x, y), 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d_));
    return acc;
  }

 private:
  std::size_t d_;
  std::vector<double> w_;
};

inline PhaseBranchWeights branch_weights(const Box& box) {
  const std::size_t d = box.square_dim();
  std::vector<double> w(d * d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) w[(phase_branch(a, b, x, y, d) * d + x) * d + y] += box(a, b, x, y);
  return PhaseBranchWeights(d, std::move(w));
}

}  // namespace boxlab
