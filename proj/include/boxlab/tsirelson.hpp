#pragma once

// Causal upper bounds on B^d. Starting from "Bob's Fourier readout must not
// depend on Alice's input" one gets, for any box realizable by local
// measurements on a shared state,
//
//   C1:  sum_x | (1/d) sum_y sum_k e^{2 pi i k/d} w_k(x,y) |  <=  sqrt(d)
//   C2:  sum_x   (1/d) sum_y sum_k cos(2 pi k/d) w_k(x,y)    <=  sqrt(d)
//
// with w_k the phase-branch weights. At d = 2 C2 is the CHSH bound 2 sqrt 2;
// at d = 3 it becomes B^3 <= 1/3 + 2/(3 sqrt 3).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>

#include "boxlab/boxes.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/lhv.hpp"

namespace boxlab {

inline double c1_lhs(const Box& box) {
  const auto w = branch_weights(box);
  const std::size_t d = w.d();
  double total = 0.0;
  for (std::size_t x = 0; x < d; ++x) {
    std::complex<double> inner = 0.0;
    for (std::size_t y = 0; y < d; ++y) inner += w.phasor(x, y);
    total += std::abs(inner / static_cast<double>(d));
  }
  return total;
}

/// sum_{x,y} sum_k cos(2 pi k/d) w_k(x,y); the form compared against
/// d sqrt(d) (the CHSH expression at d = 2).
inline double c4_sum(const Box& box) {
  const auto w = branch_weights(box);
  const std::size_t d = w.d();
  double total = 0.0;
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y)
      for (std::size_t k = 0; k < d; ++k)
        total += std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d)) * w(k, x, y);
  return total;
}

inline double c2_lhs(const Box& box) { return c4_sum(box) / static_cast<double>(box.square_dim()); }

struct BoundCheck {
  double value = 0.0;
  double bound = 0.0;
  bool violated = false;
};

inline constexpr double kChshQuantumBound = 2.0 * std::numbers::sqrt2;

/// sum_{x,y} [w_0(x,y) - w_1(x,y)] against 2 sqrt 2.
inline BoundCheck chsh_bound_check(const Box& box) {
  if (box.shape() != BoxShape::square(2)) throw InvalidArgument("chsh_bound_check needs d = 2");
  const auto w = branch_weights(box);
  double v = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) v += w(0, x, y) - w(1, x, y);
  return {v, kChshQuantumBound, v > kChshQuantumBound + tol::kViolation};
}

/// 1/3 + 2/(3 sqrt 3). Whether it is attained is not known.
inline double b3_bound() { return 1.0 / 3.0 + 2.0 / (3.0 * std::numbers::sqrt3); }

inline BoundCheck b3_check(const Box& box) {
  if (box.shape() != BoxShape::square(3)) throw InvalidArgument("b3_check needs d = 3");
  const double v = eval(bell_bd(3), box);
  return {v, b3_bound(), v > b3_bound() + tol::kViolation};
}

/// Upper bound on B^d for local quantum boxes where one is known (d = 2, 3).
inline std::optional<double> quantum_upper(std::size_t d) {
  if (d == 2) return 0.5 + 0.5 / std::numbers::sqrt2;
  if (d == 3) return b3_bound();
  return std::nullopt;
}

struct BoundReport {
  std::size_t d = 0;
  double c1_lhs = 0.0;
  double c1_rhs = 0.0;
  double c2_lhs = 0.0;
  double bell_value = 0.0;
  std::optional<double> quantum_upper;
  std::optional<double> lhv_max;
  bool violates_c1 = false;
  bool violates_quantum_upper = false;
  bool exploratory = false;  // d >= 4: C1 is evaluated but gives no known Tsirelson bound
};

/// `lhv_max` is looked up with classical_max when not supplied; it is left
/// empty when the strategy count is too large to enumerate.
inline BoundReport bound_report(const Box& box, std::optional<double> lhv_max = std::nullopt) {
  const std::size_t d = box.square_dim();
  BoundReport r;
  r.d = d;
  r.c1_lhs = boxlab::c1_lhs(box);
  r.c1_rhs = std::sqrt(static_cast<double>(d));
  r.c2_lhs = boxlab::c2_lhs(box);
  r.bell_value = eval(bell_bd(d), box);
  r.quantum_upper = boxlab::quantum_upper(d);
  if (lhv_max) {
    r.lhv_max = lhv_max;
  } else {
    try {
      r.lhv_max = classical_max(bell_bd(d)).value;
    } catch (const InvalidArgument&) {
    }
  }
  r.violates_c1 = r.c1_lhs > r.c1_rhs + tol::kViolation;
  r.violates_quantum_upper = r.quantum_upper && r.bell_value > *r.quantum_upper + tol::kViolation;
  r.exploratory = d >= 4;
  return r;
}

/// Largest v with mix(pr_box(d), uniform_box(d), v) inside the d = 2 (CHSH)
/// or d = 3 bound, by bisection; cross-checked against 1/sqrt(d).
inline double critical_visibility(std::size_t d) {
  if (d != 2 && d != 3) throw InvalidArgument("critical_visibility supports d = 2 and d = 3");
  const Box pr = pr_box(d), noise = uniform_box(d);
  const auto f = bell_bd(d);
  const double bound = *quantum_upper(d);
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (eval(f, mix(pr, noise, mid)) > bound)
      hi = mid;
    else
      lo = mid;
  }
  const double closed = 1.0 / std::sqrt(static_cast<double>(d));
  if (std::abs(lo - closed) > 1e-9) throw NumericalError("critical visibility bisection disagrees with 1/sqrt(d)");
  return lo;
}

}  // namespace boxlab
