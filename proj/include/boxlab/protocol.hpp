#pragma once

// The reveal protocol: copy inputs, run U, kick back the phase
// exp(2 pi i (a - b) / d), undo U and the copies, then read Bob's input
// register in the Fourier basis. A product U leaves Bob's readout
// independent of Alice's input; a non-product U can signal through it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "boxlab/dilation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/tensorcore.hpp"

namespace boxlab {

struct ProtocolTranscript {
  std::size_t d = 0;
  std::vector<std::vector<double>> p_z_given_x;  // [z][x]
  double capacity_bits = 0.0;
  double entanglement_before_ebits = 0.0;
  double entanglement_after_ebits = 0.0;
  bool with_copy = true;

  double entanglement_gain() const { return entanglement_after_ebits - entanglement_before_ebits; }
};

struct EntanglementChange {
  double before_ebits = 0.0;
  double after_ebits = 0.0;
  double gain() const { return after_ebits - before_ebits; }
};

struct ProductTestResult {
  bool is_product = false;
  double choi_entanglement_ebits = 0.0;
};

inline constexpr double kProductEntropyTol = 1e-9;

namespace detail {

inline std::size_t protocol_dim(const DilationResult& dr) {
  const auto& s = dr.shape;
  if (!s.is_square()) throw InvalidArgument("the reveal protocol needs a square box (d_x = d_y = d_a = d_b)");
  detail::check_dilation_layout(dr);
  return s.d_a;
}

inline Vector uniform_amplitudes(std::size_t d) {
  return Vector::Constant(static_cast<Eigen::Index>(d), cplx(1.0 / std::sqrt(static_cast<double>(d))));
}

inline Vector basis_amplitudes(std::size_t d, std::size_t i) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

inline RegisterLayout copy_registers(const DilationResult& dr) {
  return RegisterLayout{{dr.roles.input_a + "c", dr.layout[0].dim, Party::Alice},
                        {dr.roles.input_b + "c", dr.layout[1].dim, Party::Bob}};
}

}  // namespace detail

/// Diagonal exp(2 pi i a / d) on A times exp(-2 pi i b / d) on B.
inline UnitaryOp phase_op(const DilationResult& dr) {
  const auto& l = dr.layout;
  const auto& ra = l.at(dr.roles.output_a);
  const auto& rb = l.at(dr.roles.output_b);
  if (ra.dim != rb.dim) throw InvalidArgument("phase_op needs equal outcome counts");
  const std::size_t d = ra.dim;
  const std::size_t pa = l.position(ra.name), pb = l.position(rb.name);
  const auto n = static_cast<Eigen::Index>(l.total_dim());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = l.digits(static_cast<std::size_t>(i));
    const std::size_t k = (g[pa] + d - g[pb]) % d;
    m(i, i) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d));
  }
  return UnitaryOp(detail::Trusted{}, l, std::move(m));
}

/// Modular-addition copy of each input into a fresh register on the same
/// side: |c>_Xc |x>_X -> |c + x>_Xc |x>_X, likewise for Y. Acts on
/// [Xc, X, Yc, Y].
inline UnitaryOp copy_op(const DilationResult& dr) {
  const auto& l = dr.layout;
  const auto copies = detail::copy_registers(dr);
  RegisterLayout layout{copies[0], l[0], copies[1], l[1]};
  const std::size_t dx = l[0].dim, dy = l[1].dim;
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t cx = 0; cx < dx; ++cx)
    for (std::size_t x = 0; x < dx; ++x)
      for (std::size_t cy = 0; cy < dy; ++cy)
        for (std::size_t y = 0; y < dy; ++y)
          m(static_cast<Eigen::Index>(layout.index({(cx + x) % dx, x, (cy + y) % dy, y})),
            static_cast<Eigen::Index>(layout.index({cx, x, cy, y}))) = 1.0;
  return UnitaryOp(detail::Trusted{}, std::move(layout), std::move(m));
}

/// Runs copy, U, phase, U^dag, copy^dag on the given input amplitudes.
/// The returned state lives on dr.layout, followed by [Xc, Yc] when
/// with_copy is set.
inline StateVector run_chain(const DilationResult& dr, const Vector& alice_in, const Vector& bob_in, bool with_copy) {
  detail::protocol_dim(dr);
  StateVector s = initial_state(dr, alice_in, bob_in);
  UnitaryOp copy = UnitaryOp::identity(RegisterLayout{dr.layout[0]});
  if (with_copy) {
    const auto copies = detail::copy_registers(dr);
    s = tensor(s, StateVector::basis(copies, {0, 0}));
    copy = copy_op(dr);
    s = apply_local(copy, s);
  }
  s = apply_local(dr.u, s);
  s = apply_local(phase_op(dr), s);
  s = apply_local(adjoint(dr.u), s);
  if (with_copy) s = apply_local(adjoint(copy), s);
  return s;
}

/// Distribution of Bob's Fourier-basis readout z of his input register.
inline std::vector<double> fourier_readout(const DilationResult& dr, const StateVector& final_state) {
  const auto& rb = dr.layout.at(dr.roles.input_b);
  const std::size_t d = rb.dim;
  const StateVector rotated = apply_local(adjoint(fourier_matrix(d, rb)), final_state);
  const std::size_t pos = rotated.layout().position(rb.name);
  std::vector<double> p(d, 0.0);
  for (std::size_t i = 0; i < rotated.dim(); ++i) p[rotated.layout().digits(i)[pos]] += std::norm(rotated[i]);
  return p;
}

/// I(X;Z) in bits for a uniform prior on x. p_z_given_x is indexed [z][x].
inline double mutual_information_bits(const std::vector<std::vector<double>>& p_z_given_x) {
  if (p_z_given_x.empty()) return 0.0;
  const std::size_t nz = p_z_given_x.size(), nx = p_z_given_x.front().size();
  double info = 0.0;
  for (std::size_t z = 0; z < nz; ++z) {
    double pz = 0.0;
    for (std::size_t x = 0; x < nx; ++x) pz += p_z_given_x[z][x] / static_cast<double>(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      const double p = p_z_given_x[z][x];
      if (p > 0.0 && pz > 0.0) info += p / static_cast<double>(nx) * std::log2(p / pz);
    }
  }
  return std::clamp(info, 0.0, std::log2(static_cast<double>(nz)));
}

inline double cut_entropy(const StateVector& s) {
  const auto alice = s.layout().names_of(Party::Alice);
  if (alice.empty() || alice.size() == s.layout().size()) return 0.0;
  return entropy_bits(partial_trace(s, alice));
}

/// Entanglement across the Alice|Bob cut before and after the chain, both
/// inputs in uniform superposition.
inline EntanglementChange entanglement_generated(const DilationResult& dr, bool with_copy = true) {
  const std::size_t d = detail::protocol_dim(dr);
  const Vector uni = detail::uniform_amplitudes(d);
  StateVector before = initial_state(dr, uni, uni);
  StateVector after = run_chain(dr, uni, uni, with_copy);
  return {cut_entropy(before), cut_entropy(after)};
}

/// Alice sends each x in turn while Bob holds the uniform superposition.
inline ProtocolTranscript reveal_protocol(const DilationResult& dr, bool with_copy = true) {
  const std::size_t d = detail::protocol_dim(dr);
  ProtocolTranscript t;
  t.d = d;
  t.with_copy = with_copy;
  t.p_z_given_x.assign(d, std::vector<double>(d, 0.0));
  const Vector uni = detail::uniform_amplitudes(d);
  for (std::size_t x = 0; x < d; ++x) {
    const auto p = fourier_readout(dr, run_chain(dr, detail::basis_amplitudes(d, x), uni, with_copy));
    for (std::size_t z = 0; z < d; ++z) t.p_z_given_x[z][x] = p[z];
  }
  t.capacity_bits = mutual_information_bits(t.p_z_given_x);
  const auto ent = entanglement_generated(dr, with_copy);
  t.entanglement_before_ebits = ent.before_ebits;
  t.entanglement_after_ebits = ent.after_ebits;
  return t;
}

/// Choi state N sum_{ij} |i>_{A'} |j>_{B'} (x) U|i,j>: primed copies of every
/// register first (same parties, name suffixed with '), then U's registers.
inline StateVector choi_state(const UnitaryOp& u) {
  std::vector<Register> regs;
  for (auto r : u.layout()) {
    r.name += "'";
    regs.push_back(std::move(r));
  }
  for (const auto& r : u.layout()) regs.push_back(r);
  RegisterLayout layout(std::move(regs));
  const auto n = static_cast<Eigen::Index>(u.dim());
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  Vector amps(n * n);
  for (Eigen::Index in = 0; in < n; ++in) amps.segment(in * n, n) = norm * u.matrix().col(in);
  return StateVector(detail::Trusted{}, std::move(layout), std::move(amps));
}

/// U is a product U_A (x) U_B iff its Choi state has no entanglement across
/// A'A | BB'.
inline ProductTestResult product_test(const UnitaryOp& u) {
  if (u.layout().names_of(Party::Alice).empty() || u.layout().names_of(Party::Bob).empty())
    throw InvalidArgument("product_test needs at least one register per party");
  const double h = cut_entropy(choi_state(u));
  return {h <= kProductEntropyTol, h};
}

}  // namespace boxlab
