#pragma once

// Unitary realizations of boxes. A dilation starts from
//   |x>_X |y>_Y (x) |ancilla>     (ancilla = output registers A, B at |0>
//                                  followed by any shared registers)
// applies U, and reads P(a,b|x,y) as the squared norm of the (A=a, B=b)
// block of U|x,y,ancilla>.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "boxlab/boxes.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/tensorcore.hpp"

namespace boxlab {

struct DilationRoles {
  std::string input_a = "X";
  std::string input_b = "Y";
  std::string output_a = "A";
  std::string output_b = "B";
  std::vector<std::string> ancilla;  // shared / extra registers beyond A and B
};

struct DilationResult {
  RegisterLayout layout;      // [X, Y] followed by initial_ancilla's registers
  UnitaryOp u;
  StateVector initial_ancilla;
  DilationRoles roles;
  BoxShape shape;
  std::string kind;           // "generic", "pr" or "local"
};

namespace detail {

inline void check_dilation_layout(const DilationResult& dr) {
  const auto& l = dr.layout;
  if (l.size() < 4 || l[0].name != dr.roles.input_a || l[1].name != dr.roles.input_b)
    throw InvalidArgument("dilation layout must start with the two input registers");
  if (RegisterLayout({l[0], l[1]}).concat(dr.initial_ancilla.layout()) != l)
    throw InvalidArgument("dilation layout must be inputs followed by the ancilla layout");
  if (dr.u.layout() != l) throw InvalidArgument("dilation unitary acts on a different layout");
}

}  // namespace detail

/// |alice>_X |bob>_Y (x) ancilla for arbitrary input amplitudes.
inline StateVector initial_state(const DilationResult& dr, const Vector& alice_in, const Vector& bob_in) {
  const auto& l = dr.layout;
  StateVector ax(RegisterLayout{l[0]}, alice_in);
  StateVector by(RegisterLayout{l[1]}, bob_in);
  return tensor(tensor(ax, by), dr.initial_ancilla);
}

inline StateVector initial_state(const DilationResult& dr, std::size_t x, std::size_t y) {
  const auto& l = dr.layout;
  return tensor(StateVector::basis(RegisterLayout{l[0], l[1]}, {x, y}), dr.initial_ancilla);
}

/// Components |phi^{ab}_{xy}> of U|x,y,ancilla> on the registers other than
/// A and B, indexed a * d_b + b.
inline std::vector<Vector> branch_states(const DilationResult& dr, std::size_t x, std::size_t y) {
  const auto& l = dr.layout;
  const std::size_t pa = l.position(dr.roles.output_a), pb = l.position(dr.roles.output_b);
  const std::size_t pos[] = {pa, pb};
  const auto split = detail::split_indices(l, pos);
  const Vector out = dr.u.matrix() * initial_state(dr, x, y).amplitudes();
  std::vector<Vector> phi(split.inner_dim, Vector::Zero(static_cast<Eigen::Index>(split.outer_dim)));
  for (std::size_t i = 0; i < split.inner.size(); ++i)
    phi[split.inner[i]](static_cast<Eigen::Index>(split.outer[i])) = out(static_cast<Eigen::Index>(i));
  return phi;
}

inline Box extract_box(const DilationResult& dr) {
  detail::check_dilation_layout(dr);
  const auto& s = dr.shape;
  const auto& l = dr.layout;
  if (l.at(dr.roles.output_a).dim != s.d_a || l.at(dr.roles.output_b).dim != s.d_b)
    throw InvalidArgument("output register dimensions do not match the box shape");
  const std::size_t pos[] = {l.position(dr.roles.output_a), l.position(dr.roles.output_b)};
  const auto split = detail::split_indices(l, pos);
  std::vector<double> p(s.size(), 0.0);
  for (std::size_t x = 0; x < s.d_x; ++x)
    for (std::size_t y = 0; y < s.d_y; ++y) {
      const Vector out = dr.u.matrix() * initial_state(dr, x, y).amplitudes();
      for (std::size_t i = 0; i < split.inner.size(); ++i) {
        const std::size_t ab = split.inner[i];
        p[s.offset(ab / s.d_b, ab % s.d_b, x, y)] += std::norm(out(static_cast<Eigen::Index>(i)));
      }
    }
  return Box(s, std::move(p));
}

/// V|x,y,0,0> = sum_{ab} sqrt(P(a,b|x,y)) |x,y,a,b>, completed to a unitary.
/// The input registers double as the residual space, X with Alice and Y
/// with Bob; no shared state is needed.
inline DilationResult dilate_generic(const Box& box) {
  const auto& s = box.shape();
  RegisterLayout layout{{"X", s.d_x, Party::Alice}, {"Y", s.d_y, Party::Bob}, {"A", s.d_a, Party::Alice}, {"B", s.d_b, Party::Bob}};
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  const auto k = static_cast<Eigen::Index>(s.d_x * s.d_y);
  Matrix v = Matrix::Zero(n, k);
  std::vector<std::size_t> cols;
  for (std::size_t x = 0; x < s.d_x; ++x)
    for (std::size_t y = 0; y < s.d_y; ++y) {
      const auto col = static_cast<Eigen::Index>(x * s.d_y + y);
      cols.push_back(layout.index({x, y, 0, 0}));
      for (std::size_t a = 0; a < s.d_a; ++a)
        for (std::size_t b = 0; b < s.d_b; ++b)
          v(static_cast<Eigen::Index>(layout.index({x, y, a, b})), col) = std::sqrt(box(a, b, x, y));
    }
  // sqrt(P) columns have unit norm only up to the box's normalization slack
  for (Eigen::Index c = 0; c < k; ++c) v.col(c).normalize();
  UnitaryOp u = complete_isometry(v, layout, cols);
  RegisterLayout anc{layout[2], layout[3]};
  StateVector ancilla = StateVector::basis(anc, {0, 0});
  return {layout, std::move(u), std::move(ancilla), DilationRoles{}, s, "generic"};
}

/// PR^d realization from a shared maximally entangled pair S_A S_B:
/// |x,y,a,b,s,t> -> |x, y, a + s, b + t - xy, s, t> (mod d).
inline DilationResult dilate_pr(std::size_t d) {
  if (d < 2) throw InvalidArgument("dilate_pr needs d >= 2");
  RegisterLayout layout{{"X", d, Party::Alice}, {"Y", d, Party::Bob}, {"A", d, Party::Alice},
                        {"B", d, Party::Bob},   {"SA", d, Party::Alice}, {"SB", d, Party::Bob}};
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  Matrix u = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    const auto g = layout.digits(i);
    const std::size_t x = g[0], y = g[1], a = g[2], b = g[3], sa = g[4], sb = g[5];
    const std::size_t a2 = (a + sa) % d;
    const std::size_t b2 = (b + sb + d - (x * y) % d) % d;
    u(static_cast<Eigen::Index>(layout.index({x, y, a2, b2, sa, sb})), static_cast<Eigen::Index>(i)) = 1.0;
  }
  RegisterLayout anc{layout[2], layout[3], layout[4], layout[5]};
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(anc.total_dim()));
  for (std::size_t s = 0; s < d; ++s) amps(static_cast<Eigen::Index>(anc.index({0, 0, s, s}))) = 1.0 / std::sqrt(static_cast<double>(d));
  StateVector ancilla(anc, std::move(amps));
  DilationRoles roles;
  roles.ancilla = {"SA", "SB"};
  return {layout, UnitaryOp(detail::Trusted{}, layout, std::move(u)), std::move(ancilla), std::move(roles),
          BoxShape::square(d), "pr"};
}

/// Coherent projective measurement on `shared`, recorded into `out`:
/// W |a, s> = sum_{s'} R[s', s] |a + label(s') mod d_out, s'>.
/// The measurement basis is the rows of `rotation`; basis vector s' reports
/// outcome labels[s'] (default s' mod d_out).
inline UnitaryOp coherent_measurement(Register out, Register shared, const Matrix& rotation,
                                      std::vector<std::size_t> labels = {}) {
  const std::size_t dout = out.dim, ds = shared.dim;
  if (static_cast<std::size_t>(rotation.rows()) != ds || rotation.cols() != rotation.rows())
    throw InvalidArgument("rotation size does not match the shared register");
  if (detail::identity_deviation(rotation.adjoint() * rotation) > tol::kUnitary) throw InvalidArgument("rotation is not unitary");
  if (labels.empty()) {
    labels.resize(ds);
    for (std::size_t s = 0; s < ds; ++s) labels[s] = s % dout;
  }
  if (labels.size() != ds) throw InvalidArgument("one outcome label per shared basis vector required");
  RegisterLayout layout{std::move(out), std::move(shared)};
  const auto n = static_cast<Eigen::Index>(dout * ds);
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < dout; ++a)
    for (std::size_t s = 0; s < ds; ++s)
      for (std::size_t s2 = 0; s2 < ds; ++s2) {
        if (labels[s2] >= dout) throw InvalidArgument("outcome label out of range");
        const std::size_t a2 = (a + labels[s2]) % dout;
        w(static_cast<Eigen::Index>(a2 * ds + s2), static_cast<Eigen::Index>(a * ds + s)) = rotation(static_cast<Eigen::Index>(s2), static_cast<Eigen::Index>(s));
      }
  return UnitaryOp(detail::Trusted{}, std::move(layout), std::move(w));
}

/// U = (sum_x |x><x| (x) W_x) (x) (sum_y |y><y| (x) V_y): a product across
/// the Alice/Bob partition by construction. `shared` is a two-register state
/// (Alice's register first); every W_x acts on [A, shared Alice register],
/// every V_y on [B, shared Bob register].
inline DilationResult dilate_local(const StateVector& shared, const std::vector<UnitaryOp>& alice_ops,
                                   const std::vector<UnitaryOp>& bob_ops) {
  const auto& sl = shared.layout();
  if (sl.size() != 2 || sl[0].party != Party::Alice || sl[1].party != Party::Bob)
    throw InvalidArgument("shared state must be on [Alice register, Bob register]");
  if (alice_ops.empty() || bob_ops.empty()) throw InvalidArgument("need at least one setting per party");
  auto check_ops = [](const std::vector<UnitaryOp>& ops, const Register& sreg, Party party) {
    const auto& l0 = ops.front().layout();
    if (l0.size() != 2 || l0[1] != sreg || l0[0].party != party)
      throw InvalidArgument("local operation must act on [output register, " + sreg.name + "]");
    for (const auto& op : ops)
      if (op.layout() != l0) throw InvalidArgument("local operations for different settings act on different layouts");
    return l0[0];
  };
  Register ra = check_ops(alice_ops, sl[0], Party::Alice);
  Register rb = check_ops(bob_ops, sl[1], Party::Bob);
  ra.name = "A";
  rb.name = "B";
  const std::size_t dx = alice_ops.size(), dy = bob_ops.size();
  const std::size_t da = ra.dim, db = rb.dim, sa = sl[0].dim, sb = sl[1].dim;

  RegisterLayout layout{{"X", dx, Party::Alice}, {"Y", dy, Party::Bob}, ra, rb, sl[0], sl[1]};
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  const std::size_t blk = da * db * sa * sb;
  Matrix u = Matrix::Zero(n, n);
  for (std::size_t x = 0; x < dx; ++x)
    for (std::size_t y = 0; y < dy; ++y) {
      const Matrix& w = alice_ops[x].matrix();
      const Matrix& v = bob_ops[y].matrix();
      const std::size_t base = (x * dy + y) * blk;
      for (std::size_t a2 = 0; a2 < da; ++a2)
        for (std::size_t b2 = 0; b2 < db; ++b2)
          for (std::size_t s2 = 0; s2 < sa; ++s2)
            for (std::size_t t2 = 0; t2 < sb; ++t2) {
              const auto row = static_cast<Eigen::Index>(base + ((a2 * db + b2) * sa + s2) * sb + t2);
              for (std::size_t a = 0; a < da; ++a)
                for (std::size_t s = 0; s < sa; ++s) {
                  const cplx wa = w(static_cast<Eigen::Index>(a2 * sa + s2), static_cast<Eigen::Index>(a * sa + s));
                  if (wa == cplx(0.0)) continue;
                  for (std::size_t b = 0; b < db; ++b)
                    for (std::size_t t = 0; t < sb; ++t) {
                      const auto col = static_cast<Eigen::Index>(base + ((a * db + b) * sa + s) * sb + t);
                      u(row, col) = wa * v(static_cast<Eigen::Index>(b2 * sb + t2), static_cast<Eigen::Index>(b * sb + t));
                    }
                }
            }
    }
  StateVector ancilla = tensor(StateVector::basis(RegisterLayout{ra, rb}, {0, 0}), shared);
  DilationRoles roles;
  roles.ancilla = {sl[0].name, sl[1].name};
  return {layout, UnitaryOp(detail::Trusted{}, layout, std::move(u)), std::move(ancilla), std::move(roles),
          BoxShape{dx, dy, da, db}, "local"};
}

}  // namespace boxlab
