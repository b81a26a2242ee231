#pragma once

// Dense complex linear algebra over named, party-tagged registers.
//
// Basis ordering is mixed radix with the leftmost register most significant.
// Every state, operator and density matrix in boxlab uses this ordering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "boxlab/errors.hpp"

namespace boxlab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Party { Alice, Bob };

inline std::string_view to_string(Party p) { return p == Party::Alice ? "Alice" : "Bob"; }

struct Register {
  std::string name;
  std::size_t dim = 1;
  Party party = Party::Alice;

  friend bool operator==(const Register&, const Register&) = default;
};

namespace detail {
// Passkey for constructors that skip invariant checks. Only used by code
// that establishes the invariant by construction.
struct Trusted {
  explicit Trusted() = default;
};
}  // namespace detail

class RegisterLayout {
 public:
  RegisterLayout() = default;
  RegisterLayout(std::initializer_list<Register> regs) : RegisterLayout(std::vector<Register>(regs)) {}
  explicit RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
    std::set<std::string_view> seen;
    for (const auto& r : regs_) {
      if (r.name.empty()) throw InvalidArgument("register name must be non-empty");
      if (r.dim == 0) throw InvalidArgument("register '" + r.name + "' has dimension 0");
      if (!seen.insert(r.name).second) throw InvalidArgument("duplicate register name '" + r.name + "'");
    }
  }

  std::size_t size() const { return regs_.size(); }
  bool empty() const { return regs_.empty(); }
  const Register& operator[](std::size_t i) const { return regs_[i]; }
  const std::vector<Register>& registers() const { return regs_; }
  auto begin() const { return regs_.begin(); }
  auto end() const { return regs_.end(); }

  std::size_t total_dim() const {
    std::size_t n = 1;
    for (const auto& r : regs_) n *= r.dim;
    return n;
  }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i)
      if (regs_[i].name == name) return i;
    return std::nullopt;
  }

  bool contains(std::string_view name) const { return find(name).has_value(); }

  std::size_t position(std::string_view name) const {
    auto i = find(name);
    if (!i) throw InvalidArgument("unknown register '" + std::string(name) + "'");
    return *i;
  }

  const Register& at(std::string_view name) const { return regs_[position(name)]; }

  std::vector<std::string> names_of(Party p) const {
    std::vector<std::string> out;
    for (const auto& r : regs_)
      if (r.party == p) out.push_back(r.name);
    return out;
  }

  /// Concatenation; registers of `other` become the less significant digits.
  RegisterLayout concat(const RegisterLayout& other) const {
    std::vector<Register> regs = regs_;
    regs.insert(regs.end(), other.regs_.begin(), other.regs_.end());
    return RegisterLayout(std::move(regs));
  }

  /// Registers named in `keep`, in this layout's order.
  RegisterLayout subset(std::span<const std::string> keep) const {
    for (const auto& k : keep) position(k);
    std::vector<Register> regs;
    for (const auto& r : regs_)
      if (std::find(keep.begin(), keep.end(), r.name) != keep.end()) regs.push_back(r);
    return RegisterLayout(std::move(regs));
  }

  std::size_t index(std::span<const std::size_t> digits) const {
    if (digits.size() != regs_.size()) throw InvalidArgument("digit count does not match layout");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (digits[i] >= regs_[i].dim) throw InvalidArgument("digit out of range for register '" + regs_[i].name + "'");
      idx = idx * regs_[i].dim + digits[i];
    }
    return idx;
  }

  std::size_t index(std::initializer_list<std::size_t> digits) const {
    return index(std::span<const std::size_t>(digits.begin(), digits.size()));
  }

  std::vector<std::size_t> digits(std::size_t idx) const {
    std::vector<std::size_t> out(regs_.size());
    for (std::size_t i = regs_.size(); i-- > 0;) {
      out[i] = idx % regs_[i].dim;
      idx /= regs_[i].dim;
    }
    return out;
  }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

 private:
  std::vector<Register> regs_;
};

namespace detail {

// For every basis index of `full`, its index within the registers at
// `positions` (in the given order) and within the remaining registers
// (in layout order).
struct IndexSplit {
  std::vector<std::size_t> inner;
  std::vector<std::size_t> outer;
  std::size_t inner_dim = 1;
  std::size_t outer_dim = 1;
};

inline IndexSplit split_indices(const RegisterLayout& full, std::span<const std::size_t> positions) {
  const std::size_t nreg = full.size();
  std::vector<bool> is_inner(nreg, false);
  for (auto p : positions) {
    if (p >= nreg || is_inner[p]) throw InvalidArgument("invalid register selection");
    is_inner[p] = true;
  }
  std::vector<std::size_t> outer_pos;
  for (std::size_t i = 0; i < nreg; ++i)
    if (!is_inner[i]) outer_pos.push_back(i);

  IndexSplit s;
  for (auto p : positions) s.inner_dim *= full[p].dim;
  for (auto p : outer_pos) s.outer_dim *= full[p].dim;

  const std::size_t n = full.total_dim();
  s.inner.resize(n);
  s.outer.resize(n);
  std::vector<std::size_t> dig(nreg, 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t in = 0, out = 0;
    for (auto p : positions) in = in * full[p].dim + dig[p];
    for (auto p : outer_pos) out = out * full[p].dim + dig[p];
    s.inner[idx] = in;
    s.outer[idx] = out;
    // increment mixed-radix counter, rightmost fastest
    for (std::size_t i = nreg; i-- > 0;) {
      if (++dig[i] < full[i].dim) break;
      dig[i] = 0;
    }
  }
  return s;
}

inline std::vector<std::size_t> positions_in_layout_order(const RegisterLayout& full,
                                                          std::span<const std::string> names) {
  std::vector<std::size_t> pos;
  for (const auto& n : names) pos.push_back(full.position(n));
  std::sort(pos.begin(), pos.end());
  if (std::adjacent_find(pos.begin(), pos.end()) != pos.end()) throw InvalidArgument("register named twice");
  return pos;
}

inline double identity_deviation(const Matrix& m) {
  return (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

}  // namespace detail

class StateVector {
 public:
  StateVector(RegisterLayout layout, Vector amps) : layout_(std::move(layout)), amps_(std::move(amps)) {
    if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim())
      throw InvalidArgument("amplitude count does not match layout dimension");
    if (std::abs(amps_.norm() - 1.0) > tol::kNorm)
      throw NumericalError("state vector is not normalized (norm " + std::to_string(amps_.norm()) + ")");
  }
  StateVector(detail::Trusted, RegisterLayout layout, Vector amps)
      : layout_(std::move(layout)), amps_(std::move(amps)) {}

  static StateVector basis(RegisterLayout layout, std::span<const std::size_t> digits) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    v(static_cast<Eigen::Index>(layout.index(digits))) = 1.0;
    return StateVector(detail::Trusted{}, std::move(layout), std::move(v));
  }
  static StateVector basis(RegisterLayout layout, std::initializer_list<std::size_t> digits) {
    return basis(std::move(layout), std::span<const std::size_t>(digits.begin(), digits.size()));
  }

  /// Normalizes `amps`; throws if it is the zero vector.
  static StateVector normalized(RegisterLayout layout, Vector amps) {
    const double n = amps.norm();
    if (n == 0.0) throw InvalidArgument("cannot normalize the zero vector");
    amps /= n;
    return StateVector(std::move(layout), std::move(amps));
  }

  const RegisterLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

 private:
  RegisterLayout layout_;
  Vector amps_;
};

class UnitaryOp {
 public:
  UnitaryOp(RegisterLayout layout, Matrix m) : layout_(std::move(layout)), m_(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (m_.rows() != n || m_.cols() != n) throw InvalidArgument("operator size does not match layout dimension");
    const double dev = detail::identity_deviation(m_.adjoint() * m_);
    if (dev > tol::kUnitary) throw NumericalError("operator is not unitary (max |U^dag U - I| = " + std::to_string(dev) + ")");
  }
  UnitaryOp(detail::Trusted, RegisterLayout layout, Matrix m) : layout_(std::move(layout)), m_(std::move(m)) {}

  static UnitaryOp identity(RegisterLayout layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return UnitaryOp(detail::Trusted{}, std::move(layout), Matrix::Identity(n, n));
  }

  const RegisterLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  RegisterLayout layout_;
  Matrix m_;
};

class DensityMatrix {
 public:
  DensityMatrix(RegisterLayout layout, Matrix rho) : layout_(std::move(layout)), rho_(std::move(rho)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (rho_.rows() != n || rho_.cols() != n) throw InvalidArgument("density matrix size does not match layout");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol::kPsd) throw NumericalError("density matrix is not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0)) > tol::kTrace) throw NumericalError("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::kPsd) throw NumericalError("density matrix is not positive semidefinite");
  }
  DensityMatrix(detail::Trusted, RegisterLayout layout, Matrix rho) : layout_(std::move(layout)), rho_(std::move(rho)) {}

  const RegisterLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return rho_; }

  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  RegisterLayout layout_;
  Matrix rho_;
};

// ---------------------------------------------------------------------------
// tensor products

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  const auto na = a.amplitudes().size(), nb = b.amplitudes().size();
  Vector v(na * nb);
  for (Eigen::Index i = 0; i < na; ++i) v.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  return StateVector(detail::Trusted{}, std::move(layout), std::move(v));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline UnitaryOp tensor(const UnitaryOp& a, const UnitaryOp& b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  return UnitaryOp(detail::Trusted{}, std::move(layout), kron(a.matrix(), b.matrix()));
}

inline UnitaryOp adjoint(const UnitaryOp& u) {
  return UnitaryOp(detail::Trusted{}, u.layout(), u.matrix().adjoint());
}

inline UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b) {
  if (a.layout() != b.layout()) throw InvalidArgument("cannot compose operators on different layouts");
  return UnitaryOp(detail::Trusted{}, a.layout(), a.matrix() * b.matrix());
}

// ---------------------------------------------------------------------------
// application

inline StateVector apply(const UnitaryOp& u, const StateVector& s) {
  if (u.layout() != s.layout()) throw InvalidArgument("operator and state layouts differ");
  return StateVector(detail::Trusted{}, s.layout(), u.matrix() * s.amplitudes());
}

/// Applies `u` to the registers of `s` that it names (matched by name, in
/// u's register order), acting as the identity on the rest.
inline StateVector apply_local(const UnitaryOp& u, const StateVector& s) {
  if (u.layout() == s.layout()) return apply(u, s);
  std::vector<std::size_t> pos;
  for (const auto& r : u.layout()) {
    const auto p = s.layout().position(r.name);
    if (s.layout()[p].dim != r.dim) throw InvalidArgument("dimension mismatch on register '" + r.name + "'");
    pos.push_back(p);
  }
  const auto split = detail::split_indices(s.layout(), pos);
  const auto n = s.dim();
  Matrix m(static_cast<Eigen::Index>(split.inner_dim), static_cast<Eigen::Index>(split.outer_dim));
  for (std::size_t i = 0; i < n; ++i)
    m(static_cast<Eigen::Index>(split.inner[i]), static_cast<Eigen::Index>(split.outer[i])) = s[i];
  const Matrix r = u.matrix() * m;
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    out(static_cast<Eigen::Index>(i)) = r(static_cast<Eigen::Index>(split.inner[i]), static_cast<Eigen::Index>(split.outer[i]));
  return StateVector(detail::Trusted{}, s.layout(), std::move(out));
}

// ---------------------------------------------------------------------------
// reduced states and entropy

inline DensityMatrix pure_density(const StateVector& s) {
  return DensityMatrix(detail::Trusted{}, s.layout(), s.amplitudes() * s.amplitudes().adjoint());
}

inline DensityMatrix partial_trace(const StateVector& s, std::span<const std::string> keep) {
  const auto pos = detail::positions_in_layout_order(s.layout(), keep);
  RegisterLayout sub = s.layout().subset(keep);
  const auto split = detail::split_indices(s.layout(), pos);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(split.inner_dim), static_cast<Eigen::Index>(split.outer_dim));
  for (std::size_t i = 0; i < s.dim(); ++i)
    m(static_cast<Eigen::Index>(split.inner[i]), static_cast<Eigen::Index>(split.outer[i])) = s[i];
  Matrix rho = m * m.adjoint();
  return DensityMatrix(detail::Trusted{}, std::move(sub), std::move(rho));
}

inline DensityMatrix partial_trace(const StateVector& s, std::initializer_list<std::string> keep) {
  return partial_trace(s, std::span<const std::string>(keep.begin(), keep.size()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  const auto& layout = rho.layout();
  const auto pos = detail::positions_in_layout_order(layout, keep);
  RegisterLayout sub = layout.subset(keep);
  const auto split = detail::split_indices(layout, pos);
  // full index for each (inner, outer) pair
  std::vector<std::size_t> full(split.inner_dim * split.outer_dim);
  for (std::size_t i = 0; i < split.inner.size(); ++i) full[split.inner[i] * split.outer_dim + split.outer[i]] = i;
  const auto ni = static_cast<Eigen::Index>(split.inner_dim);
  Matrix out = Matrix::Zero(ni, ni);
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) {
      cplx acc = 0.0;
      for (std::size_t o = 0; o < split.outer_dim; ++o)
        acc += m(static_cast<Eigen::Index>(full[static_cast<std::size_t>(i) * split.outer_dim + o]),
                 static_cast<Eigen::Index>(full[static_cast<std::size_t>(j) * split.outer_dim + o]));
      out(i, j) = acc;
    }
  return DensityMatrix(detail::Trusted{}, std::move(sub), std::move(out));
}

/// Von Neumann entropy in bits.
inline double entropy_bits(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -tol::kPsd)
    throw NumericalError("entropy of a non-PSD matrix (min eigenvalue " + std::to_string(ev.minCoeff()) + ")");
  double h = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double p = std::clamp(ev(i), 0.0, 1.0);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

// ---------------------------------------------------------------------------
// constructors

/// Entry (y, z) = exp(2 pi i z y / d) / sqrt(d); column z is the Fourier basis state |z>.
inline UnitaryOp fourier_matrix(std::size_t d, Register reg) {
  if (d == 0) throw InvalidArgument("fourier_matrix needs d >= 1");
  reg.dim = d;
  const auto n = static_cast<Eigen::Index>(d);
  Matrix f(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t y = 0; y < d; ++y)
    for (std::size_t z = 0; z < d; ++z) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((y * z) % d) / static_cast<double>(d);
      f(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)) = std::polar(norm, phase);
    }
  return UnitaryOp(detail::Trusted{}, RegisterLayout{reg}, std::move(f));
}

inline UnitaryOp fourier_matrix(std::size_t d) { return fourier_matrix(d, Register{"q", d, Party::Alice}); }

/// Embeds the orthonormal columns of `v` at `domain_columns` (default
/// 0..k-1) and fills the remaining columns, in increasing index order, with
/// the canonical basis vectors e_0, e_1, ... orthogonalized against
/// everything accepted so far. Deterministic for a given input.
inline UnitaryOp complete_isometry(const Matrix& v, RegisterLayout layout, std::vector<std::size_t> domain_columns = {}) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  const auto k = v.cols();
  if (v.rows() != n) throw InvalidArgument("isometry row count does not match layout dimension");
  if (k > n) throw InvalidArgument("isometry has more columns than rows");
  if (domain_columns.empty()) {
    domain_columns.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) domain_columns[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
  }
  if (static_cast<Eigen::Index>(domain_columns.size()) != k) throw InvalidArgument("domain column count mismatch");
  const double dev = k > 0 ? detail::identity_deviation(v.adjoint() * v) : 0.0;
  if (dev > tol::kUnitary) throw InvalidArgument("isometry columns are not orthonormal (deviation " + std::to_string(dev) + ")");

  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (auto c : domain_columns) {
    if (c >= static_cast<std::size_t>(n) || used[c]) throw InvalidArgument("invalid or repeated domain column");
    used[c] = true;
  }

  Matrix basis(n, n);
  basis.leftCols(k) = v;
  Eigen::Index filled = k;
  for (Eigen::Index e = 0; e < n && filled < n; ++e) {
    Vector cand = Vector::Zero(n);
    cand(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < filled; ++j) cand -= basis.col(j) * basis.col(j).dot(cand);
    const double r = cand.norm();
    if (r < 1e-6) continue;
    basis.col(filled++) = cand / r;
  }
  if (filled != n) throw NumericalError("isometry completion failed");

  Matrix u(n, n);
  for (Eigen::Index j = 0; j < k; ++j) u.col(static_cast<Eigen::Index>(domain_columns[static_cast<std::size_t>(j)])) = v.col(j);
  Eigen::Index next = k;
  for (Eigen::Index c = 0; c < n; ++c)
    if (!used[static_cast<std::size_t>(c)]) u.col(c) = basis.col(next++);
  return UnitaryOp(std::move(layout), std::move(u));
}

// ---------------------------------------------------------------------------
// random sampling

inline Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of R's diagonal divided out.
inline Matrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline UnitaryOp random_unitary(RegisterLayout layout, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  return UnitaryOp(std::move(layout), random_unitary(n, rng));
}

/// Random isometry with `k` orthonormal columns in dimension `n`.
inline Matrix random_isometry(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, k, rng));
  return qr.householderQ() * Matrix::Identity(n, k);
}

inline StateVector random_state(RegisterLayout layout, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  Vector v = random_gaussian(n, 1, rng).col(0);
  return StateVector::normalized(std::move(layout), std::move(v));
}

}  // namespace boxlab
