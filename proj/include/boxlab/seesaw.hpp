#pragma once

// See-saw lower bounds on the quantum value of a Bell functional with
// projective measurements on C^D (x) C^D.
//
// Each sweep (i) sets the state to the top eigenvector of the Bell operator
// sum c_{abxy} P^x_a (x) P^y_b, then (ii) re-optimizes Alice's PVMs and
// (iii) Bob's PVMs against the fixed state and the other party. Every step
// is a coordinate ascent, so the value never decreases.
//
// PVM step: for setting x, outcome a has the PSD reward operator
//   R_a = sum_{b,y} c_{abxy} Tr_B[(I (x) P^y_b) |psi><psi|]
// and we maximize sum_a Tr(E_a^dag R_a E_a) over unitaries E = [E_0|...|E_{d-1}]
// (E_a spans outcome a's eigenspace). The objective is convex in E, so
// replacing E with the polar factor of G = [R_0 E_0 | ...] never decreases
// it; we iterate that to a fixed point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "boxlab/boxes.hpp"
#include "boxlab/dilation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/parallel.hpp"
#include "boxlab/tensorcore.hpp"

namespace boxlab {

/// Projective measurement given by an orthonormal basis whose consecutive
/// column blocks (of sizes `ranks`) span the outcome eigenspaces.
struct Measurement {
  Matrix basis;
  std::vector<std::size_t> ranks;

  std::size_t outcomes() const { return ranks.size(); }

  std::size_t first_column(std::size_t a) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < a; ++i) c += ranks[i];
    return c;
  }

  Matrix projector(std::size_t a) const {
    const auto block = basis.middleCols(static_cast<Eigen::Index>(first_column(a)), static_cast<Eigen::Index>(ranks[a]));
    return block * block.adjoint();
  }

  std::vector<Matrix> projectors() const {
    std::vector<Matrix> out;
    for (std::size_t a = 0; a < outcomes(); ++a) out.push_back(projector(a));
    return out;
  }

  /// Outcome reported by each basis column.
  std::vector<std::size_t> labels() const {
    std::vector<std::size_t> l;
    for (std::size_t a = 0; a < ranks.size(); ++a) l.insert(l.end(), ranks[a], a);
    return l;
  }
};

struct QuantumStrategy {
  std::size_t local_dim = 0;
  StateVector state;                  // on [SA (Alice), SB (Bob)]
  std::vector<Measurement> alice;     // per setting x
  std::vector<Measurement> bob;       // per setting y

  std::vector<Matrix> alice_pvm(std::size_t x) const { return alice.at(x).projectors(); }
  std::vector<Matrix> bob_pvm(std::size_t y) const { return bob.at(y).projectors(); }
};

struct OptResult {
  double best_value = 0.0;
  QuantumStrategy strategy;
  std::size_t iterations = 0;     // sweeps used by the winning restart
  std::size_t restarts_used = 0;
  bool converged = false;         // the winning restart met the improvement threshold
  std::vector<double> history;    // value after each sweep of the winning restart
};

struct SeesawOptions {
  std::size_t local_dim = 0;  // 0: use the functional's outcome count
  std::size_t restarts = 20;
  std::size_t max_iters = 2000;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  std::size_t workers = 0;    // 0: thread_cap()
};

inline RegisterLayout shared_layout(std::size_t local_dim) {
  return RegisterLayout{{"SA", local_dim, Party::Alice}, {"SB", local_dim, Party::Bob}};
}

namespace detail {

inline void check_measurement(const Measurement& m, std::size_t dim) {
  if (static_cast<std::size_t>(m.basis.rows()) != dim || m.basis.cols() != m.basis.rows())
    throw InvalidArgument("measurement basis has the wrong size");
  std::size_t total = 0;
  for (auto r : m.ranks) total += r;
  if (total != dim) throw InvalidArgument("measurement ranks must sum to the local dimension");
  Matrix sum = Matrix::Zero(m.basis.rows(), m.basis.cols());
  for (std::size_t a = 0; a < m.outcomes(); ++a) {
    const Matrix p = m.projector(a);
    if ((p * p - p).cwiseAbs().maxCoeff() > 1e-9) throw InvalidArgument("projector is not idempotent");
    sum += p;
  }
  if (identity_deviation(sum) > 1e-9) throw InvalidArgument("projectors do not sum to the identity");
}

// Psi(i, j) = <i|_A <j|_B |psi>
inline Matrix state_matrix(const StateVector& s, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = s.amplitudes()(i * n + j);
  return m;
}

inline std::vector<std::size_t> default_ranks(std::size_t dim, std::size_t outcomes) {
  std::vector<std::size_t> r(outcomes, dim / outcomes);
  for (std::size_t a = 0; a < dim % outcomes; ++a) ++r[a];
  return r;
}

// Tr_B[(I (x) P) |psi><psi|] = Psi P^T Psi^dag
inline Matrix reduced_alice(const Matrix& psi, const Matrix& bob_proj) { return psi * bob_proj.transpose() * psi.adjoint(); }
// Tr_A[(P (x) I) |psi><psi|] = Psi^T P^T conj(Psi)
inline Matrix reduced_bob(const Matrix& psi, const Matrix& alice_proj) { return psi.transpose() * alice_proj.transpose() * psi.conjugate(); }

inline double pvm_objective(const std::vector<Matrix>& rewards, const Measurement& m) {
  double v = 0.0;
  for (std::size_t a = 0; a < rewards.size(); ++a) {
    const auto block = m.basis.middleCols(static_cast<Eigen::Index>(m.first_column(a)), static_cast<Eigen::Index>(m.ranks[a]));
    v += (block.adjoint() * rewards[a] * block).trace().real();
  }
  return v;
}

// Polar-factor ascent of sum_a Tr(E_a^dag R_a E_a) from the current basis.
// Adding c I to every R_a shifts the objective by the constant c * dim, so
// the rewards are first shifted to be positive semidefinite; the polar step
// is then a minorize-maximize step and never decreases the objective.
inline void improve_pvm(std::vector<Matrix> rewards, Measurement& m) {
  double lowest = 0.0;
  for (const auto& r : rewards) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, es.eigenvalues()(0));
  }
  if (lowest < 0.0)
    for (auto& r : rewards) r -= lowest * Matrix::Identity(r.rows(), r.cols());
  double current = pvm_objective(rewards, m);
  for (int it = 0; it < 500; ++it) {
    Matrix g(m.basis.rows(), m.basis.cols());
    for (std::size_t a = 0; a < rewards.size(); ++a) {
      const auto c0 = static_cast<Eigen::Index>(m.first_column(a));
      const auto r = static_cast<Eigen::Index>(m.ranks[a]);
      g.middleCols(c0, r) = rewards[a] * m.basis.middleCols(c0, r);
    }
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Measurement next{svd.matrixU() * svd.matrixV().adjoint(), m.ranks};
    const double v = pvm_objective(rewards, next);
    if (v < current) break;  // rounding only; the step is an ascent
    const bool done = v - current < 1e-15;
    m = std::move(next);
    current = v;
    if (done) break;
  }
}

struct Sweeper {
  const BellFunctional& f;
  std::size_t dim;

  std::size_t nx() const { return f.shape().d_x; }
  std::size_t ny() const { return f.shape().d_y; }
  std::size_t na() const { return f.shape().d_a; }
  std::size_t nb() const { return f.shape().d_b; }

  Matrix bell_operator(const QuantumStrategy& q) const {
    const auto n = static_cast<Eigen::Index>(dim * dim);
    Matrix op = Matrix::Zero(n, n);
    std::vector<std::vector<Matrix>> pa(nx()), pb(ny());
    for (std::size_t x = 0; x < nx(); ++x) pa[x] = q.alice[x].projectors();
    for (std::size_t y = 0; y < ny(); ++y) pb[y] = q.bob[y].projectors();
    for (std::size_t x = 0; x < nx(); ++x)
      for (std::size_t y = 0; y < ny(); ++y)
        for (std::size_t a = 0; a < na(); ++a)
          for (std::size_t b = 0; b < nb(); ++b) {
            const double c = f(a, b, x, y);
            if (c != 0.0) op += c * kron(pa[x][a], pb[y][b]);
          }
    return op;
  }

  void update_state(QuantumStrategy& q) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(bell_operator(q));
    const auto top = es.eigenvalues().size() - 1;
    q.state = StateVector::normalized(q.state.layout(), es.eigenvectors().col(top));
  }

  void update_alice(QuantumStrategy& q) const {
    const Matrix psi = state_matrix(q.state, dim);
    std::vector<std::vector<Matrix>> red(ny());
    for (std::size_t y = 0; y < ny(); ++y)
      for (std::size_t b = 0; b < nb(); ++b) red[y].push_back(reduced_alice(psi, q.bob[y].projector(b)));
    for (std::size_t x = 0; x < nx(); ++x) {
      std::vector<Matrix> rewards(na(), Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
      for (std::size_t a = 0; a < na(); ++a)
        for (std::size_t y = 0; y < ny(); ++y)
          for (std::size_t b = 0; b < nb(); ++b)
            if (const double c = f(a, b, x, y); c != 0.0) rewards[a] += c * red[y][b];
      improve_pvm(rewards, q.alice[x]);
    }
  }

  void update_bob(QuantumStrategy& q) const {
    const Matrix psi = state_matrix(q.state, dim);
    std::vector<std::vector<Matrix>> red(nx());
    for (std::size_t x = 0; x < nx(); ++x)
      for (std::size_t a = 0; a < na(); ++a) red[x].push_back(reduced_bob(psi, q.alice[x].projector(a)));
    for (std::size_t y = 0; y < ny(); ++y) {
      std::vector<Matrix> rewards(nb(), Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
      for (std::size_t b = 0; b < nb(); ++b)
        for (std::size_t x = 0; x < nx(); ++x)
          for (std::size_t a = 0; a < na(); ++a)
            if (const double c = f(a, b, x, y); c != 0.0) rewards[b] += c * red[x][a];
      improve_pvm(rewards, q.bob[y]);
    }
  }

  double value(const QuantumStrategy& q) const {
    const Vector& v = q.state.amplitudes();
    return v.dot(bell_operator(q) * v).real();
  }
};

}  // namespace detail

/// P(a,b|x,y) = <psi| P^x_a (x) P^y_b |psi>.
inline Box strategy_box(const QuantumStrategy& q) {
  const std::size_t dim = q.local_dim;
  if (q.state.layout().total_dim() != dim * dim) throw InvalidArgument("state dimension does not match local_dim");
  if (q.alice.empty() || q.bob.empty()) throw InvalidArgument("strategy needs measurements for both parties");
  for (const auto& m : q.alice) detail::check_measurement(m, dim);
  for (const auto& m : q.bob) detail::check_measurement(m, dim);
  const BoxShape shape{q.alice.size(), q.bob.size(), q.alice.front().outcomes(), q.bob.front().outcomes()};
  for (const auto& m : q.alice)
    if (m.outcomes() != shape.d_a) throw InvalidArgument("Alice's settings have different outcome counts");
  for (const auto& m : q.bob)
    if (m.outcomes() != shape.d_b) throw InvalidArgument("Bob's settings have different outcome counts");
  const Matrix psi = detail::state_matrix(q.state, dim);
  std::vector<double> p(shape.size(), 0.0);
  for (std::size_t x = 0; x < shape.d_x; ++x)
    for (std::size_t a = 0; a < shape.d_a; ++a) {
      const Matrix left = psi.adjoint() * q.alice[x].projector(a) * psi;
      for (std::size_t y = 0; y < shape.d_y; ++y)
        for (std::size_t b = 0; b < shape.d_b; ++b) {
          const double v = (left * q.bob[y].projector(b).transpose()).trace().real();
          p[shape.offset(a, b, x, y)] = std::max(0.0, v);
        }
    }
  return Box(shape, std::move(p));
}

/// Strategy with Haar-random measurement bases; the state is set by the
/// first see-saw step.
inline QuantumStrategy random_strategy(const BoxShape& shape, std::size_t local_dim, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(local_dim);
  auto make = [&](std::size_t settings, std::size_t outcomes) {
    std::vector<Measurement> ms;
    for (std::size_t s = 0; s < settings; ++s) ms.push_back({random_unitary(n, rng), detail::default_ranks(local_dim, outcomes)});
    return ms;
  };
  auto alice = make(shape.d_x, shape.d_a);
  auto bob = make(shape.d_y, shape.d_b);
  return {local_dim, random_state(shared_layout(local_dim), rng), std::move(alice), std::move(bob)};
}

struct SeesawRun {
  QuantumStrategy strategy;
  std::vector<double> history;
  bool converged = false;
};

/// One see-saw run from `start` (its state is replaced in the first sweep).
inline SeesawRun seesaw_run(const BellFunctional& f, QuantumStrategy start, std::size_t max_iters, double tolerance = 1e-10) {
  const detail::Sweeper sw{f, start.local_dim};
  SeesawRun run{std::move(start), {}, false};
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iters; ++it) {
    sw.update_state(run.strategy);
    sw.update_alice(run.strategy);
    sw.update_bob(run.strategy);
    const double v = sw.value(run.strategy);
    run.history.push_back(v);
    if (v - prev < tolerance) {
      run.converged = true;
      break;
    }
    prev = v;
  }
  return run;
}

/// Best over `restarts` seeded runs. Restart r draws its initial bases from
/// mt19937_64 seeded with seed_seq{seed, r}; restarts run in parallel and
/// ties go to the lowest restart index.
inline OptResult seesaw_optimize(const BellFunctional& f, const SeesawOptions& opt = {}) {
  const std::size_t local_dim = opt.local_dim ? opt.local_dim : f.shape().d_a;
  if (local_dim < 2) throw InvalidArgument("seesaw needs local_dim >= 2");
  if (opt.restarts == 0) throw InvalidArgument("seesaw needs at least one restart");
  std::vector<std::optional<SeesawRun>> runs(opt.restarts);
  const std::size_t workers = opt.workers ? opt.workers : thread_cap();
  parallel_chunks(opt.restarts, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(opt.seed & 0xffffffffu), static_cast<std::uint32_t>(opt.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      runs[r] = seesaw_run(f, random_strategy(f.shape(), local_dim, rng), opt.max_iters, opt.tolerance);
    }
  });
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double v = eval(f, strategy_box(runs[r]->strategy));
    if (v > best_value) {
      best_value = v;
      best = r;
    }
  }
  auto& win = *runs[best];
  OptResult res{best_value, std::move(win.strategy), win.history.size(), opt.restarts, win.converged, std::move(win.history)};
  return res;
}

/// Realizes a strategy as a product dilation: each setting's PVM becomes a
/// coherent measurement of the shared register into the output register.
inline DilationResult dilate_strategy(const QuantumStrategy& q) {
  std::vector<UnitaryOp> alice_ops, bob_ops;
  const Register sa{"SA", q.local_dim, Party::Alice}, sb{"SB", q.local_dim, Party::Bob};
  for (const auto& m : q.alice)
    alice_ops.push_back(coherent_measurement({"A", m.outcomes(), Party::Alice}, sa, m.basis.adjoint(), m.labels()));
  for (const auto& m : q.bob)
    bob_ops.push_back(coherent_measurement({"B", m.outcomes(), Party::Bob}, sb, m.basis.adjoint(), m.labels()));
  StateVector shared(RegisterLayout{sa, sb}, q.state.amplitudes());
  return dilate_local(shared, alice_ops, bob_ops);
}

}  // namespace boxlab
