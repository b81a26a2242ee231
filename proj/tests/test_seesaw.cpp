#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "boxlab/lhv.hpp"
#include "boxlab/protocol.hpp"
#include "boxlab/seesaw.hpp"
#include "boxlab/tsirelson.hpp"

using namespace boxlab;

namespace {

Measurement computational(std::size_t dim, std::size_t outcomes) {
  return {Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)), detail::default_ranks(dim, outcomes)};
}

}  // namespace

TEST_CASE("strategy box from computational measurements", "[seesaw]") {
  QuantumStrategy q{3, StateVector::basis(shared_layout(3), {1, 2}), {}, {}};
  for (int i = 0; i < 3; ++i) {
    q.alice.push_back(computational(3, 3));
    q.bob.push_back(computational(3, 3));
  }
  const Box b = strategy_box(q);
  CHECK(b.max_abs_diff(strategy_box(DeterministicStrategy{3, 3, {1, 1, 1}, {2, 2, 2}})) <= 1e-15);
}

TEST_CASE("measurements are validated", "[seesaw]") {
  QuantumStrategy q{2, StateVector::basis(shared_layout(2), {0, 0}), {computational(2, 2)}, {computational(2, 2)}};
  CHECK_NOTHROW(strategy_box(q));
  q.alice[0].basis(0, 1) = 0.5;
  CHECK_THROWS_AS(strategy_box(q), InvalidArgument);
  q.alice[0] = {Matrix::Identity(2, 2), {1, 2}};
  CHECK_THROWS_AS(strategy_box(q), InvalidArgument);
}

TEST_CASE("random strategies give valid no-signalling boxes", "[seesaw][property]") {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 30; ++i) {
    const std::size_t d = 2 + rng() % 2, dim = 2 + rng() % 3;
    const Box b = strategy_box(random_strategy(BoxShape::square(d), dim, rng));
    CHECK(no_signalling_report(b, 1e-10).is_ns);
  }
}

TEST_CASE("see-saw at d = 2 reaches the Tsirelson value", "[seesaw]") {
  SeesawOptions opt;
  opt.local_dim = 2;
  opt.restarts = 20;
  opt.seed = 42;
  const auto r = seesaw_optimize(bell_bd(2), opt);
  const double target = 0.5 + 0.5 / std::sqrt(2.0);
  CHECK(std::abs(r.best_value - target) <= 1e-6);
  const Box b = strategy_box(r.strategy);
  CHECK(std::abs(eval(bell_bd(2), b) - r.best_value) <= 1e-9);
  CHECK(std::abs(chsh_value(b) - 2.0 * std::sqrt(2.0)) <= 1e-5);
  CHECK_FALSE(chsh_bound_check(b).violated);
  CHECK(no_signalling_report(b, 1e-10).is_ns);
  CHECK(r.restarts_used == 20);

  // history never decreases
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1] - 1e-12);

  // the strategy realized as a product dilation gives the same box and does not signal
  const auto dr = dilate_strategy(r.strategy);
  CHECK(extract_box(dr).max_abs_diff(b) <= 1e-10);
  CHECK(product_test(dr.u).is_product);
  CHECK(reveal_protocol(dr).capacity_bits <= 1e-8);
}

TEST_CASE("see-saw is reproducible", "[seesaw]") {
  SeesawOptions opt;
  opt.restarts = 6;
  opt.seed = 7;
  opt.workers = 1;
  const auto a = seesaw_optimize(bell_bd(2), opt);
  opt.workers = 3;
  const auto b = seesaw_optimize(bell_bd(2), opt);
  CHECK(a.best_value == b.best_value);
  CHECK(a.strategy.state.amplitudes() == b.strategy.state.amplitudes());
  CHECK(a.history == b.history);
}

TEST_CASE("see-saw at d = 3 stays between the classical value and the bound", "[seesaw]") {
  SeesawOptions opt;
  opt.local_dim = 3;
  opt.restarts = 10;
  opt.seed = 1;
  const auto r = seesaw_optimize(bell_bd(3), opt);
  CHECK(r.best_value > 2.0 / 3.0);
  CHECK(r.best_value <= b3_bound() + 1e-8);
  CHECK(no_signalling_report(strategy_box(r.strategy), 1e-10).is_ns);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1] - 1e-12);
}

TEST_CASE("see-saw with room for classical strategies is at least classical", "[seesaw][property]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 5; ++i) {
    const BoxShape s = BoxShape::square(2);
    std::vector<double> c(s.size());
    for (auto& v : c) v = g(rng);
    const BellFunctional f(s, c);
    SeesawOptions opt;
    opt.local_dim = 2;
    opt.restarts = 10;
    opt.seed = static_cast<std::uint64_t>(i);
    CHECK(seesaw_optimize(f, opt).best_value >= classical_max(f).value - 1e-9);
  }
}

TEST_CASE("see-saw argument checks", "[seesaw]") {
  SeesawOptions opt;
  opt.local_dim = 1;
  CHECK_THROWS_AS(seesaw_optimize(bell_bd(2), opt), InvalidArgument);
  opt.local_dim = 2;
  opt.restarts = 0;
  CHECK_THROWS_AS(seesaw_optimize(bell_bd(2), opt), InvalidArgument);
}
