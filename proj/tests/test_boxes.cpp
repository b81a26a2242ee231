#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "boxlab/boxes.hpp"
#include "boxlab/lhv.hpp"
#include "test_util.hpp"

using namespace boxlab;

TEST_CASE("pr_box", "[boxes]") {
  const Box pr2 = pr_box(2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) CHECK(pr2(a, b, x, y) == (((a ^ b) == (x & y)) ? 0.5 : 0.0));
  CHECK(pr_box(3)(2, 0, 1, 2) == 1.0 / 3.0);
  CHECK(pr_box(3)(0, 0, 1, 2) == 0.0);
  CHECK_THROWS_AS(pr_box(1), InvalidArgument);
  CHECK_THROWS_AS(pr_box(0), InvalidArgument);
}

TEST_CASE("uniform_box", "[boxes]") {
  const Box u = uniform_box(2);
  for (double p : u.probs()) CHECK(p == 0.25);
  CHECK(eval(bell_bd(2), uniform_box(2)) == Catch::Approx(0.5).margin(1e-15));
  CHECK(eval(bell_bd(3), uniform_box(3)) == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("box validation", "[boxes]") {
  const auto s = BoxShape::square(2);
  std::vector<double> p(s.size(), 0.25);
  CHECK_NOTHROW(Box(s, p));
  p[0] = -0.01;
  p[1] = 0.26;
  CHECK_THROWS_AS(Box(s, p), InvalidArgument);
  p[0] = 0.3;
  p[1] = 0.25;
  CHECK_THROWS_AS(Box(s, p), InvalidArgument);
  CHECK_THROWS_AS(Box(s, std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST_CASE("mix", "[boxes]") {
  const Box p = pr_box(3), q = uniform_box(3);
  CHECK(mix(p, q, 1.0).max_abs_diff(p) == 0.0);
  CHECK(mix(p, q, 0.0).max_abs_diff(q) == 0.0);
  CHECK_THROWS_AS(mix(p, q, 1.5), InvalidArgument);
  CHECK_THROWS_AS(mix(p, q, -0.1), InvalidArgument);
  CHECK_THROWS_AS(mix(p, pr_box(2), 0.5), InvalidArgument);
  // linearity of eval
  CHECK(eval(bell_bd(3), mix(p, q, 0.5)) == Catch::Approx(0.5 + 0.5 / 3.0).margin(1e-15));
}

TEST_CASE("no-signalling report", "[boxes]") {
  for (std::size_t d : {2u, 3u, 4u}) {
    const auto r = no_signalling_report(pr_box(d));
    CHECK(r.is_ns);
    CHECK(r.max_violation <= 1e-15);
  }
  // Bob's marginal depends on x: b = x deterministically
  const auto s = BoxShape::square(2);
  std::vector<double> p(s.size(), 0.0);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) p[s.offset(0, x, x, y)] = 1.0;
  const auto r = no_signalling_report(Box(s, p));
  CHECK_FALSE(r.is_ns);
  CHECK(r.max_violation == 1.0);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Box a = testing::random_local_box(BoxShape::square(3), rng);
    const Box m = mix(a, pr_box(3), 0.3);
    CHECK(no_signalling_report(m, 1e-12).is_ns);
  }
}

TEST_CASE("bell_bd and eval", "[boxes]") {
  CHECK(eval(bell_bd(2), pr_box(2)) == Catch::Approx(1.0).margin(1e-15));
  CHECK(eval(bell_bd(3), pr_box(3)) == Catch::Approx(1.0).margin(1e-15));
  CHECK(eval(bell_bd(2), uniform_box(2)) == Catch::Approx(0.5).margin(1e-15));
  // a(x) = b(y) = 0: satisfied exactly when xy = 0 mod 3, i.e. 5 of the 9 pairs
  const DeterministicStrategy zero{3, 3, {0, 0, 0}, {0, 0, 0}};
  CHECK(eval(bell_bd(3), strategy_box(zero)) == Catch::Approx(5.0 / 9.0).margin(1e-15));
  CHECK_THROWS_AS(bell_bd(1), InvalidArgument);
  CHECK_THROWS_AS(eval(bell_bd(2), pr_box(3)), InvalidArgument);
}

TEST_CASE("chsh_value", "[boxes]") {
  CHECK(chsh_value(pr_box(2)) == Catch::Approx(4.0).margin(1e-14));
  CHECK(chsh_value(uniform_box(2)) == Catch::Approx(0.0).margin(1e-14));
  const double v = 1.0 / std::sqrt(2.0);
  CHECK(chsh_value(mix(pr_box(2), uniform_box(2), v)) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
  CHECK_THROWS_AS(chsh_value(pr_box(3)), InvalidArgument);
}

TEST_CASE("branch weights", "[boxes]") {
  for (std::size_t d : {2u, 3u, 5u}) {
    const auto wp = branch_weights(pr_box(d));
    const auto wu = branch_weights(uniform_box(d));
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) {
          CHECK(wp(k, x, y) == Catch::Approx(k == 0 ? 1.0 : 0.0).margin(1e-15));
          CHECK(wu(k, x, y) == Catch::Approx(1.0 / static_cast<double>(d)).margin(1e-15));
        }
  }
  for (double v : {0.0, 0.3, 0.9}) {
    const auto w = branch_weights(mix(pr_box(2), uniform_box(2), v));
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) {
        CHECK(w(0, x, y) == Catch::Approx((1 + v) / 2).margin(1e-15));
        CHECK(w(1, x, y) == Catch::Approx((1 - v) / 2).margin(1e-15));
      }
  }
}

TEST_CASE("branch weights sum to one per setting pair", "[boxes][property]") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 30; ++i) {
    const std::size_t d = 2 + rng() % 3;
    const auto w = branch_weights(testing::random_box(BoxShape::square(d), rng));
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += w(k, x, y);
        CHECK(std::abs(s - 1.0) < 1e-12);
      }
  }
}
