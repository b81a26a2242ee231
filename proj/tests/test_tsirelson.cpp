#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "boxlab/tsirelson.hpp"
#include "test_util.hpp"

using namespace boxlab;
using Catch::Approx;

TEST_CASE("c1 and c2 on reference boxes", "[tsirelson]") {
  CHECK(c1_lhs(pr_box(2)) == Approx(2.0).margin(1e-14));
  CHECK(c2_lhs(pr_box(2)) == Approx(2.0).margin(1e-14));
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    CHECK(c1_lhs(uniform_box(d)) == Approx(0.0).margin(1e-14));
    CHECK(c2_lhs(uniform_box(d)) == Approx(0.0).margin(1e-14));
    CHECK(c1_lhs(pr_box(d)) == Approx(static_cast<double>(d)).margin(1e-13));
  }
  for (double v = 0.0; v <= 1.0; v += 0.125) CHECK(c1_lhs(mix(pr_box(2), uniform_box(2), v)) == Approx(2.0 * v).margin(1e-14));
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(c1_lhs(testing::random_box(BoxShape{2, 2, 3, 3}, rng)), InvalidArgument);
}

TEST_CASE("c2 at d = 2 is the CHSH expression", "[tsirelson][property]") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Box b = testing::random_box(BoxShape::square(2), rng);
    const auto w = branch_weights(b);
    double chsh_form = 0.0;
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) chsh_form += w(0, x, y) - w(1, x, y);
    CHECK(c4_sum(b) == Approx(chsh_form).margin(1e-12));
    CHECK(chsh_bound_check(b).value == Approx(chsh_value(b)).margin(1e-12));
  }
}

TEST_CASE("bound chain ordering", "[tsirelson][property]") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 2 + rng() % 3;
    const Box b = testing::random_box(BoxShape::square(d), rng);
    CHECK(c2_lhs(b) <= c1_lhs(b) + 1e-12);
  }
}

TEST_CASE("d = 3 elimination identity", "[tsirelson][property]") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Box b = testing::random_box(BoxShape::square(3), rng);
    const double b3 = eval(bell_bd(3), b);
    CHECK(std::abs(c4_sum(b) - (13.5 * b3 - 4.5)) <= 1e-10);
    CHECK(std::abs(c2_lhs(b) - (4.5 * b3 - 1.5)) <= 1e-10);
  }
}

TEST_CASE("CHSH bound check", "[tsirelson]") {
  const auto pr = chsh_bound_check(pr_box(2));
  CHECK(pr.value == Approx(4.0).margin(1e-14));
  CHECK(pr.violated);
  const auto cl = chsh_bound_check(strategy_box(classical_max(bell_bd(2)).witness));
  CHECK(cl.value == Approx(2.0).margin(1e-14));
  CHECK_FALSE(cl.violated);
  CHECK(pr.bound == 2.0 * std::sqrt(2.0));
  CHECK_THROWS_AS(chsh_bound_check(pr_box(3)), InvalidArgument);
}

TEST_CASE("d = 3 bound", "[tsirelson]") {
  CHECK(b3_bound() == Approx(0.7182335127930839).margin(1e-15));
  CHECK(std::round(b3_bound() * 1e4) / 1e4 == 0.7182);
  const auto pr = b3_check(pr_box(3));
  CHECK(pr.value == Approx(1.0).margin(1e-15));
  CHECK(pr.violated);
  const auto cl = b3_check(strategy_box(classical_max(bell_bd(3)).witness));
  CHECK(cl.value == Approx(2.0 / 3.0).margin(1e-15));
  CHECK_FALSE(cl.violated);
  CHECK_THROWS_AS(b3_check(pr_box(2)), InvalidArgument);
}

TEST_CASE("critical visibility", "[tsirelson]") {
  const double v2 = critical_visibility(2), v3 = critical_visibility(3);
  CHECK(std::abs(v2 - 0.7071067811865476) < 1e-9);
  CHECK(std::abs(v3 - 0.5773502691896258) < 1e-9);
  CHECK_FALSE(chsh_bound_check(mix(pr_box(2), uniform_box(2), v2 - 1e-6)).violated);
  CHECK(chsh_bound_check(mix(pr_box(2), uniform_box(2), v2 + 1e-6)).violated);
  CHECK_FALSE(b3_check(mix(pr_box(3), uniform_box(3), v3 - 1e-6)).violated);
  CHECK(b3_check(mix(pr_box(3), uniform_box(3), v3 + 1e-6)).violated);
  CHECK_THROWS_AS(critical_visibility(4), InvalidArgument);
}

TEST_CASE("bound report", "[tsirelson]") {
  const auto r = bound_report(pr_box(2));
  CHECK(r.d == 2);
  CHECK(r.c1_lhs == Approx(2.0).margin(1e-14));
  CHECK(r.c1_rhs == std::sqrt(2.0));
  CHECK(r.violates_c1);
  CHECK(r.violates_quantum_upper);
  CHECK(r.lhv_max.value() == 0.75);
  CHECK_FALSE(r.exploratory);

  const auto u = bound_report(uniform_box(3));
  CHECK_FALSE(u.violates_c1);
  CHECK_FALSE(u.violates_quantum_upper);
  CHECK(u.lhv_max.value() == 6.0 / 9.0);

  const auto e = bound_report(pr_box(4), 0.625);
  CHECK(e.exploratory);
  CHECK_FALSE(e.quantum_upper.has_value());
  CHECK(e.c1_rhs == 2.0);

  // strategy count too large to enumerate: lhv_max is left empty
  CHECK_FALSE(bound_report(uniform_box(6)).lhv_max.has_value());
}
