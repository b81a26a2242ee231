#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "boxlab/protocol.hpp"
#include "test_util.hpp"

using namespace boxlab;

namespace {

void check_columns_are_distributions(const ProtocolTranscript& t) {
  for (std::size_t x = 0; x < t.d; ++x) {
    double s = 0.0;
    for (std::size_t z = 0; z < t.d; ++z) {
      CHECK(t.p_z_given_x[z][x] >= 0.0);
      s += t.p_z_given_x[z][x];
    }
    CHECK(std::abs(s - 1.0) <= 1e-10);
  }
  CHECK(t.capacity_bits >= 0.0);
  CHECK(t.capacity_bits <= std::log2(static_cast<double>(t.d)) + 1e-15);
}

UnitaryOp swap_across_parties() {
  RegisterLayout l{{"P", 2, Party::Alice}, {"Q", 2, Party::Bob}};
  Matrix m = Matrix::Zero(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) m(static_cast<Eigen::Index>(j * 2 + i), static_cast<Eigen::Index>(i * 2 + j)) = 1.0;
  return UnitaryOp(l, m);
}

}  // namespace

TEST_CASE("phase operator", "[protocol]") {
  const auto dr = dilate_pr(2);
  const auto ph = phase_op(dr);
  CHECK(detail::identity_deviation(ph.matrix().adjoint() * ph.matrix()) <= 1e-15);
  const auto& l = ph.layout();
  for (std::size_t i = 0; i < l.total_dim(); ++i) {
    const auto g = l.digits(i);
    const double sign = ((g[2] + g[3]) % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(ph.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - sign) <= 1e-15);
  }
  // diagonal operators commute with it
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  Matrix diag = Matrix::Zero(64, 64);
  for (Eigen::Index i = 0; i < 64; ++i) diag(i, i) = std::polar(1.0, u(rng));
  CHECK((diag * ph.matrix() - ph.matrix() * diag).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("copy operator", "[protocol]") {
  const auto dr = dilate_pr(3);
  const auto c = copy_op(dr);
  const auto& l = c.layout();
  CHECK(l[0].name == "Xc");
  CHECK(l[0].party == Party::Alice);
  CHECK(l[2].name == "Yc");
  CHECK(l[2].party == Party::Bob);
  for (std::size_t x = 0; x < 3; ++x) {
    const auto out = apply(c, StateVector::basis(l, {0, x, 0, 0}));
    CHECK(std::abs(out[l.index({x, x, 0, 0})] - 1.0) <= 1e-15);
    // twice: 2x mod 3 in the copy register, not the identity
    const auto twice = apply(c, out);
    CHECK(std::abs(twice[l.index({(2 * x) % 3, x, 0, 0})] - 1.0) <= 1e-15);
  }
  std::mt19937_64 rng(6);
  const auto s = random_state(l, rng);
  CHECK(std::abs(apply(c, s).amplitudes().norm() - 1.0) <= 1e-12);
  CHECK((apply(adjoint(c), apply(c, s)).amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("reveal protocol on PR dilations", "[protocol]") {
  for (std::size_t d : {2u, 3u}) {
    const auto t = reveal_protocol(dilate_pr(d));
    check_columns_are_distributions(t);
    for (std::size_t z = 0; z < d; ++z)
      for (std::size_t x = 0; x < d; ++x) CHECK(std::abs(t.p_z_given_x[z][x] - (z == x ? 1.0 : 0.0)) <= 1e-10);
    CHECK(std::abs(t.capacity_bits - std::log2(static_cast<double>(d))) <= 1e-9);
    CHECK(std::abs(t.entanglement_gain() - std::log2(static_cast<double>(d))) <= 1e-9);
    CHECK(t.with_copy);
  }
  CHECK(std::abs(reveal_protocol(dilate_pr(3)).capacity_bits - 1.584962500721156) <= 1e-9);
}

TEST_CASE("copies do not change the PR transcript", "[protocol]") {
  const auto dr = dilate_pr(2);
  const auto a = reveal_protocol(dr, true), b = reveal_protocol(dr, false);
  CHECK_FALSE(b.with_copy);
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t x = 0; x < 2; ++x) CHECK(std::abs(a.p_z_given_x[z][x] - b.p_z_given_x[z][x]) <= 1e-12);
  CHECK(std::abs(a.capacity_bits - b.capacity_bits) <= 1e-12);
  CHECK(std::abs(a.entanglement_after_ebits - b.entanglement_after_ebits) <= 1e-12);
}

TEST_CASE("PR chain returns each input up to the phase exp(2 pi i xy/d)", "[protocol]") {
  for (std::size_t d : {2u, 3u}) {
    const auto dr = dilate_pr(d);
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) {
        const auto in = initial_state(dr, x, y);
        const auto out = run_chain(dr, detail::basis_amplitudes(d, x), detail::basis_amplitudes(d, y), false);
        const cplx ov = in.amplitudes().dot(out.amplitudes());
        CHECK(std::abs(std::abs(ov) - 1.0) <= 1e-10);
        const cplx expect = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((x * y) % d) / static_cast<double>(d));
        CHECK(std::abs(ov - expect) <= 1e-10);
      }
  }
}

TEST_CASE("local dilations do not signal", "[protocol][property]") {
  std::mt19937_64 rng(555);
  for (std::size_t d : {2u, 3u}) {
    for (int i = 0; i < 4; ++i) {
      const auto dr = testing::random_local_dilation(d, rng);
      for (bool copy : {true, false}) {
        const auto t = reveal_protocol(dr, copy);
        check_columns_are_distributions(t);
        for (std::size_t z = 0; z < d; ++z)
          for (std::size_t x = 1; x < d; ++x) CHECK(std::abs(t.p_z_given_x[z][x] - t.p_z_given_x[z][0]) <= 1e-9);
        CHECK(t.capacity_bits <= 1e-8);
        CHECK(std::abs(t.entanglement_gain()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("capacity grows with visibility", "[protocol][property]") {
  double prev = -1.0;
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    const auto t = reveal_protocol(dilate_generic(mix(pr_box(2), uniform_box(2), v)));
    check_columns_are_distributions(t);
    CHECK(t.capacity_bits >= prev - 1e-12);
    prev = t.capacity_bits;
  }
  CHECK(prev > 0.0);
}

TEST_CASE("product test", "[protocol]") {
  std::mt19937_64 rng(10);
  SECTION("local unitaries") {
    for (int i = 0; i < 10; ++i) {
      const auto ua = random_unitary(RegisterLayout{{"P", 2, Party::Alice}, {"R", 3, Party::Alice}}, rng);
      const auto ub = random_unitary(RegisterLayout{{"Q", 3, Party::Bob}}, rng);
      const auto r = product_test(tensor(ua, ub));
      CHECK(r.is_product);
      CHECK(r.choi_entanglement_ebits <= 1e-10);
    }
  }
  SECTION("swap") {
    const auto r = product_test(swap_across_parties());
    CHECK_FALSE(r.is_product);
    CHECK(std::abs(r.choi_entanglement_ebits - 2.0) <= 1e-10);
  }
  SECTION("PR dilation") {
    const auto r = product_test(dilate_pr(2).u);
    CHECK_FALSE(r.is_product);
    CHECK(r.choi_entanglement_ebits > 0.5);
  }
  SECTION("single-party layouts are rejected") {
    CHECK_THROWS_AS(product_test(UnitaryOp::identity(RegisterLayout{{"P", 2, Party::Alice}})), InvalidArgument);
  }
}

TEST_CASE("products never reveal", "[protocol][property]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    const auto dr = testing::random_local_dilation(2, rng);
    if (product_test(dr.u).is_product) {
      const auto t = reveal_protocol(dr);
      CHECK(t.capacity_bits <= 1e-8);
      CHECK(t.entanglement_gain() <= 1e-9);
    }
  }
}

TEST_CASE("mutual information", "[protocol]") {
  CHECK(mutual_information_bits({{1.0, 0.0}, {0.0, 1.0}}) == Catch::Approx(1.0).margin(1e-15));
  CHECK(mutual_information_bits({{0.5, 0.5}, {0.5, 0.5}}) == 0.0);
  // binary symmetric channel, flip 0.1
  const double h = -(0.1 * std::log2(0.1) + 0.9 * std::log2(0.9));
  CHECK(mutual_information_bits({{0.9, 0.1}, {0.1, 0.9}}) == Catch::Approx(1.0 - h).margin(1e-14));
}

TEST_CASE("non-square boxes are rejected by the protocol", "[protocol]") {
  std::mt19937_64 rng(1);
  const auto dr = dilate_generic(testing::random_box(BoxShape{2, 2, 3, 3}, rng));
  CHECK_THROWS_AS(reveal_protocol(dr), InvalidArgument);
  CHECK_THROWS_AS(entanglement_generated(dr), InvalidArgument);
}
