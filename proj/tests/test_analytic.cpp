#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "tracekit/analytic.hpp"

using namespace tracekit;
using std::numbers::pi;

namespace {
SignedSeq seq(std::initializer_list<int> vals) {
  std::vector<std::int8_t> v;
  for (int x : vals) v.push_back(static_cast<std::int8_t>(x));
  return SignedSeq(std::move(v));
}
}  // namespace

TEST_CASE("eval_poly basics", "[analytic]") {
  REQUIRE(eval_poly(seq({1}), Complex(3.0, -2.0)) == Complex(1.0, 0.0));

  // monomial z^(n-1) keeps modulus 1 on the circle
  std::vector<std::int8_t> mono(9, 0);
  mono.back() = 1;
  const Complex z = std::polar(1.0, 0.7);
  REQUIRE_THAT(std::abs(eval_poly(SignedSeq(mono), z)), Catch::Matchers::WithinAbs(1.0, 1e-14));

  // |1 - e^(i pi/L)| = 2 sin(pi/(2L))
  const double L = 5.0;
  const Complex at = eval_poly(seq({1, -1}), std::polar(1.0, pi / L));
  REQUIRE_THAT(std::abs(at), Catch::Matchers::WithinAbs(2.0 * std::sin(pi / (2 * L)), 1e-14));

  REQUIRE_THROWS_AS(eval_poly(std::vector<double>{}, Complex(0, 0)), std::invalid_argument);
  REQUIRE_THROWS_AS(eval_poly(seq({1}), Complex(std::nan(""), 0)), std::invalid_argument);
}

TEST_CASE("eval_poly is linear", "[analytic]") {
  Rng rng(900);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 40;
    std::vector<double> a(n), b(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.next_double() * 2 - 1;
      b[i] = rng.next_double() * 2 - 1;
      ab[i] = a[i] + b[i];
    }
    const Complex z = std::polar(0.2 + rng.next_double(), 2 * pi * rng.next_double());
    const Complex lhs = eval_poly(ab, z);
    const Complex rhs = eval_poly(a, z) + eval_poly(b, z);
    REQUIRE(std::abs(lhs - rhs) < 8.0 * static_cast<double>(n) * 2.3e-16 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("arc points cover [-pi/L, pi/L] uniformly", "[analytic]") {
  const auto two = arc_points(ArcSpec{3.0, 2});
  REQUIRE(two.size() == 2);
  REQUIRE_THAT(std::arg(two[0]), Catch::Matchers::WithinAbs(-pi / 3, 1e-15));
  REQUIRE_THAT(std::arg(two[1]), Catch::Matchers::WithinAbs(pi / 3, 1e-15));

  const auto five = arc_points(ArcSpec{2.0, 5});
  const double want[] = {-pi / 2, -pi / 4, 0.0, pi / 4, pi / 2};
  for (int i = 0; i < 5; ++i)
    REQUIRE_THAT(std::arg(five[i]), Catch::Matchers::WithinAbs(want[i], 1e-15));
  // odd count hits theta = 0 exactly
  REQUIRE(five[2] == Complex(1.0, 0.0));

  for (const auto& z : arc_points(ArcSpec{1.5, 101}))
    REQUIRE_THAT(std::abs(z), Catch::Matchers::WithinAbs(1.0, 4.5e-16));

  REQUIRE_THROWS_AS(arc_points(ArcSpec{0.5, 10}), std::invalid_argument);
  REQUIRE_THROWS_AS(arc_points(ArcSpec{2.0, 1}), std::invalid_argument);
}

TEST_CASE("arc_max finds the grid maximizer", "[analytic]") {
  const auto flat = arc_max(seq({1}), ArcSpec{2.0, 64});
  REQUIRE(flat.value == 1.0);

  // |1 - z| grows with |theta|, so the max sits at an arc endpoint
  const auto m = arc_max(seq({1, -1}), ArcSpec{4.0, 4097});
  REQUIRE_THAT(m.value, Catch::Matchers::WithinAbs(2.0 * std::sin(pi / 8), 1e-12));
  REQUIRE_THAT(std::abs(std::arg(m.z_star)), Catch::Matchers::WithinAbs(pi / 4, 1e-12));

  REQUIRE_THROWS_AS(arc_max(seq({0, 0}), ArcSpec{2.0, 16}), std::invalid_argument);
}

TEST_CASE("deletion moebius map fixes 1 and kills q", "[analytic]") {
  REQUIRE(deletion_moebius(Complex(1, 0), 0.3) == Complex(1, 0));
  REQUIRE(deletion_moebius(Complex(0.3, 0), 0.3) == Complex(0, 0));
  REQUIRE_THROWS_AS(deletion_moebius(Complex(1, 0), 1.0), std::invalid_argument);

  // |w|^2 = (1 + q^2 - 2 q cos theta) / p^2 on the unit circle
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double q = 0.05 + 0.9 * rng.next_double();
    const double theta = (2 * rng.next_double() - 1) * pi;
    const double p = 1 - q;
    const Complex w = deletion_moebius(std::polar(1.0, theta), q);
    const double want = (1 + q * q - 2 * q * std::cos(theta)) / (p * p);
    REQUIRE_THAT(std::norm(w), Catch::Matchers::WithinRel(want, 1e-12));
  }
}

TEST_CASE("deletion moebius modulus bound 1 + q theta^2 / p^2", "[analytic]") {
  for (double q : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    const double p = 1 - q;
    for (int i = 0; i < 1000; ++i) {
      const double theta = pi / 1000 + (pi - pi / 1000) * i / 999.0;
      const Complex w = deletion_moebius(std::polar(1.0, theta), q);
      REQUIRE(std::norm(w) <= 1.0 + q * theta * theta / (p * p));
      REQUIRE(std::norm(w) >= 1.0);  // inverse maps push outward
    }
  }
}

TEST_CASE("arc image stays below exp(C1/L^2) with C1 = q pi^2 / (2 p^2)", "[analytic]") {
  for (double q : {0.1, 0.5, 0.8}) {
    const double p = 1 - q;
    const double C1 = q * pi * pi / (2 * p * p);
    for (double L : {2.0, 3.0, 5.0, 10.0}) {
      for (const Complex z : arc_points(ArcSpec{L, 257})) {
        const Complex w = deletion_moebius(z, q);
        REQUIRE(std::abs(w) <= std::exp(C1 / (L * L)) + 1e-12);
      }
    }
  }
}

TEST_CASE("insertion moebius fixes 0 and 1 and inverts the forward map", "[analytic]") {
  REQUIRE(insertion_moebius(Complex(0, 0), 0.4) == Complex(0, 0));
  REQUIRE_THAT(std::abs(insertion_moebius(Complex(1, 0), 0.3) - Complex(1, 0)),
               Catch::Matchers::WithinAbs(0.0, 1e-15));
  // pole at zeta = -alpha/beta
  REQUIRE_THROWS_AS(insertion_moebius(Complex(-1.0, 0.0), 0.5), std::domain_error);

  Rng rng(77);
  const double beta = 0.35, alpha = 0.65;
  for (int i = 0; i < 100; ++i) {
    const Complex w = std::polar(rng.next_double(), 2 * pi * rng.next_double());
    const Complex zeta = alpha * w / (1.0 - beta * w);
    REQUIRE(std::abs(insertion_moebius(zeta, beta) - w) < 1e-14);
  }
}

TEST_CASE("composed map: fixed point, single-stage identity, inverse pairing", "[analytic]") {
  ChannelSpec all;
  all.deletion_q = 0.4;
  all.substitution_lambda = 0.1;
  all.insertion_beta = 0.3;
  all.stage_order = {Stage::deletion, Stage::substitution, Stage::insertion};

  REQUIRE(std::abs(composed_map(Complex(1, 0), all) - Complex(1, 0)) < 1e-14);
  REQUIRE(std::abs(composed_forward_map(Complex(1, 0), all) - Complex(1, 0)) < 1e-14);

  const auto del = ChannelSpec::deletion_only(0.25);
  for (int i = 0; i < 50; ++i) {
    const Complex z = std::polar(1.0, 2 * pi * i / 50.0);
    REQUIRE(composed_map(z, del) == deletion_moebius(z, 0.25));
  }

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Complex z = std::polar(0.9 + 0.2 * rng.next_double(), 2 * pi * rng.next_double());
    const Complex back = composed_forward_map(composed_map(z, all), all);
    REQUIRE(std::abs(back - z) < 1e-12);
  }
}

TEST_CASE("forward composition maps the circle into the closed disc", "[analytic]") {
  ChannelSpec all;
  all.deletion_q = 0.4;
  all.substitution_lambda = 0.1;
  all.insertion_beta = 0.3;
  all.stage_order = {Stage::insertion, Stage::deletion, Stage::substitution};

  for (int i = 1; i <= 1000; ++i) {
    const double theta = pi * i / 1000.0;
    const Complex f = composed_forward_map(std::polar(1.0, theta), all);
    REQUIRE(std::abs(f) <= 1.0 + 1e-12);
    REQUIRE(std::abs(f) < 1.0);  // strictly inside away from theta = 0
    // the inverse composition lands outside, mirroring it
    const Complex g = composed_map(std::polar(1.0, theta), all);
    REQUIRE(std::abs(g) >= 1.0 - 1e-12);
  }
  REQUIRE(std::abs(composed_forward_map(Complex(1, 0), all) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("product of rotations", "[analytic]") {
  const SignedSeq a = seq({1, 0, -1, 1});
  const Complex z = std::polar(1.0, 0.3);
  REQUIRE(product_of_rotations(a, 1, z) == eval_poly(a, z));

  std::vector<std::int8_t> mono(6, 0);
  mono[5] = 1;
  REQUIRE_THAT(std::abs(product_of_rotations(SignedSeq(mono), 4, z)),
               Catch::Matchers::WithinAbs(1.0, 1e-14));

  // F(0) = 1 whenever a_0 = 1
  for (int L : {1, 2, 3, 5}) {
    const Complex f0 = product_of_rotations(seq({1, -1, 0, 1}), L, Complex(0, 0));
    REQUIRE_THAT(std::abs(f0 - Complex(1, 0)), Catch::Matchers::WithinAbs(0.0, 1e-15));
  }
  REQUIRE_THROWS_AS(product_of_rotations(a, 0, z), std::invalid_argument);
}

TEST_CASE("rotation product reaches 1 on the circle when a_0 = 1", "[analytic]") {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 7;
    std::vector<std::int8_t> c(n);
    c[0] = 1;
    for (std::size_t i = 1; i < n; ++i)
      c[i] = static_cast<std::int8_t>(static_cast<int>(rng.next_u64() % 3) - 1);
    const SignedSeq a(std::move(c));
    const int L = 2 + static_cast<int>(rng.next_u64() % 3);
    double best = 0.0;
    for (int i = 0; i < 4096; ++i)
      best = std::max(best,
                      std::abs(product_of_rotations(a, L, std::polar(1.0, 2 * pi * i / 4096.0))));
    REQUIRE(best >= 1.0 - 1e-6);
  }
}

TEST_CASE("trivial sup bound |A| <= n on the circle", "[analytic]") {
  Rng rng(606);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 32;
    std::vector<std::int8_t> c(n);
    for (auto& v : c) v = static_cast<std::int8_t>(static_cast<int>(rng.next_u64() % 3) - 1);
    const Complex z = std::polar(1.0, 2 * pi * rng.next_double());
    REQUIRE(std::abs(eval_poly(SignedSeq(std::move(c)), z)) <= static_cast<double>(n) + 1e-9);
  }
}

TEST_CASE("weak bound report", "[analytic]") {
  const auto r1 = verify_weak_bound(seq({1}), 3, 4096);
  REQUIRE(r1.consistent);
  REQUIRE(r1.max_on_arc == 1.0);
  REQUIRE(r1.bound == 1.0);

  const auto alt = verify_weak_bound(seq({1, -1, 1, -1, 1, -1}), 3, 4096);
  REQUIRE(alt.consistent);
  REQUIRE(alt.max_on_arc > alt.bound);

  REQUIRE_THROWS_AS(verify_weak_bound(seq({0, 0, 0}), 2, 64), std::invalid_argument);
}

TEST_CASE("weak bound holds exhaustively for n <= 4", "[analytic]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::int8_t> c(n, -1);
    const auto total = static_cast<std::uint64_t>(std::pow(3.0, static_cast<double>(n)));
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      bool nonzero = false;
      for (auto v : c) nonzero = nonzero || v != 0;
      if (nonzero) {
        for (int L : {2, 3, 4}) {
          const auto r = verify_weak_bound(SignedSeq(c), L, 4096);
          INFO("n=" << n << " L=" << L);
          REQUIRE(r.consistent);
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (++c[k] <= 1) break;
        c[k] = -1;
      }
    }
  }
}
