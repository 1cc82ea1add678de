#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "zeroinv/errors.hpp"
#include "zeroinv/potential_io.hpp"
#include "zeroinv/potentials.hpp"

using namespace zeroinv;

TEST_CASE("step potential takes right limits and vanishes beyond the support") {
  const auto p = Potential::two_step_example();
  CHECK(p(0.0) == -2.0);
  CHECK(p(1.999) == -2.0);
  CHECK(p(2.0) == -1.0);
  CHECK(p(3.0) == 0.0);
  CHECK(p(100.0) == 0.0);
  const auto* pc = p.get_if<PiecewiseConstantPotential>();
  REQUIRE(pc);
  CHECK(pc->left_limit(2.0) == -2.0);
  CHECK(pc->left_limit(3.0) == -1.0);
  const auto segs = pc->segments();
  REQUIRE(segs.size() == 3);
  CHECK(segs.back().value == 0.0);
  CHECK(std::isinf(segs.back().end));
  CHECK(p.discontinuities().size() == 2);
  CHECK(p.support_radius() == 3.0);
  CHECK(p.lower_bound() == -2.0);
  CHECK(p.upper_bound() == 0.0);
}

TEST_CASE("malformed step potentials are rejected") {
  CHECK_THROWS_AS(Potential::piecewise({2.0, 1.0}, {-1.0, -2.0}), InputError);
  CHECK_THROWS_AS(Potential::piecewise({1.0}, {-1.0, -2.0}), InputError);
  CHECK_THROWS_AS(Potential::piecewise({0.0}, {-1.0}), InputError);
  CHECK_THROWS_AS(Potential::piecewise({1.0}, {std::nan("")}), InputError);
  CHECK_THROWS_AS(Potential::zero()(-1.0), InputError);
}

TEST_CASE("one-bound-state profile equals -2 (ln W)'' by finite differences") {
  const double gamma = std::sqrt(10.0), c = 1.0;
  auto lnW = [&](long double r) {
    const long double x = gamma * r;
    return std::log(1.0L + c * (std::sinh(2.0L * x) / 4.0L - x / 2.0L));
  };
  for (double r : {0.05, 0.3, 0.7, 1.5, 3.0}) {
    const long double h = 1e-4L;
    const long double d2 = (lnW(r + h) - 2.0L * lnW(r) + lnW(r - h)) / (h * h);
    const double expect = static_cast<double>(-2.0L * d2);
    CHECK(bargmann_profile(gamma, c, r) == doctest::Approx(expect).epsilon(1e-6));
  }
  // V(0) = -2 c gamma^2 ... from W ~ 1 + c gamma^3 r^3 / 3: V ~ -4 c gamma^3 r near 0
  CHECK(bargmann_profile(gamma, c, 1e-6) == doctest::Approx(-4.0 * c * std::pow(gamma, 3) * 1e-6).epsilon(1e-4));
  // far tail: W ~ c e^{2x}/8, V ~ -8 gamma^2 e^{-2x} (1 + O(x e^{-2x}))
  const double r = 12.0;
  CHECK(bargmann_profile(gamma, c, r) ==
        doctest::Approx(-8.0 * gamma * gamma * std::exp(-2.0 * gamma * r)).epsilon(1e-9));
  CHECK(std::isfinite(bargmann_profile(gamma, c, 500.0)));
}

TEST_CASE("exponential potential and integrability") {
  const auto p = Potential::exponential(-0.5, 1.0);
  CHECK(p(0.0) == -0.5);
  CHECK(p(2.0) == doctest::Approx(-0.5 * std::exp(-2.0)));
  const auto rep = check_integrability(p, 1.0, 40.0);
  CHECK(rep.both_finite);
  // int_0^1 r e^{-r}/2 = (1 - 2/e)/2, int_1^inf e^{-r}/2 = 1/(2e)
  CHECK(rep.near_origin_integral == doctest::Approx(0.5 * (1.0 - 2.0 / std::exp(1.0))).epsilon(1e-8));
  CHECK(rep.tail_integral == doctest::Approx(0.5 / std::exp(1.0)).epsilon(1e-6));
}

TEST_CASE("potential files round-trip") {
  for (const auto& p : {Potential::two_step_example(), Potential::exponential(-0.3, 1.7),
                        Potential::bargmann(std::sqrt(10.0)), Potential::zero()}) {
    const Potential q = parse_potential(format_potential(p));
    CHECK(q.kind() == p.kind());
    for (double r : {0.1, 1.0, 2.5, 4.0}) CHECK(q(r) == p(r));
  }
  const auto b = parse_potential("type=bargmann\ngamma2=10\n");
  CHECK(b.get_if<BargmannOneBoundPotential>()->bound_energy() == doctest::Approx(-10.0));
  const auto c = parse_potential("# comment\ntype=piecewise\nbreakpoints=2,3\nvalues=-2,-1\n");
  CHECK(c(2.5) == -1.0);
}

TEST_CASE("bad potential text is an input error") {
  CHECK_THROWS_AS(parse_potential("breakpoints=1\nvalues=1\n"), InputError);
  CHECK_THROWS_AS(parse_potential("type=piecewise\nbreakpoints=1\n"), InputError);
  CHECK_THROWS_AS(parse_potential("type=piecewise\nbreakpoints=1,x\nvalues=1,2\n"), InputError);
  CHECK_THROWS_AS(parse_potential("type=wobbly\n"), InputError);
  CHECK_THROWS_AS(parse_potential("type=bargmann\ngamma2=-1\n"), InputError);
  CHECK_THROWS_AS(read_potential_file("/nonexistent/file"), InputError);
  CHECK_THROWS_AS(parse_number("1,5"), InputError);
}

TEST_CASE("17 significant digits survive a text round trip") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(u(gen) * 30));
    CHECK(parse_number(format_number(x)) == x);
  }
  CHECK(parse_number(format_number(0.1)) == 0.1);
  CHECK(format_number(2.0) == "2");
}
