#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zeroinv/errors.hpp"
#include "zeroinv/zero_lines.hpp"

using namespace zeroinv;
using std::numbers::pi;

namespace {

std::vector<double> descending(double hi, double lo, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(hi + (lo - hi) * i / (count - 1));
  return g;
}

std::vector<double> ascending(double lo, double hi, double h) {
  std::vector<double> g;
  const int m = static_cast<int>(std::lround((hi - lo) / h));
  for (int i = 0; i <= m; ++i) g.push_back(lo + h * i);
  return g;
}

}  // namespace

TEST_CASE("free lines and their inverse") {
  for (int n = 1; n <= 3; ++n) {
    const auto line = trace_fixed_l(Potential::zero(), n, {}, descending(100.0, 1.0, 80));
    REQUIRE(line.size() == 80);
    for (std::size_t i = 0; i < line.size(); ++i)
      CHECK(line.r[i] == doctest::Approx(n * pi / std::sqrt(line.E[i])).epsilon(1e-12));
    const InverseLine inv(line);
    for (std::size_t i = 0; i < line.size(); ++i)
      CHECK(inv.energy(line.r[i]) == doctest::Approx(n * n * pi * pi / (line.r[i] * line.r[i])).epsilon(1e-12));
    CHECK_THROWS_AS(inv.energy(inv.r_max() * 1.01), RangeError);
  }
}

TEST_CASE("free reference uses the zeros of J_lambda") {
  CHECK(FreeReference(2, {}).j2 == doctest::Approx(4.0 * pi * pi).epsilon(1e-14));
  // first zero of J_{3/2}, i.e. of tan x = x
  CHECK(std::sqrt(FreeReference(1, AngularParameter::from_ell(1)).j2) ==
        doctest::Approx(4.4934094579090641753).epsilon(1e-12));
  const FreeReference ref(1, {});
  CHECK(ref.derivative(2.0, 1) == doctest::Approx(-2.0 * pi * pi / 8.0));
}

TEST_CASE("one-sided derivatives of a free line") {
  const auto line = trace_fixed_l_radius(Potential::zero(), 1, {}, ascending(0.5, 3.0, 0.01));
  const InverseLine inv(line);
  const double c = pi * pi, r = 1.7;
  for (Side s : {Side::left, Side::right}) {
    const auto d = one_sided_derivatives(inv, r, s);
    CHECK(d.d1 == doctest::Approx(-2.0 * c / std::pow(r, 3)).epsilon(1e-8));
    CHECK(d.d2 == doctest::Approx(6.0 * c / std::pow(r, 4)).epsilon(1e-7));
    CHECK(d.d3 == doctest::Approx(-24.0 * c / std::pow(r, 5)).epsilon(1e-6));
  }
}

TEST_CASE("spectral data of the free line") {
  const auto line = trace_fixed_l_radius(Potential::zero(), 2, {}, ascending(1.0, 4.0, 0.01));
  const auto d = spectral_data(line, 2.345);
  CHECK(d.E_star == doctest::Approx(4.0 * pi * pi / (2.345 * 2.345)).epsilon(1e-9));
  // r = 2 pi E^{-1/2}  =>  -dr/dE = pi E^{-3/2}
  CHECK(d.rho == doctest::Approx(pi * std::pow(d.E_star, -1.5)).epsilon(1e-8));
  CHECK(d.rho > 0.0);
}

TEST_CASE("lines of the one-bound-state potential") {
  const auto V = Potential::bargmann(std::sqrt(10.0));
  // n = 1 diverges as E -> -10 from above
  const auto g1 = asymptote_grid(-5.0, -10.0, 1e-3, 40);
  const auto l1 = trace_fixed_l(V, 1, {}, g1);
  REQUIRE(l1.size() == g1.size());
  for (std::size_t i = 1; i < l1.size(); ++i) CHECK(l1.r[i] > l1.r[i - 1]);
  CHECK(l1.r.back() > 2.0 * nth_zero(V, {}, -9.0, 1));
  // n = 2 exists only above 0 once the bound state is below
  const auto l2 = trace_fixed_l(V, 2, {}, descending(20.0, -5.0, 60));
  REQUIRE(l2.truncated_at.has_value());
  CHECK(*l2.truncated_at <= 0.0);
  CHECK(l2.size() < 60);
}

TEST_CASE("mixed line is continuous at the junction") {
  const auto V = Potential::two_step_example();
  const auto line = trace_mixed(V, 1, {}, 4.0, 60.0, 8.0, 80);
  CHECK(line.rE.back() == doctest::Approx(line.r0).epsilon(1e-12));
  CHECK(line.rL.front() == doctest::Approx(line.r0).epsilon(1e-12));
  CHECK(line.lambda.front() == doctest::Approx(0.5));
  for (std::size_t i = 1; i < line.lambda.size(); ++i) {
    CHECK(line.lambda[i] > line.lambda[i - 1]);
    CHECK(line.rL[i] > line.rL[i - 1]);
  }
  const InverseLine inv(line);
  CHECK(inv.mixed());
  CHECK(inv(line.r0 - 1e-3).kind == ParamKind::energy);
  CHECK(inv(line.r0 + 1e-3).kind == ParamKind::lambda);
  CHECK(inv(line.r0 + 1e-3).value == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("mixed trace rejects a junction without a zero") {
  CHECK_THROWS_AS(trace_mixed_radius(Potential::two_step_example(), 1, {}, -0.5, 0.3, 4.0, 0.01),
                  InputError);
}

TEST_CASE("line separation") {
  const auto grid = descending(100.0, 1.0, 50);
  const auto A = Potential::two_step_example();
  CHECK_FALSE(lines_distinguish(A, A, 1, {}, grid, 1e-9).separated);
  // the first zero stays inside r < 2 on this grid, so only the inner value can show
  const auto C = Potential::piecewise({2.0, 3.0}, {-2.0, -1.01});
  CHECK_FALSE(lines_distinguish(A, C, 1, {}, grid, 1e-9).separated);
  const auto B = Potential::piecewise({2.0, 3.0}, {-2.01, -1.0});
  const auto d = lines_distinguish(A, B, 1, {}, grid, 1e-6);
  CHECK(d.separated);
  CHECK(std::abs(d.rA - d.rB) > 1e-6);
}
