#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "zeroinv/errors.hpp"
#include "zeroinv/radial_solver.hpp"

using namespace zeroinv;
using std::numbers::pi;

namespace {

SolverOptions with_backend(Backend b, double tol = 1e-12) {
  SolverOptions o;
  o.backend = b;
  o.tol = tol;
  return o;
}

// distance between two angles modulo pi
double mod_pi_distance(double a, double b) {
  const double d = std::remainder(a - b, pi);
  return std::abs(d);
}

}  // namespace

TEST_CASE("free-particle zeros are n pi / sqrt(E) on both backends") {
  const auto V = Potential::zero();
  for (double E : {1.0, 4.0, pi * pi, 100.0})
    for (int n = 1; n <= 5; ++n) {
      const double expect = n * pi / std::sqrt(E);
      CHECK(std::abs(nth_zero(V, {}, E, n, with_backend(Backend::exact)) - expect) <= 1e-10);
      CHECK(std::abs(nth_zero(V, {}, E, n, with_backend(Backend::numeric)) - expect) <= 1e-6);
    }
}

TEST_CASE("free p-wave zero solves tan x = x") {
  const double x1 = 4.4934094579090641753;
  const double k = 1.3;
  CHECK(nth_zero(Potential::zero(), AngularParameter::from_ell(1), k * k, 1) ==
        doctest::Approx(x1 / k).epsilon(1e-9));
}

TEST_CASE("regular solution is normalized at the origin and satisfies the ODE") {
  const auto V = Potential::exponential(-3.0, 1.0);
  for (int l : {0, 2}) {
    const auto ang = AngularParameter::from_ell(l);
    const auto traj = integrate_regular(V, ang, 2.0, 6.0, 1e-11);
    const double r0 = traj.r_start;
    const double lead = std::pow(r0, l + 1);
    CHECK(traj.value(r0) / lead == doctest::Approx(1.0 + traj.series_coeff * r0 * r0).epsilon(1e-8));
    for (double r : {0.5, 1.7, 3.3, 5.9}) CHECK(traj.residual(r) < 1e-6);
  }
}

TEST_CASE("exact and numeric backends agree on step potentials") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> val(-5.0, 2.0), brk(0.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = brk(gen), b = a + brk(gen);
    const auto V = Potential::piecewise({a, b}, {val(gen), val(gen)});
    for (double E : {0.7, 5.0, 30.0})
      for (int n = 1; n <= 3; ++n) {
        const double re = nth_zero(V, {}, E, n, with_backend(Backend::exact));
        const double rn = nth_zero(V, {}, E, n, with_backend(Backend::numeric));
        CHECK(rn == doctest::Approx(re).epsilon(1e-8));
      }
  }
}

TEST_CASE("square-well s-wave phase shift") {
  const double V0 = 2.0, a = 1.5;
  const auto V = Potential::piecewise({a}, {-V0});
  for (double k : {0.2, 1.0, 3.7}) {
    const double K = std::sqrt(k * k + V0);
    const double expect = std::atan(k * std::tan(K * a) / K) - k * a;
    CHECK(mod_pi_distance(phase_shift(V, 0, k), expect) < 1e-8);
    CHECK(mod_pi_distance(exact_phase_shift(*V.get_if<PiecewiseConstantPotential>(), k), expect) < 1e-12);
  }
}

TEST_CASE("phase shifts vanish without a potential and stay on a continuous branch") {
  CHECK(std::abs(phase_shift(Potential::zero(), 3, 2.0)) < 1e-12);
  const auto V = Potential::exponential(-4.0, 1.0);
  std::vector<double> k;
  for (int i = 1; i <= 200; ++i) k.push_back(0.05 * i);
  const auto d = phase_shift_branch(V, 0, k);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(std::abs(d[i] - d[i - 1]) < 0.5);
  CHECK(std::abs(d.back()) < 0.5);
}

TEST_CASE("Dirichlet solves invert the zero map") {
  const auto V = Potential::exponential(-2.0, 0.8);
  const double E = 3.0;
  for (int n = 1; n <= 3; ++n) {
    const double r = nth_zero(V, {}, E, n);
    CHECK(dirichlet_energy(V, {}, n, r) == doctest::Approx(E).epsilon(1e-8));
    const double lam = 2.3;
    const double rl = nth_zero(V, AngularParameter(lam), E, n);
    CHECK(dirichlet_lambda(V, E, n, rl) == doctest::Approx(lam).epsilon(1e-8));
  }
}

TEST_CASE("zeros move out as E falls and as lambda grows") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> val(-5.0, 5.0), brk(0.5, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto V = Potential::piecewise({brk(gen)}, {val(gen)});
    double prev = 0.0;
    for (double E = 40.0; E > 6.0; E -= 2.0) {
      const double r = nth_zero(V, {}, E, 2);
      CHECK(r > prev);
      prev = r;
    }
    prev = 0.0;
    for (double lam = 0.5; lam < 6.0; lam += 0.5) {
      const double r = nth_zero(V, AngularParameter(lam), 20.0, 1);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("the one-bound-state potential has its state at -gamma^2") {
  const auto V = Potential::bargmann(std::sqrt(10.0));
  const auto states = bound_states(V, 0, -20.0, -0.05);
  REQUIRE(states.size() == 1);
  CHECK(states[0] == doctest::Approx(-10.0).epsilon(1e-7));
}

TEST_CASE("missing zeros and bad arguments raise the documented errors") {
  CHECK_THROWS_AS(nth_zero(Potential::zero(), {}, -1.0, 1), ZeroBeyondRange);
  CHECK_THROWS_AS(AngularParameter(0.2), InputError);
  CHECK_THROWS_AS(nth_zero(Potential::zero(), {}, 1.0, 0), InputError);
}
