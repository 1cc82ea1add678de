#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zeroinv/born_inversion.hpp"
#include "zeroinv/errors.hpp"

using namespace zeroinv;
using std::numbers::pi;

namespace {

// composite Simpson on [0, a] with std::sph_bessel; independent of the library quadrature
double well_partial_born(double V0, double a, int ell, double k) {
  const int m = 20000;
  const double h = a / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double r = i * h;
    const double j = r == 0.0 ? 0.0 : k * r * std::sph_bessel(ell, k * r);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * j * j;
  }
  return -(1.0 / k) * V0 * s * h / 3.0;
}

double worst_relative(const SineProfile& p, double v0, double mu) {
  double peak = 0.0, worst = 0.0;
  for (double q : p.q) peak = std::max(peak, std::abs(exponential_sine_transform(v0, mu, q)));
  for (std::size_t i = 0; i < p.q.size(); ++i)
    worst = std::max(worst, std::abs(p.g[i] - exponential_sine_transform(v0, mu, p.q[i])));
  return worst / peak;
}

}  // namespace

TEST_CASE("s-wave Born phase of an exponential in closed form") {
  const double v0 = -0.5, mu = 1.0;
  const auto V = Potential::exponential(v0, mu);
  for (double k : {0.1, 1.0, 5.0, 20.0}) {
    const double expect = -(v0 / k) * 0.5 * (1.0 / mu - mu / (mu * mu + 4.0 * k * k));
    CHECK(born_phase_swave(V, k) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(born_phase_partial(V, 0, k) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("partial-wave Born phases of a square well") {
  const double V0 = -1.5, a = 2.0;
  const auto V = Potential::piecewise({a}, {V0});
  for (int ell : {0, 1, 4, 10})
    for (double k : {0.5, 3.0}) {
      const double expect = well_partial_born(V0, a, ell, k);
      CHECK(born_phase_partial(V, ell, k) == doctest::Approx(expect).epsilon(1e-8).scale(1e-16));
    }
  // s-wave in closed form: -(V0/k)(a/2 - sin(2ka)/(4k))
  const double k = 1.7;
  CHECK(born_phase_swave(V, k) ==
        doctest::Approx(-(V0 / k) * (a / 2.0 - std::sin(2.0 * k * a) / (4.0 * k))).epsilon(1e-12));
}

TEST_CASE("sine transform of an exponential") {
  // direct check of int r v0 e^{-mu r} sin(q r) dr = 2 v0 mu q / (mu^2 + q^2)^2
  const double v0 = 0.8, mu = 1.3, q = 2.1;
  const int m = 200000;
  const double h = 60.0 / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * r * v0 * std::exp(-mu * r) * std::sin(q * r);
  }
  CHECK(exponential_sine_transform(v0, mu, q) == doctest::Approx(s * h / 3.0).epsilon(1e-9));
}

TEST_CASE("both routes recover the sine transform of an exponential") {
  const double v0 = -0.5, mu = 1.0;
  const auto data = make_dataset(Potential::exponential(v0, mu), 5.0, 30.0, 0.01, 40);
  data.validate();
  const auto high = g_high(data);
  CHECK(high.q.front() == doctest::Approx(10.0));
  CHECK(worst_relative(high, v0, mu) < 1e-3);
  const auto low = g_low(data, low_grid(5.0, 201));
  CHECK(low.q.back() == doctest::Approx(10.0));
  CHECK(low.g.front() == 0.0);
  CHECK(worst_relative(low, v0, mu) < 1e-3);
  const auto all = assemble_g(low, high);
  REQUIRE(all.seam_index >= 0);
  CHECK(all.q[static_cast<std::size_t>(all.seam_index)] == doctest::Approx(10.0));
  for (std::size_t i = 1; i < all.q.size(); ++i) CHECK(all.q[i] > all.q[i - 1]);
}

TEST_CASE("seam mismatch is reported") {
  std::vector<double> ql, qh;
  for (int i = 0; i <= 100; ++i) ql.push_back(0.02 * i);
  for (int i = 0; i <= 100; ++i) qh.push_back(2.0 + 0.5 * i);
  const auto low = analytic_profile(-0.5, 1.0, ql);
  auto high = analytic_profile(-0.5, 1.0, qh);
  CHECK_NOTHROW(assemble_g(low, high));
  for (double& g : high.g) g *= 1.2;
  CHECK_THROWS_AS(assemble_g(low, high), SeamMismatch);
}

TEST_CASE("sine inversion of the analytic transform") {
  const double v0 = -0.5, mu = 1.0;
  std::vector<double> q, r, exact;
  for (int i = 0; i <= 6000; ++i) q.push_back(0.01 * i);
  for (int i = 0; i <= 790; ++i) r.push_back(0.1 + 0.01 * i);
  for (double x : r) exact.push_back(v0 * std::exp(-mu * x));
  InvertOptions opt;
  opt.q_max = 60.0;
  const auto inv = invert_sine(analytic_profile(v0, mu, q), r, opt);
  std::vector<double> V;
  for (std::size_t i = 0; i < r.size(); ++i) V.push_back(inv.rV[i] / r[i]);
  CHECK(relative_l2_error(r, V, exact) < 1e-3);
  // the band-limited answer from [0, 1] alone is far off
  std::vector<double> q1(q.begin(), q.begin() + 101);
  const auto bl = invert_sine_band_limited(analytic_profile(v0, mu, q1), r);
  std::vector<double> Vb;
  for (std::size_t i = 0; i < r.size(); ++i) Vb.push_back(bl.rV[i] / r[i]);
  CHECK(relative_l2_error(r, Vb, exact) > 0.1);
}

TEST_CASE("malformed phase-shift data is rejected") {
  PhaseShiftDataset d;
  d.k0 = 1.0;
  d.fixed_l_branch = {{1.0, 0.1}, {0.9, 0.1}};
  d.fixed_E_branch = {{0, 0.1}, {1, 0.05}};
  CHECK_THROWS_AS(d.validate(), InputError);
  d.fixed_l_branch = {{1.0, 0.1}, {1.1, 0.1 + pi}};
  CHECK_THROWS_AS(d.validate(), InputError);
  d.fixed_l_branch = {{1.0, 0.1}, {1.1, 0.09}};
  d.fixed_E_branch = {{0, 0.1}, {2, 0.05}};
  CHECK_THROWS_AS(d.validate(), InputError);
}

TEST_CASE("relative L2 error") {
  const std::vector<double> r{0.0, 1.0, 2.0}, b{1.0, 1.0, 1.0}, a{1.1, 1.1, 1.1};
  CHECK(relative_l2_error(r, a, b) == doctest::Approx(0.1));
  CHECK(relative_l2_error(r, b, b) == 0.0);
}
