#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "zeroinv/numerics.hpp"

using namespace zeroinv::numerics;
using std::numbers::pi;

TEST_CASE("adaptive quadrature, with and without interior breaks") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, pi) == doctest::Approx(2.0).epsilon(1e-13));
  const double kink[] = {1.0 / 3.0};
  CHECK(integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, 1e-12, kink) ==
        doctest::Approx(5.0 / 18.0).epsilon(1e-13));
  CHECK(integrate_panels([](double x) { return std::exp(-x); }, 0.0, 10.0, 0.5) ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-13));
}

TEST_CASE("polynomial fits reproduce polynomials and their derivatives") {
  std::vector<double> x, y;
  for (int i = 0; i < 15; ++i) {
    const double t = 0.7 + 0.05 * i;
    x.push_back(t);
    y.push_back(1.0 - 2.0 * t + 0.5 * t * t * t - 0.25 * t * t * t * t);
  }
  const double c = 1.1;
  const auto d = fit_derivatives(x, y, 4, c);
  CHECK(d.d1 == doctest::Approx(-2.0 + 1.5 * c * c - c * c * c).epsilon(1e-9));
  CHECK(d.d2 == doctest::Approx(3.0 * c - 3.0 * c * c).epsilon(1e-8));
  CHECK(d.d3 == doctest::Approx(3.0 - 6.0 * c).epsilon(1e-7));
  CHECK(d.err3 < 1e-6);
  const auto fit = fit_polynomial(x, y, 4, c, 0.3);
  CHECK(fit.value(0.9) == doctest::Approx(y[4]).epsilon(1e-12));
  CHECK(fit.rss < 1e-20);
}

TEST_CASE("jackknife errors grow with noise") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> noise(0.0, 1e-6);
  std::vector<double> x, clean, noisy;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.9 + 0.01 * i);
    clean.push_back(std::sin(x.back()));
    noisy.push_back(clean.back() + noise(gen));
  }
  const auto a = fit_derivatives(x, clean, 4, 1.0);
  const auto b = fit_derivatives(x, noisy, 4, 1.0);
  CHECK(b.err1 > a.err1);
  CHECK(std::abs(b.d1 - std::cos(1.0)) < 5.0 * b.err1 + 1e-5);
}

TEST_CASE("not-a-knot spline is exact on cubics") {
  std::vector<double> x, y;
  auto f = [](double t) { return 2.0 - t + 3.0 * t * t - 0.5 * t * t * t; };
  for (double t : {0.0, 0.3, 0.5, 1.1, 1.7, 2.0, 2.9}) {
    x.push_back(t);
    y.push_back(f(t));
  }
  const CubicSpline s(x, y);
  for (double t : {0.1, 0.77, 1.4, 2.5}) {
    CHECK(s(t) == doctest::Approx(f(t)).epsilon(1e-12));
    CHECK(s.derivative(t) == doctest::Approx(-1.0 + 6.0 * t - 1.5 * t * t).epsilon(1e-11));
  }
}

TEST_CASE("smoothing spline: interpolation limit and GCV on noisy data") {
  std::vector<double> x, y;
  for (int i = 0; i < 60; ++i) {
    x.push_back(0.05 * i);
    y.push_back(std::exp(-x.back()));
  }
  const auto tight = smoothing_spline(x, y, 1e-14);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(tight.fitted[i] == doctest::Approx(y[i]).epsilon(1e-9));

  std::mt19937_64 gen(5);
  std::normal_distribution<double> noise(0.0, 1e-3);
  std::vector<double> yn = y;
  for (double& v : yn) v += noise(gen);
  const auto gcv = smoothing_spline_gcv(x, yn);
  double err_raw = 0.0, err_fit = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err_raw += (yn[i] - y[i]) * (yn[i] - y[i]);
    err_fit += (gcv.fitted[i] - y[i]) * (gcv.fitted[i] - y[i]);
  }
  CHECK(err_fit < err_raw);
  CHECK(gcv.effective_dof < static_cast<double>(x.size()));
}

TEST_CASE("local derivative on a quartic") {
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) {
    x.push_back(0.1 * i);
    y.push_back(std::pow(x.back(), 4) - x.back());
  }
  const auto d = local_derivative(x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(d[i] == doctest::Approx(4.0 * std::pow(x[i], 3) - 1.0).epsilon(1e-8).scale(1.0));
}
