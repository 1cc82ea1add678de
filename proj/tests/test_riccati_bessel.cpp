#include <doctest.h>

#include <cmath>

#include "zeroinv/riccati_bessel.hpp"

using namespace zeroinv;

// std::sph_bessel / std::sph_neumann are an independent implementation.
TEST_CASE("Riccati-Bessel values match the standard library") {
  const int lmax = 30;
  for (double x : {0.05, 0.7, 3.0, 12.5, 40.0}) {
    const auto j = riccati_j(lmax, x);
    const auto n = riccati_n(lmax, x);
    for (int l = 0; l <= lmax; ++l) {
      const double jl = x * std::sph_bessel(l, x);
      CHECK(j[l] == doctest::Approx(jl).epsilon(1e-11).scale(0.0));
      if (std::abs(n[l]) < 1e250) {
        const double nl = x * std::sph_neumann(l, x);
        CHECK(n[l] == doctest::Approx(nl).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("Riccati-Bessel Wronskian is one") {
  for (double x : {0.3, 2.0, 9.0, 55.0}) {
    const auto rb = riccati_bessel(20, x);
    for (int l = 0; l <= 20; ++l) {
      if (std::abs(rb.n[l]) > 1e100) continue;
      const double w = rb.j[l] * rb.dn[l] - rb.dj[l] * rb.n[l];
      CHECK(w == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("Riccati-Bessel derivatives agree with finite differences") {
  const double x = 4.2, h = 1e-5;
  const auto rb = riccati_bessel(10, x);
  const auto jp = riccati_j(10, x + h), jm = riccati_j(10, x - h);
  const auto np = riccati_n(10, x + h), nm = riccati_n(10, x - h);
  for (int l = 0; l <= 10; ++l) {
    CHECK(rb.dj[l] == doctest::Approx((jp[l] - jm[l]) / (2 * h)).epsilon(1e-8).scale(1.0));
    CHECK(rb.dn[l] == doctest::Approx((np[l] - nm[l]) / (2 * h)).epsilon(1e-8).scale(1.0));
  }
  CHECK(rb.j[0] == doctest::Approx(std::sin(x)));
  CHECK(rb.n[0] == doctest::Approx(-std::cos(x)));
}
