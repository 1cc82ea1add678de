#pragma once

// Riccati-Bessel functions of integer order:
//   jhat_l(x) = x j_l(x)  ~ sin(x - l pi/2)
//   nhat_l(x) = x y_l(x)  ~ -cos(x - l pi/2)
// with Wronskian jhat nhat' - jhat' nhat = 1.

#include <vector>

namespace zeroinv {

struct RiccatiBessel {
  std::vector<double> j, dj;  ///< jhat_l and d/dx jhat_l, l = 0..lmax
  std::vector<double> n, dn;  ///< nhat_l and d/dx nhat_l
};

/// jhat_0..jhat_lmax at x > 0 (Miller downward recurrence below the turning
/// point, upward above it).
std::vector<double> riccati_j(int lmax, double x);
/// nhat_0..nhat_lmax at x > 0 (upward recurrence).
std::vector<double> riccati_n(int lmax, double x);
/// Both families and their derivatives.
RiccatiBessel riccati_bessel(int lmax, double x);

}  // namespace zeroinv
