#pragma once

// Small numerical building blocks shared by the solver and the inversions.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace zeroinv::numerics {

/// Adaptive Gauss-Kronrod on [a, b]; splits the interval at each of `breaks`
/// falling strictly inside.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, std::span<const double> breaks = {});

/// Fixed-order Gauss-Legendre panels of width <= max_width covering [a, b].
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double max_width);

// ---------------------------------------------------------------------------
// Local polynomial least squares.

struct PolyFit {
  double center = 0.0;
  double scale = 1.0;
  Eigen::VectorXd coeffs;  ///< in u = (x - center) / scale
  double rss = 0.0;

  double value(double x) const;
  /// k-th derivative at x = center.
  double derivative_at_center(int k) const;
};

/// Least-squares polynomial of `degree` in u = (x - center)/scale.
PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree,
                       double center, double scale);

struct DerivativeEstimate {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  double err1 = 0.0, err2 = 0.0, err3 = 0.0;  ///< jackknife standard errors
};

/// Derivatives at `center` from a polynomial fit with leave-one-out jackknife errors.
DerivativeEstimate fit_derivatives(std::span<const double> x, std::span<const double> y,
                                   int degree, double center);

// ---------------------------------------------------------------------------
// Interpolation.

/// Natural-free cubic spline with not-a-knot end conditions.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at knots
};

/// Cubic smoothing spline (Reinsch) with the roughness chosen by generalized
/// cross-validation.
struct SmoothingSplineResult {
  std::vector<double> fitted;  ///< smoothed values at the knots
  double alpha = 0.0;          ///< chosen roughness penalty
  double gcv = 0.0;
  double effective_dof = 0.0;  ///< trace of the influence matrix
};

SmoothingSplineResult smoothing_spline_gcv(std::span<const double> x, std::span<const double> y);
/// Fixed roughness penalty; exposed for tests.
SmoothingSplineResult smoothing_spline(std::span<const double> x, std::span<const double> y,
                                       double alpha);

/// First derivative at each knot from local polynomial fits (centered where
/// possible, one-sided at the ends).
std::vector<double> local_derivative(std::span<const double> x, std::span<const double> y,
                                     int half_width = 4, int degree = 4);

}  // namespace zeroinv::numerics
