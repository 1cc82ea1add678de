#include "zeroinv/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zeroinv/errors.hpp"

namespace zeroinv::numerics {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 std::span<const double> breaks) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, pts[i], pts[i + 1],
                                                                           15, rel_tol);
  }
  return total;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double max_width) {
  if (!(b > a)) return 0.0;
  const auto panels = static_cast<std::size_t>(std::ceil((b - a) / max_width));
  const double w = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + static_cast<double>(i) * w;
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + w);
  }
  return total;
}

// ---------------------------------------------------------------------------

double PolyFit::value(double x) const {
  const double u = (x - center) / scale;
  double acc = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * u + coeffs(k);
  return acc;
}

double PolyFit::derivative_at_center(int k) const {
  if (k >= coeffs.size()) return 0.0;
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return coeffs(k) * fact / std::pow(scale, k);
}

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree,
                       double center, double scale) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n != static_cast<Eigen::Index>(y.size()) || n < degree + 1)
    throw InputError("fit_polynomial: need at least degree+1 points");
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x[static_cast<std::size_t>(i)] - center) / scale;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(i, k) = p;
      p *= u;
    }
    b(i) = y[static_cast<std::size_t>(i)];
  }
  PolyFit fit;
  fit.center = center;
  fit.scale = scale;
  fit.coeffs = a.colPivHouseholderQr().solve(b);
  fit.rss = (a * fit.coeffs - b).squaredNorm();
  return fit;
}

DerivativeEstimate fit_derivatives(std::span<const double> x, std::span<const double> y,
                                   int degree, double center) {
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(degree + 2))
    throw InputError("fit_derivatives: need at least degree+2 points for a jackknife");
  double lo = x[0], hi = x[0];
  for (double xi : x) {
    lo = std::min(lo, xi);
    hi = std::max(hi, xi);
  }
  const double scale = std::max(hi - lo, 1e-300);
  const PolyFit full = fit_polynomial(x, y, degree, center, scale);
  DerivativeEstimate est;
  est.d1 = full.derivative_at_center(1);
  est.d2 = full.derivative_at_center(2);
  est.d3 = full.derivative_at_center(3);

  std::vector<double> xs(n - 1), ys(n - 1);
  std::vector<std::array<double, 3>> loo(n);
  for (std::size_t skip = 0; skip < n; ++skip) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == skip) continue;
      xs[j] = x[i];
      ys[j] = y[i];
      ++j;
    }
    const PolyFit f = fit_polynomial(xs, ys, degree, center, scale);
    loo[skip] = {f.derivative_at_center(1), f.derivative_at_center(2),
                 f.derivative_at_center(3)};
  }
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (const auto& v : loo) mean += v[static_cast<std::size_t>(k)];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& v : loo) ss += (v[static_cast<std::size_t>(k)] - mean) *
                                    (v[static_cast<std::size_t>(k)] - mean);
    const double err = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    (k == 0 ? est.err1 : k == 1 ? est.err2 : est.err3) = err;
  }
  return est;
}

// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size() || n < 2) throw InputError("CubicSpline: need >= 2 matching points");
  for (std::size_t i = 1; i < n; ++i)
    if (x_[i] <= x_[i - 1]) throw InputError("CubicSpline: abscissae must increase");
  m_.assign(n, 0.0);
  if (n < 4) {
    // Too few knots for not-a-knot; natural spline (linear for n = 2).
    if (n == 3) {
      const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
      const double rhs = 6.0 * ((y_[2] - y_[1]) / h1 - (y_[1] - y_[0]) / h0);
      m_[1] = rhs / (2.0 * (h0 + h1));
    }
    return;
  }
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  auto idx = [](std::size_t i) { return static_cast<int>(i); };
  // not-a-knot: third derivative continuous at x_1 and x_{n-2}
  trip.emplace_back(0, 0, h[1]);
  trip.emplace_back(0, 1, -(h[0] + h[1]));
  trip.emplace_back(0, 2, h[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    trip.emplace_back(idx(i), idx(i - 1), h[i - 1]);
    trip.emplace_back(idx(i), idx(i), 2.0 * (h[i - 1] + h[i]));
    trip.emplace_back(idx(i), idx(i + 1), h[i]);
    rhs(idx(i)) = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
  }
  trip.emplace_back(idx(n - 1), idx(n - 3), h[n - 2]);
  trip.emplace_back(idx(n - 1), idx(n - 2), -(h[n - 3] + h[n - 2]));
  trip.emplace_back(idx(n - 1), idx(n - 1), h[n - 3]);
  Eigen::SparseMatrix<double> a(idx(n), idx(n));
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw InvariantViolation("CubicSpline: singular system");
  Eigen::VectorXd m = lu.solve(rhs);
  for (std::size_t i = 0; i < n; ++i) m_[i] = m(idx(i));
}

std::size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * h * m_[i] / 6.0 +
         (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
}

// ---------------------------------------------------------------------------
// Reinsch smoothing spline. With Q (n x n-2) the second-difference operator and
// R (n-2 x n-2) the tridiagonal Gram matrix, the interior second derivatives g
// solve (R + alpha Q^T Q) g = Q^T y and the fit is f = y - alpha Q g. The
// influence-matrix trace needs only the central band of (R + alpha Q^T Q)^{-1},
// obtained from its banded LDL^T factors.

namespace {

struct Band5 {
  // symmetric pentadiagonal: d0 main, d1 first off-diagonal, d2 second
  std::vector<double> d0, d1, d2;
};

struct SplineSystem {
  std::vector<double> h;
  Band5 r, qtq;
  std::vector<double> qty;
};

SplineSystem build_system(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t m = n - 2;
  SplineSystem s;
  s.h.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) s.h[i] = x[i + 1] - x[i];
  // column j of Q has entries at rows j, j+1, j+2
  std::vector<std::array<double, 3>> q(m);
  for (std::size_t j = 0; j < m; ++j)
    q[j] = {1.0 / s.h[j], -1.0 / s.h[j] - 1.0 / s.h[j + 1], 1.0 / s.h[j + 1]};
  s.r.d0.assign(m, 0.0);
  s.r.d1.assign(m, 0.0);
  s.r.d2.assign(m, 0.0);
  s.qtq = s.r;
  s.qty.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    s.r.d0[j] = (s.h[j] + s.h[j + 1]) / 3.0;
    if (j + 1 < m) s.r.d1[j] = s.h[j + 1] / 6.0;
    s.qtq.d0[j] = q[j][0] * q[j][0] + q[j][1] * q[j][1] + q[j][2] * q[j][2];
    if (j + 1 < m) s.qtq.d1[j] = q[j][1] * q[j + 1][0] + q[j][2] * q[j + 1][1];
    if (j + 2 < m) s.qtq.d2[j] = q[j][2] * q[j + 2][0];
    s.qty[j] = q[j][0] * y[j] + q[j][1] * y[j + 1] + q[j][2] * y[j + 2];
  }
  return s;
}

struct SplineFit {
  std::vector<double> fitted;
  double rss = 0.0;
  double trace = 0.0;  // trace of the influence matrix
};

SplineFit solve_alpha(const SplineSystem& s, std::span<const double> y, double alpha) {
  const std::size_t m = s.qty.size();
  const std::size_t n = m + 2;
  std::vector<double> a0(m), a1(m), a2(m);
  for (std::size_t j = 0; j < m; ++j) {
    a0[j] = s.r.d0[j] + alpha * s.qtq.d0[j];
    a1[j] = s.r.d1[j] + alpha * s.qtq.d1[j];
    a2[j] = s.r.d2[j] + alpha * s.qtq.d2[j];
  }
  // banded LDL^T; l1[i] = L(i+1,i), l2[i] = L(i+2,i)
  std::vector<double> d(m), l1(m, 0.0), l2(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double di = a0[i];
    if (i >= 1) di -= l1[i - 1] * l1[i - 1] * d[i - 1];
    if (i >= 2) di -= l2[i - 2] * l2[i - 2] * d[i - 2];
    d[i] = di;
    if (i + 1 < m) {
      double v = a1[i];
      if (i >= 1) v -= l2[i - 1] * l1[i - 1] * d[i - 1];
      l1[i] = v / di;
    }
    if (i + 2 < m) l2[i] = a2[i] / di;
  }
  // solve for g
  std::vector<double> z(s.qty);
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= 1) z[i] -= l1[i - 1] * z[i - 1];
    if (i >= 2) z[i] -= l2[i - 2] * z[i - 2];
  }
  for (std::size_t i = 0; i < m; ++i) z[i] /= d[i];
  for (std::size_t k = m; k-- > 0;) {
    if (k + 1 < m) z[k] -= l1[k] * z[k + 1];
    if (k + 2 < m) z[k] -= l2[k] * z[k + 2];
  }
  SplineFit fit;
  fit.fitted.assign(y.begin(), y.end());
  for (std::size_t j = 0; j < m; ++j) {
    fit.fitted[j] -= alpha * z[j] / s.h[j];
    fit.fitted[j + 1] -= alpha * z[j] * (-1.0 / s.h[j] - 1.0 / s.h[j + 1]);
    fit.fitted[j + 2] -= alpha * z[j] / s.h[j + 1];
  }
  for (std::size_t i = 0; i < n; ++i) fit.rss += (y[i] - fit.fitted[i]) * (y[i] - fit.fitted[i]);

  // central band of the inverse
  std::vector<double> s0(m), s1(m, 0.0), s2(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    const double b1 = k + 1 < m ? l1[k] : 0.0;
    const double b2 = k + 2 < m ? l2[k] : 0.0;
    if (k + 2 < m) s2[k] = -b1 * s1[k + 1] - b2 * s0[k + 2];
    if (k + 1 < m) s1[k] = -b1 * s0[k + 1] - (k + 2 < m ? b2 * s1[k + 1] : 0.0);
    s0[k] = 1.0 / d[k] - b1 * s1[k] - b2 * s2[k];
  }
  double tr = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    tr += s0[j] * s.qtq.d0[j] + 2.0 * s1[j] * s.qtq.d1[j] + 2.0 * s2[j] * s.qtq.d2[j];
  fit.trace = static_cast<double>(n) - alpha * tr;
  return fit;
}

void check_spline_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 4)
    throw InputError("smoothing spline: need >= 4 matching points");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] <= x[i - 1]) throw InputError("smoothing spline: abscissae must increase");
}

}  // namespace

SmoothingSplineResult smoothing_spline(std::span<const double> x, std::span<const double> y,
                                       double alpha) {
  check_spline_input(x, y);
  const auto sys = build_system(x, y);
  const auto fit = solve_alpha(sys, y, alpha);
  const double n = static_cast<double>(x.size());
  SmoothingSplineResult out;
  out.fitted = fit.fitted;
  out.alpha = alpha;
  out.effective_dof = fit.trace;
  const double denom = n - fit.trace;
  out.gcv = denom > 0.0 ? n * fit.rss / (denom * denom) : std::numeric_limits<double>::infinity();
  return out;
}

SmoothingSplineResult smoothing_spline_gcv(std::span<const double> x,
                                           std::span<const double> y) {
  check_spline_input(x, y);
  const auto sys = build_system(x, y);
  const double n = static_cast<double>(x.size());
  double hbar = 0.0;
  for (double h : sys.h) hbar += h;
  hbar /= static_cast<double>(sys.h.size());
  const double base = hbar * hbar * hbar;

  auto gcv_at = [&](double log_alpha) {
    const auto f = solve_alpha(sys, y, base * std::pow(10.0, log_alpha));
    const double denom = n - f.trace;
    if (!(denom > 1e-9 * n)) return std::numeric_limits<double>::infinity();
    return n * f.rss / (denom * denom);
  };

  // coarse grid, then golden-section refinement around the best grid point
  const double lo = -10.0, hi = 8.0, step = 0.5;
  double best_t = lo, best = std::numeric_limits<double>::infinity();
  for (double t = lo; t <= hi + 1e-12; t += step) {
    const double g = gcv_at(t);
    if (g < best) {
      best = g;
      best_t = t;
    }
  }
  double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = gcv_at(c), gd = gcv_at(d);
  for (int it = 0; it < 40; ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = gcv_at(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = gcv_at(d);
    }
  }
  double t = 0.5 * (a + b);
  if (gcv_at(t) > best) t = best_t;
  return smoothing_spline(x, y, base * std::pow(10.0, t));
}

std::vector<double> local_derivative(std::span<const double> x, std::span<const double> y,
                                     int half_width, int degree) {
  const std::size_t n = x.size();
  const auto w = static_cast<std::size_t>(2 * half_width + 1);
  if (n < w) throw InputError("local_derivative: too few points for the window");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start = i >= static_cast<std::size_t>(half_width) ? i - half_width : 0;
    start = std::min(start, n - w);
    auto xs = x.subspan(start, w);
    auto ys = y.subspan(start, w);
    const PolyFit f = fit_polynomial(xs, ys, degree, x[i], xs.back() - xs.front());
    out[i] = f.derivative_at_center(1);
  }
  return out;
}

}  // namespace zeroinv::numerics
