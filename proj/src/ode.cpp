#include "zeroinv/ode.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "zeroinv/errors.hpp"

namespace zeroinv::ode {

double Step::value(double r) const {
  const double h = r1 - r0, t = (r - r0) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h3 = 0.5 * (t3 - 2.0 * t4 + t5);
  return y0 * h0 + h * dy0 * h1 + h * h * ddy0 * h2 + y1 * h5 + h * dy1 * h4 + h * h * ddy1 * h3;
}

double Step::derivative(double r) const {
  const double h = r1 - r0, t = (r - r0) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double h0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
  const double h1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
  const double h2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
  const double h5 = -h0;
  const double h4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
  const double h3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
  return (y0 * h0 + y1 * h5) / h + dy0 * h1 + dy1 * h4 + h * (ddy0 * h2 + ddy1 * h3);
}

double Step::second_derivative(double r) const {
  const double h = r1 - r0, t = (r - r0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
  const double h1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
  const double h2 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
  const double h5 = -h0;
  const double h4 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
  const double h3 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);
  return (y0 * h0 + y1 * h5) / (h * h) + (dy0 * h1 + dy1 * h4) / h + ddy0 * h2 + ddy1 * h3;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kRescaleHigh = 1e100, kRescaleLow = 1e-100;

}  // namespace

StopReason integrate(const std::function<double(double)>& q,
                     const std::function<double(double)>& q_left, std::span<const double> breaks,
                     State& state, double r_end, const Options& options,
                     const std::function<bool(const Step&)>& on_step) {
  if (!(r_end > state.r)) return StopReason::reached_end;
  std::vector<double> ends;
  for (double b : breaks)
    if (b > state.r && b < r_end) ends.push_back(b);
  ends.push_back(r_end);

  std::size_t steps = 0;
  double h = options.h_init;
  for (double seg_end : ends) {
    // q on the current interval; the right end takes the left limit
    auto qs = [&](double r) { return r >= seg_end ? q_left(seg_end) : q(r); };
    double r = state.r, y = state.y, dy = state.dy;
    double qr = qs(r);
    if (!(h > 0.0)) {
      const double w = std::sqrt(std::max(std::abs(qr), 1e-12));
      h = std::min(0.05 / w, 0.05 * std::max(r, 1e-6));
    }
    // FSAL derivative pair at r
    double k1y = dy, k1d = qr * y;
    while (r < seg_end) {
      if (++steps > options.max_steps) {
        state = {r, y, dy, state.log_scale};
        return StopReason::step_limit;
      }
      bool last = false;
      if (r + h >= seg_end || (seg_end - r - h) < 1e-12 * std::max(1.0, seg_end)) {
        h = seg_end - r;
        last = true;
      }
      auto f = [&](double rr, double yy, double dd, double& oy, double& od) {
        oy = dd;
        od = qs(rr) * yy;
      };
      double k2y, k2d, k3y, k3d, k4y, k4d, k5y, k5d, k6y, k6d, k7y, k7d;
      f(r + c2 * h, y + h * a21 * k1y, dy + h * a21 * k1d, k2y, k2d);
      f(r + c3 * h, y + h * (a31 * k1y + a32 * k2y), dy + h * (a31 * k1d + a32 * k2d), k3y, k3d);
      f(r + c4 * h, y + h * (a41 * k1y + a42 * k2y + a43 * k3y),
        dy + h * (a41 * k1d + a42 * k2d + a43 * k3d), k4y, k4d);
      f(r + c5 * h, y + h * (a51 * k1y + a52 * k2y + a53 * k3y + a54 * k4y),
        dy + h * (a51 * k1d + a52 * k2d + a53 * k3d + a54 * k4d), k5y, k5d);
      const double rn = last ? seg_end : r + h;
      f(rn, y + h * (a61 * k1y + a62 * k2y + a63 * k3y + a64 * k4y + a65 * k5y),
        dy + h * (a61 * k1d + a62 * k2d + a63 * k3d + a64 * k4d + a65 * k5d), k6y, k6d);
      const double yn = y + h * (b1 * k1y + b3 * k3y + b4 * k4y + b5 * k5y + b6 * k6y);
      const double dn = dy + h * (b1 * k1d + b3 * k3d + b4 * k4d + b5 * k5d + b6 * k6d);
      f(rn, yn, dn, k7y, k7d);
      const double ey = h * (e1 * k1y + e3 * k3y + e4 * k4y + e5 * k5y + e6 * k6y + e7 * k7y);
      const double ed = h * (e1 * k1d + e3 * k3d + e4 * k4d + e5 * k5d + e6 * k6d + e7 * k7d);

      // amplitude-relative error: w is the local wavenumber scale
      const double w = std::sqrt(std::max(std::abs(qr), 1e-12));
      const double amp = std::max(std::hypot(y, dy / w), std::hypot(yn, dn / w));
      const double err = std::max(std::abs(ey) / (options.tol * amp),
                                  std::abs(ed) / (options.tol * amp * w));
      if (!std::isfinite(err)) {
        h *= 0.25;
        continue;
      }
      if (err <= 1.0) {
        Step st;
        st.r0 = r;
        st.r1 = rn;
        st.y0 = y;
        st.dy0 = dy;
        st.ddy0 = k1d;
        st.y1 = yn;
        st.dy1 = dn;
        st.ddy1 = k7d;
        st.log_scale = state.log_scale;
        r = rn;
        y = yn;
        dy = dn;
        qr = qs(r < seg_end ? r : seg_end);
        k1y = k7y;
        k1d = k7d;
        const bool keep_going = on_step(st);
        const double a = std::hypot(y, dy / std::sqrt(std::max(std::abs(qr), 1e-12)));
        if (a > kRescaleHigh || a < kRescaleLow) {
          y /= a;
          dy /= a;
          k1y /= a;
          k1d /= a;
          state.log_scale += std::log(a);
        }
        if (!keep_going) {
          state.r = r;
          state.y = y;
          state.dy = dy;
          return StopReason::stopped_by_observer;
        }
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        if (!last) h *= std::clamp(fac, 0.2, 5.0);
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
      if (!(h > 0.0)) throw InvariantViolation("ode: step size underflow");
    }
    state.r = r;
    state.y = y;
    state.dy = dy;
    h = std::max(h, 1e-9);
  }
  return StopReason::reached_end;
}

}  // namespace zeroinv::ode
