#pragma once

// Adaptive Dormand-Prince 5(4) integration of psi'' = q(r) psi with quintic
// Hermite dense output. The state is renormalized whenever it drifts far from
// unit amplitude; each step records the log of the factor its values carry.

#include <cstddef>
#include <functional>
#include <span>

namespace zeroinv::ode {

/// One accepted step. True values are (y, dy) * exp(log_scale).
struct Step {
  double r0 = 0.0, r1 = 0.0;
  double y0 = 0.0, dy0 = 0.0, ddy0 = 0.0;
  double y1 = 0.0, dy1 = 0.0, ddy1 = 0.0;
  double log_scale = 0.0;

  /// Quintic Hermite interpolant of y and its derivative on [r0, r1].
  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
};

struct Options {
  double tol = 1e-10;
  std::size_t max_steps = 5'000'000;
  double h_init = 0.0;  ///< 0: chosen from the local wavenumber
};

struct State {
  double r = 0.0;
  double y = 0.0, dy = 0.0;
  double log_scale = 0.0;
};

enum class StopReason { reached_end, stopped_by_observer, step_limit };

/// q(r) is evaluated only strictly inside or at the ends of the intervals
/// between consecutive `breaks`; at a break the one-sided limit of the
/// interval being integrated is used (q_left is called at the right end of an
/// interval). Returns the final state.
StopReason integrate(const std::function<double(double)>& q,
                     const std::function<double(double)>& q_left, std::span<const double> breaks,
                     State& state, double r_end, const Options& options,
                     const std::function<bool(const Step&)>& on_step);

}  // namespace zeroinv::ode
