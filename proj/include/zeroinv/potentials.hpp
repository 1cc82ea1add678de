#pragma once

// Potential models for the radial Schrödinger equation.
//
// Units throughout: hbar^2/2m = 1, E = k^2, lengths in L, energies in 1/L^2.

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace zeroinv {

struct ZeroPotential {};

/// Step potential with compact support: values[j] on [a_j, a_{j+1}) with a_0 = 0,
/// and exactly 0 beyond the last breakpoint.
class PiecewiseConstantPotential {
public:
  PiecewiseConstantPotential() = default;
  PiecewiseConstantPotential(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t segment_count() const { return values_.size(); }

  /// Right limit at breakpoints.
  double operator()(double r) const;
  double left_limit(double r) const;
  double right_limit(double r) const { return (*this)(r); }

  /// Segment [start, end) and value, including the zero tail as the last segment.
  struct Segment {
    double start;
    double end;  // +inf for the tail
    double value;
  };
  std::vector<Segment> segments() const;

  friend bool operator==(const PiecewiseConstantPotential&,
                         const PiecewiseConstantPotential&) = default;

private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// One-bound-state potential obtained by adding the state E = -gamma^2 to V = 0:
///   V(r) = -2 d^2/dr^2 ln W(r),  W(r) = 1 + c*gamma * int_0^r sinh^2(gamma s) ds.
struct BargmannOneBoundPotential {
  double gamma = 1.0;
  double c = 1.0;

  double operator()(double r) const;
  double bound_energy() const { return -gamma * gamma; }
};

/// V(r) = v0 exp(-mu r).
struct ExponentialPotential {
  double v0 = 0.0;
  double mu = 1.0;

  double operator()(double r) const;
};

/// Piecewise-linear interpolation on a grid, 0 beyond the last grid point and
/// constant (first value) between 0 and the first grid point.
class SampledPotential {
public:
  SampledPotential() = default;
  SampledPotential(std::vector<double> grid, std::vector<double> values);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double r) const;

private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

using PotentialModel = std::variant<ZeroPotential, PiecewiseConstantPotential,
                                    BargmannOneBoundPotential, ExponentialPotential,
                                    SampledPotential>;

/// Immutable, cheaply copyable handle on one of the potential models.
class Potential {
public:
  Potential() = default;
  Potential(PotentialModel model);  // NOLINT(google-explicit-constructor)

  static Potential zero() { return Potential{}; }
  static Potential piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static Potential exponential(double v0, double mu);
  static Potential bargmann(double gamma, double c = 1.0);
  /// The two-step example: -2 on [0,2), -1 on [2,3), 0 beyond.
  static Potential two_step_example();

  /// V(r); throws InputError for r < 0.
  double operator()(double r) const;

  const PotentialModel& model() const { return model_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&model_);
  }
  bool is_zero() const;
  std::string kind() const;

  /// Radii where V is discontinuous (piecewise-constant breakpoints).
  std::span<const double> discontinuities() const;
  /// V(0+).
  double value_at_origin() const;
  /// Radius beyond which |V| < tol (exact support end for compact potentials).
  double support_radius(double tol = 1e-14) const;
  /// Bounds on V over [0, inf).
  double lower_bound() const;
  double upper_bound() const;

private:
  PotentialModel model_{ZeroPotential{}};
};

struct IntegrabilityReport {
  double near_origin_integral = 0.0;  ///< int_0^b r|V| dr
  double tail_integral = 0.0;         ///< int_b^inf |V| dr, extrapolated beyond r_max
  double tail_remainder = 0.0;        ///< extrapolated part beyond r_max
  bool both_finite = true;
};

/// Numerical check of int_0^b r|V| < inf and int_b^inf |V| < inf.
IntegrabilityReport check_integrability(const Potential& potential, double b, double r_max);

/// Closed form of the one-bound-state profile, stable for gamma*r >> 1.
double bargmann_profile(double gamma, double c, double r);

}  // namespace zeroinv
