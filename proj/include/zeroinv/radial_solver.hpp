#pragma once

// Regular solution of
//
//   psi'' = (V(r) + (lambda^2 - 1/4)/r^2 - E) psi,   psi r^{-ell-1} -> 1 (r -> 0),
//
// its zeros and phase shifts. Two backends: adaptive integration for any
// potential and real lambda, and closed-form matching for s-wave step potentials.

#include <optional>
#include <vector>

#include "zeroinv/ode.hpp"
#include "zeroinv/potentials.hpp"

namespace zeroinv {

/// lambda = ell + 1/2, real and >= 1/2.
struct AngularParameter {
  double lambda = 0.5;

  AngularParameter() = default;
  explicit AngularParameter(double lam);
  static AngularParameter from_ell(double ell) { return AngularParameter(ell + 0.5); }

  double ell() const { return lambda - 0.5; }
  double centrifugal() const { return lambda * lambda - 0.25; }
};

enum class Backend { automatic, numeric, exact };

struct SolverOptions {
  double tol = 1e-10;
  double r_ceiling = 500.0;
  std::size_t max_steps = 2'000'000;
  Backend backend = Backend::automatic;
};

/// True when the closed-form backend applies (piecewise-constant or zero V, s-wave).
bool exact_backend_applies(const Potential& potential, AngularParameter ang);

// ---------------------------------------------------------------------------
// Numeric backend.

class RegularSolutionTrajectory {
public:
  Potential potential;
  AngularParameter ang;
  double energy = 0.0;
  double r_start = 0.0;           ///< series start point
  double series_coeff = 0.0;      ///< psi = r^{ell+1} (1 + series_coeff r^2) below r_start
  std::vector<ode::Step> steps;
  std::optional<double> truncated_at;

  double r_end() const { return steps.empty() ? r_start : steps.back().r1; }

  /// psi(r), psi'(r). These can overflow for strongly growing solutions;
  /// use the scaled accessors in that case.
  double value(double r) const;
  double derivative(double r) const;
  /// psi(r) = scaled_value(r, s) * exp(s).
  double scaled_value(double r, double& log_scale) const;
  double scaled_derivative(double r, double& log_scale) const;

  /// Relative residual |psi'' - q psi| / (|psi| + |psi'|/w + |q psi| / w^2) of
  /// the dense output at r.
  double residual(double r) const;

  std::vector<double> r_grid() const;
  std::vector<double> values() const;
  std::vector<double> derivatives() const;

private:
  const ode::Step& step_at(double r) const;
};

RegularSolutionTrajectory integrate_regular(const Potential& potential, AngularParameter ang,
                                            double E, double r_max, double tol = 1e-10);

/// Radius where integration starts and the series coefficient used there.
struct SeriesStart {
  double r0;
  double coeff;
};
SeriesStart series_start(const Potential& potential, AngularParameter ang, double E, double tol);

// ---------------------------------------------------------------------------
// Exact backend: psi on each segment in a sin/cos, sinh/cosh or linear basis.

class ExactPiecewiseSolution {
public:
  enum class Regime { oscillatory, hyperbolic, linear };
  struct Segment {
    double start, end, value;
    Regime regime;
    double kappa;      ///< sqrt|E - v|
    double a, b;       ///< psi(start), psi'(start), divided by exp(log_scale)
    double log_scale;
  };

  ExactPiecewiseSolution(const PiecewiseConstantPotential& potential, double E);

  double energy() const { return energy_; }
  const std::vector<Segment>& segments() const { return segments_; }

  double value(double r) const;
  double derivative(double r) const;
  double scaled_value(double r, double& log_scale) const;
  double scaled_derivative(double r, double& log_scale) const;

  /// All zeros in (0, r_max], ascending.
  std::vector<double> zeros(double r_max) const;
  /// Zeros strictly inside (0, r).
  int count_zeros(double r) const;
  /// delta(0, k) mod pi in (-pi/2, pi/2]; requires E > 0.
  double phase_shift() const;

private:
  const Segment& segment_at(double r) const;
  double energy_;
  std::vector<Segment> segments_;
};

// ---------------------------------------------------------------------------

struct ZeroSet {
  std::vector<double> radii;
  std::vector<bool> degenerate;
  Backend backend = Backend::numeric;
};

/// All sign changes of psi on (0, r_max].
ZeroSet find_zeros(const Potential& potential, AngularParameter ang, double E, double r_max,
                   const SolverOptions& options = {});

/// r_n(ell, E); throws ZeroBeyondRange when the ceiling is hit first.
double nth_zero(const Potential& potential, AngularParameter ang, double E, int n,
                const SolverOptions& options = {});

/// Zero count strictly inside (0, r) and the scale-free value
/// psi(r) / sqrt(psi(r)^2 + psi'(r)^2 / w^2), w the local wavenumber.
struct DirichletProbe {
  int zeros_inside = 0;
  double normalized_value = 0.0;
};
DirichletProbe dirichlet_probe(const Potential& potential, AngularParameter ang, double E,
                               double r, const SolverOptions& options = {});

/// E such that r_n(ell, E) = r. `seed` (if given) is a guess used to bracket.
double dirichlet_energy(const Potential& potential, AngularParameter ang, int n, double r,
                        const SolverOptions& options = {}, std::optional<double> seed = {});
/// lambda >= lambda_min such that r_n(lambda, E) = r.
double dirichlet_lambda(const Potential& potential, double E, int n, double r,
                        double lambda_min = 0.5, const SolverOptions& options = {},
                        std::optional<double> seed = {});

// ---------------------------------------------------------------------------
// Phase shifts.

/// Radius beyond which the potential is negligible for matching at tolerance tol.
double matching_radius(const Potential& potential, double tol);

/// Principal value of delta(ell, k) in (-pi/2, pi/2], matched at r_match
/// (0: chosen automatically).
double phase_shift(const Potential& potential, int ell, double k, double r_match = 0.0,
                   const SolverOptions& options = {});

/// delta on a k grid, on the continuous branch fixed by delta -> 0 at the
/// largest k and continuity downward. Grid may be in any order; output follows it.
std::vector<double> phase_shift_branch(const Potential& potential, int ell,
                                       const std::vector<double>& k_grid,
                                       const SolverOptions& options = {});

/// Closed-form delta(0, k) (mod pi) for a step potential.
double exact_phase_shift(const PiecewiseConstantPotential& potential, double k);

/// Bound-state energies in [E_lo, E_hi] (E_hi < 0), ascending.
std::vector<double> bound_states(const Potential& potential, int ell, double E_lo, double E_hi,
                                 const SolverOptions& options = {});

}  // namespace zeroinv
