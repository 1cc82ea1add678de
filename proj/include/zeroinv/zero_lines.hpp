#pragma once

// Lines of zeros r_n(ell, E): fixed-ell lines parametrized by E, and the
// two-part mixed line (E down to E0 at ell0, then lambda upward at E0).

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "zeroinv/numerics.hpp"
#include "zeroinv/radial_solver.hpp"

namespace zeroinv {

enum class ParamKind { energy, lambda };

struct ZeroLine {
  int n = 1;
  AngularParameter ell0;
  std::vector<double> E;  ///< strictly decreasing
  std::vector<double> r;  ///< strictly increasing
  std::vector<Backend> backend;
  /// Set when the asymptote was reached: the first grid energy whose n-th zero
  /// lies beyond the radius ceiling.
  std::optional<double> truncated_at;

  std::size_t size() const { return r.size(); }
};

struct MixedZeroLine {
  int n = 1;
  AngularParameter ell0;
  double E0 = 0.0;
  double r0 = 0.0;  ///< junction r_n(ell0, E0)
  std::vector<double> E, rE;       ///< E decreasing to E0, r increasing to r0
  std::vector<double> lambda, rL;  ///< lambda increasing from lambda0, r increasing from r0
};

/// One sample per grid energy (grid strictly descending). Stops with a
/// truncation marker at the first energy without an n-th zero.
ZeroLine trace_fixed_l(const Potential& potential, int n, AngularParameter ell0,
                       const std::vector<double>& E_grid, const SolverOptions& options = {});

/// Radius-parametrized variant: E_n(r) solved at each radius of an ascending grid.
ZeroLine trace_fixed_l_radius(const Potential& potential, int n, AngularParameter ell0,
                              const std::vector<double>& r_grid,
                              const SolverOptions& options = {});

/// Energies approaching `asymptote` from above: E_start down to asymptote + closest,
/// geometric in E - asymptote.
std::vector<double> asymptote_grid(double E_start, double asymptote, double closest, int count);

/// Both parts sampled on `samples` points each: the E part uniformly in
/// 1/sqrt(E) between E_max and E0, the lambda part uniformly in [lambda0, lambda_max].
MixedZeroLine trace_mixed(const Potential& potential, int n, AngularParameter ell0, double E0,
                          double E_max, double lambda_max, int samples = 200,
                          const SolverOptions& options = {});

/// Mixed line sampled on a uniform radius grid of spacing h over [r_min, r_max]
/// (the junction r0 is inserted as a sample of both parts).
MixedZeroLine trace_mixed_radius(const Potential& potential, int n, AngularParameter ell0,
                                 double E0, double r_min, double r_max, double h,
                                 const SolverOptions& options = {});

/// Free-particle reference E_ref(r) = j^2 / r^2 with j the n-th zero of J_lambda0.
/// Subtracted before derivative fits so the r^-2 blow-up does not leak into them.
struct FreeReference {
  double j2 = 0.0;
  FreeReference() = default;
  FreeReference(int n, AngularParameter ell0);
  double value(double r) const { return j2 / (r * r); }
  double derivative(double r, int k) const;
};

enum class Side { left, right };

/// r -> E (and r -> lambda beyond the junction of a mixed line): shape-preserving
/// cubic through the samples.
class InverseLine {
public:
  explicit InverseLine(const ZeroLine& line);
  explicit InverseLine(const MixedZeroLine& line);

  struct Value {
    ParamKind kind;
    double value;
  };
  /// Throws RangeError outside [r_min, r_max].
  Value operator()(double r) const;
  double energy(double r) const;
  double lambda(double r) const;

  double r_min() const;
  double r_max() const;
  bool contains(double r) const { return r >= r_min() && r <= r_max(); }
  bool mixed() const { return !lambda_r_.empty(); }
  double junction() const { return junction_; }
  int n() const { return n_; }
  AngularParameter ell0() const { return ell0_; }
  double E0() const { return E0_; }

  /// Samples of each part (r ascending).
  const std::vector<double>& energy_r() const { return energy_r_; }
  const std::vector<double>& energy_values() const { return energy_values_; }
  const std::vector<double>& lambda_r() const { return lambda_r_; }
  const std::vector<double>& lambda_values() const { return lambda_values_; }
  const FreeReference& reference() const { return reference_; }

private:
  void build();
  int n_ = 1;
  AngularParameter ell0_;
  double E0_ = std::numeric_limits<double>::quiet_NaN();
  double junction_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> energy_r_, energy_values_, lambda_r_, lambda_values_;
  FreeReference reference_;
  std::shared_ptr<const std::function<double(double)>> e_interp_, l_interp_;
};

/// Derivatives of E (or lambda) at r from a polynomial fit to the `window`
/// samples nearest r on one side. Throws InputError when fewer are available.
numerics::DerivativeEstimate one_sided_derivatives(const InverseLine& line, double r, Side side,
                                                   int window = 12, int degree = 4);

struct SpectralDatum {
  double R = 0.0;
  double E_star = 0.0;
  double rho = 0.0;  ///< -dr_n/dE at E_star
};

SpectralDatum spectral_data(const ZeroLine& line, double R, int window = 12);

struct Distinction {
  bool separated = false;
  double E = std::numeric_limits<double>::quiet_NaN();
  double rA = std::numeric_limits<double>::quiet_NaN();
  double rB = std::numeric_limits<double>::quiet_NaN();
};

/// First grid energy where the n-th zeros of A and B differ by more than tol
/// (a zero existing for one potential only counts as separated).
Distinction lines_distinguish(const Potential& A, const Potential& B, int n,
                              AngularParameter ell0, const std::vector<double>& E_grid,
                              double tol, const SolverOptions& options = {});

}  // namespace zeroinv
