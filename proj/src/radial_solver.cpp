#include "zeroinv/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "zeroinv/errors.hpp"
#include "zeroinv/riccati_bessel.hpp"

namespace zeroinv {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double left_value(const Potential& p, double r) {
  if (auto* pc = p.get_if<PiecewiseConstantPotential>()) return pc->left_limit(r);
  return p(r);
}

// Reduce an angle modulo pi into (-pi/2, pi/2].
double reduce_half_pi(double x) {
  double y = std::remainder(x, kPi);
  if (y <= -0.5 * kPi) y += kPi;
  return y;
}

template <class F>
double bracketed_root(F f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

struct Equation {
  const Potential& potential;
  double centrifugal;
  double E;

  double q(double r) const { return potential(r) + centrifugal / (r * r) - E; }
  double q_left(double r) const { return left_value(potential, r) + centrifugal / (r * r) - E; }
};

ode::State start_state(const SeriesStart& s, AngularParameter ang) {
  const double p = ang.lambda + 0.5;
  const double r0 = s.r0, corr = 1.0 + s.coeff * r0 * r0;
  ode::State st;
  st.r = r0;
  st.y = corr;
  st.dy = p / r0 * corr + 2.0 * s.coeff * r0;
  st.log_scale = p * std::log(r0);
  return st;
}

// Tracks sign changes of psi across accepted steps. A zero is reported when a
// nonzero sample has the opposite sign of the last nonzero sample; it is then
// polished on the dense output.
class ZeroScanner {
public:
  explicit ZeroScanner(int last_sign = 1) : last_sign_(last_sign) {}

  template <class Emit>
  void scan(const ode::Step& st, Emit emit) {
    constexpr int kSamples = 4;
    double prev_r = last_r_ < 0.0 ? st.r0 : last_r_;
    for (int i = 1; i <= kSamples; ++i) {
      const double r = i == kSamples ? st.r1 : st.r0 + (st.r1 - st.r0) * i / kSamples;
      const double v = i == kSamples ? st.y1 : st.value(r);
      if (v == 0.0) continue;
      const int s = v > 0.0 ? 1 : -1;
      if (s != last_sign_) {
        double lo = std::max(prev_r, st.r0);
        double flo = st.value(lo);
        // the last nonzero sample may sit in the previous step
        if (flo == 0.0 || (flo > 0.0) == (v > 0.0)) {
          lo = st.r0;
          flo = st.y0;
        }
        double z;
        if (flo == 0.0 || (flo > 0.0) == (v > 0.0))
          z = lo;
        else
          z = bracketed_root([&](double x) { return st.value(x); }, lo, r, flo, v);
        const double w = std::max(std::abs(st.y0), std::abs(st.y1));
        const double slope = std::abs(st.derivative(z)) * (st.r1 - st.r0);
        emit(z, slope < 1e-8 * w);
        last_sign_ = s;
      }
      prev_r = r;
    }
    last_r_ = st.r1;
  }

private:
  int last_sign_;
  double last_r_ = -1.0;
};

}  // namespace

AngularParameter::AngularParameter(double lam) : lambda(lam) {
  if (!(lam >= 0.5)) throw InputError("angular parameter: lambda must be >= 1/2");
}

bool exact_backend_applies(const Potential& potential, AngularParameter ang) {
  if (ang.lambda != 0.5) return false;
  return potential.get_if<PiecewiseConstantPotential>() != nullptr || potential.is_zero();
}

namespace {

PiecewiseConstantPotential as_piecewise(const Potential& p) {
  if (auto* pc = p.get_if<PiecewiseConstantPotential>()) return *pc;
  return {};
}

bool use_exact(const Potential& p, AngularParameter ang, const SolverOptions& o) {
  if (o.backend == Backend::numeric) return false;
  const bool ok = exact_backend_applies(p, ang);
  if (o.backend == Backend::exact && !ok)
    throw InputError("exact backend needs a step potential and ell = 0");
  return ok;
}

void check_tol(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-3)) throw InputError("solver tolerance out of range");
}

}  // namespace

// ---------------------------------------------------------------------------
// Numeric backend.

SeriesStart series_start(const Potential& potential, AngularParameter ang, double E, double tol) {
  const double v0 = potential.value_at_origin();
  const double u = v0 - E;
  SeriesStart s;
  s.coeff = u / (4.0 * ang.lambda + 4.0);
  double r0 = std::min(1e-3, 0.1 * std::pow(tol, 0.25) / std::sqrt(std::max(std::abs(u), 1.0)));
  if (auto br = potential.discontinuities(); !br.empty()) r0 = std::min(r0, 0.5 * br.front());
  if (!potential.get_if<PiecewiseConstantPotential>() && !potential.is_zero()) {
    // linear variation of V near 0 enters one order above the series
    const double h = 1e-4;
    const double v1 = std::abs(potential(2.0 * h) - potential(h)) / h;
    if (v1 > 0.0) r0 = std::min(r0, 0.5 * std::cbrt(tol / v1));
  }
  s.r0 = r0;
  return s;
}

RegularSolutionTrajectory integrate_regular(const Potential& potential, AngularParameter ang,
                                            double E, double r_max, double tol) {
  if (!(r_max > 0.0)) throw InputError("integrate_regular: r_max must be positive");
  check_tol(tol);
  RegularSolutionTrajectory traj;
  traj.potential = potential;
  traj.ang = ang;
  traj.energy = E;
  const SeriesStart s = series_start(potential, ang, E, tol);
  traj.r_start = std::min(s.r0, r_max);
  traj.series_coeff = s.coeff;
  if (r_max <= s.r0) return traj;

  Equation eq{potential, ang.centrifugal(), E};
  ode::State state = start_state(s, ang);
  ode::Options opts;
  opts.tol = tol;
  const auto reason = ode::integrate([&](double r) { return eq.q(r); },
                                     [&](double r) { return eq.q_left(r); },
                                     potential.discontinuities(), state, r_max, opts,
                                     [&](const ode::Step& st) {
                                       traj.steps.push_back(st);
                                       return true;
                                     });
  if (reason == ode::StopReason::step_limit) traj.truncated_at = state.r;
  return traj;
}

const ode::Step& RegularSolutionTrajectory::step_at(double r) const {
  if (r > r_end() * (1.0 + 1e-14))
    throw RangeError("trajectory evaluated beyond its end r=" + std::to_string(r_end()));
  auto it = std::lower_bound(steps.begin(), steps.end(), r,
                             [](const ode::Step& st, double x) { return st.r1 < x; });
  if (it == steps.end()) --it;
  return *it;
}

double RegularSolutionTrajectory::scaled_value(double r, double& log_scale) const {
  if (r < 0.0) throw InputError("trajectory: negative radius");
  if (r == 0.0) {
    log_scale = 0.0;
    return 0.0;
  }
  if (steps.empty() || r <= r_start) {
    log_scale = (ang.lambda + 0.5) * std::log(r);
    return 1.0 + series_coeff * r * r;
  }
  const auto& st = step_at(r);
  log_scale = st.log_scale;
  return st.value(r);
}

double RegularSolutionTrajectory::scaled_derivative(double r, double& log_scale) const {
  if (r < 0.0) throw InputError("trajectory: negative radius");
  const double p = ang.lambda + 0.5;
  if (steps.empty() || r <= r_start) {
    if (r == 0.0) {
      log_scale = 0.0;
      return p == 1.0 ? 1.0 : 0.0;
    }
    log_scale = (p - 1.0) * std::log(r);
    return p * (1.0 + series_coeff * r * r) + 2.0 * series_coeff * r * r;
  }
  const auto& st = step_at(r);
  log_scale = st.log_scale;
  return st.derivative(r);
}

double RegularSolutionTrajectory::value(double r) const {
  double s = 0.0;
  const double v = scaled_value(r, s);
  return v * std::exp(s);
}

double RegularSolutionTrajectory::derivative(double r) const {
  double s = 0.0;
  const double v = scaled_derivative(r, s);
  return v * std::exp(s);
}

double RegularSolutionTrajectory::residual(double r) const {
  if (steps.empty() || r <= r_start) return 0.0;
  const auto& st = step_at(r);
  const double q = potential(r) + ang.centrifugal() / (r * r) - energy;
  const double w2 = std::max(std::abs(q), 1.0);
  const double y = st.value(r), dy = st.derivative(r), ddy = st.second_derivative(r);
  const double amp = std::hypot(y, dy / std::sqrt(w2));
  return std::abs(ddy - q * y) / (w2 * amp);
}

std::vector<double> RegularSolutionTrajectory::r_grid() const {
  std::vector<double> out{r_start};
  for (const auto& st : steps) out.push_back(st.r1);
  return out;
}

std::vector<double> RegularSolutionTrajectory::values() const {
  std::vector<double> out;
  for (double r : r_grid()) out.push_back(value(r));
  return out;
}

std::vector<double> RegularSolutionTrajectory::derivatives() const {
  std::vector<double> out;
  for (double r : r_grid()) out.push_back(derivative(r));
  return out;
}

// ---------------------------------------------------------------------------
// Exact backend.

namespace {

using Regime = ExactPiecewiseSolution::Regime;

struct Local {
  double y, dy, log_scale;
};

Local eval_local(const ExactPiecewiseSolution::Segment& s, double x) {
  const double k = s.kappa;
  switch (s.regime) {
    case Regime::oscillatory: {
      const double c = std::cos(k * x), sn = std::sin(k * x);
      return {s.a * c + s.b * sn / k, -s.a * k * sn + s.b * c, s.log_scale};
    }
    case Regime::hyperbolic: {
      if (k * x < 20.0) {
        const double c = std::cosh(k * x), sn = std::sinh(k * x);
        return {s.a * c + s.b * sn / k, s.a * k * sn + s.b * c, s.log_scale};
      }
      // factor out e^{kx}
      const double e = std::exp(-2.0 * k * x);
      const double p = 0.5 * (s.a + s.b / k), m = 0.5 * (s.a - s.b / k);
      return {p + m * e, k * (p - m * e), s.log_scale + k * x};
    }
    case Regime::linear:
      return {s.a + s.b * x, s.b, s.log_scale};
  }
  return {0.0, 0.0, 0.0};
}

}  // namespace

ExactPiecewiseSolution::ExactPiecewiseSolution(const PiecewiseConstantPotential& potential,
                                               double E)
    : energy_(E) {
  double a = 0.0, b = 1.0, log_scale = 0.0;
  for (const auto& seg : potential.segments()) {
    Segment s{};
    s.start = seg.start;
    s.end = seg.end;
    s.value = seg.value;
    const double d = E - seg.value;
    s.regime = d > 0.0 ? Regime::oscillatory : (d < 0.0 ? Regime::hyperbolic : Regime::linear);
    s.kappa = std::sqrt(std::abs(d));
    s.a = a;
    s.b = b;
    s.log_scale = log_scale;
    segments_.push_back(s);
    if (std::isfinite(seg.end)) {
      const Local l = eval_local(s, seg.end - seg.start);
      const double m = std::max(std::abs(l.y), std::abs(l.dy));
      a = l.y / m;
      b = l.dy / m;
      log_scale = l.log_scale + std::log(m);
    }
  }
}

const ExactPiecewiseSolution::Segment& ExactPiecewiseSolution::segment_at(double r) const {
  if (r < 0.0) throw InputError("exact solution: negative radius");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double x, const Segment& s) { return x < s.start; });
  return *(it - 1);
}

double ExactPiecewiseSolution::scaled_value(double r, double& log_scale) const {
  const auto& s = segment_at(r);
  const Local l = eval_local(s, r - s.start);
  log_scale = l.log_scale;
  return l.y;
}

double ExactPiecewiseSolution::scaled_derivative(double r, double& log_scale) const {
  const auto& s = segment_at(r);
  const Local l = eval_local(s, r - s.start);
  log_scale = l.log_scale;
  return l.dy;
}

double ExactPiecewiseSolution::value(double r) const {
  double s = 0.0;
  const double v = scaled_value(r, s);
  return v * std::exp(s);
}

double ExactPiecewiseSolution::derivative(double r) const {
  double s = 0.0;
  const double v = scaled_derivative(r, s);
  return v * std::exp(s);
}

std::vector<double> ExactPiecewiseSolution::zeros(double r_max) const {
  std::vector<double> out;
  for (const auto& s : segments_) {
    if (s.start >= r_max) break;
    const double X = std::min(s.end, r_max) - s.start;
    // slack so a zero sitting on a breakpoint is not lost to rounding; duplicates
    // are removed below
    const double slack = 1e-13 * (1.0 + s.start);
    auto accept = [&](double x) {
      if (x < -slack || x > X) return;
      const double r = s.start + std::max(x, 0.0);
      if (r <= 1e-300) return;  // the origin is not a zero
      out.push_back(r);
    };
    switch (s.regime) {
      case Regime::oscillatory: {
        const double k = s.kappa;
        const double phi = std::atan2(s.a * k, s.b);
        // zeros at k x + phi = m pi
        for (double m = std::floor(phi / kPi);; m += 1.0) {
          const double x = (m * kPi - phi) / k;
          if (x > X) break;
          accept(x);
        }
        break;
      }
      case Regime::hyperbolic: {
        if (s.b == 0.0) break;
        const double t = -s.a * s.kappa / s.b;
        if (t > -1e-15 && t < 1.0) accept(std::atanh(std::max(t, 0.0)) / s.kappa);
        break;
      }
      case Regime::linear:
        if (s.b != 0.0) accept(-s.a / s.b);
        break;
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double r : out)
    if (uniq.empty() || r - uniq.back() > 1e-12 * (1.0 + r)) uniq.push_back(r);
  return uniq;
}

int ExactPiecewiseSolution::count_zeros(double r) const {
  const auto z = zeros(r);
  return static_cast<int>(std::count_if(z.begin(), z.end(), [r](double x) { return x < r; }));
}

double ExactPiecewiseSolution::phase_shift() const {
  if (!(energy_ > 0.0)) throw InputError("phase shift needs E > 0");
  const auto& tail = segments_.back();
  const double k = tail.kappa;
  return reduce_half_pi(std::atan2(k * tail.a, tail.b) - k * tail.start);
}

double exact_phase_shift(const PiecewiseConstantPotential& potential, double k) {
  if (!(k > 0.0)) throw InputError("phase shift needs k > 0");
  return ExactPiecewiseSolution(potential, k * k).phase_shift();
}

// ---------------------------------------------------------------------------
// Zeros.

ZeroSet find_zeros(const Potential& potential, AngularParameter ang, double E, double r_max,
                   const SolverOptions& options) {
  if (!(r_max > 0.0)) throw InputError("find_zeros: r_max must be positive");
  ZeroSet zs;
  if (use_exact(potential, ang, options)) {
    zs.backend = Backend::exact;
    zs.radii = ExactPiecewiseSolution(as_piecewise(potential), E).zeros(r_max);
    zs.degenerate.assign(zs.radii.size(), false);
    return zs;
  }
  check_tol(options.tol);
  zs.backend = Backend::numeric;
  const auto traj = integrate_regular(potential, ang, E, r_max, options.tol);
  if (traj.truncated_at) throw RangeError("find_zeros: step limit reached");
  ZeroScanner scanner;
  for (const auto& st : traj.steps)
    scanner.scan(st, [&](double z, bool deg) {
      zs.radii.push_back(z);
      zs.degenerate.push_back(deg);
    });
  return zs;
}

double nth_zero(const Potential& potential, AngularParameter ang, double E, int n,
                const SolverOptions& options) {
  if (n < 1) throw InputError("nth_zero: n must be >= 1");
  const double ceiling = options.r_ceiling;
  double target = std::max(8.0, 2.0 * potential.support_radius());
  if (use_exact(potential, ang, options)) {
    const ExactPiecewiseSolution sol(as_piecewise(potential), E);
    for (;; target *= 2.0) {
      const double lim = std::min(target, ceiling);
      const auto z = sol.zeros(lim);
      if (static_cast<int>(z.size()) >= n) return z[static_cast<std::size_t>(n) - 1];
      if (lim >= ceiling) throw ZeroBeyondRange(n, ceiling);
    }
  }
  check_tol(options.tol);
  Equation eq{potential, ang.centrifugal(), E};
  const SeriesStart s = series_start(potential, ang, E, options.tol);
  ode::State state = start_state(s, ang);
  ode::Options opts;
  opts.tol = options.tol;
  opts.max_steps = options.max_steps;
  ZeroScanner scanner;
  int found = 0;
  double result = 0.0;
  for (;; target *= 2.0) {
    const double lim = std::min(target, ceiling);
    const auto reason = ode::integrate(
        [&](double r) { return eq.q(r); }, [&](double r) { return eq.q_left(r); },
        potential.discontinuities(), state, lim, opts, [&](const ode::Step& st) {
          scanner.scan(st, [&](double z, bool) {
            if (++found == n) result = z;
          });
          return found < n;
        });
    if (found >= n) return result;
    if (reason == ode::StopReason::step_limit) throw ZeroBeyondRange(n, state.r);
    if (lim >= ceiling) throw ZeroBeyondRange(n, ceiling);
  }
}

// ---------------------------------------------------------------------------
// Dirichlet problems: the n-th zero pinned at r.

namespace {

struct EndState {
  int zeros_inside = 0;
  double y = 0.0, dy = 0.0;  // common positive scale factor dropped
  double w = 1.0;            // local wavenumber scale at r (left limit)
};

EndState end_state(const Potential& potential, AngularParameter ang, double E, double r,
                   const SolverOptions& options) {
  if (!(r > 0.0)) throw InputError("dirichlet_probe: r must be positive");
  EndState out;
  const double q_end = left_value(potential, r) + ang.centrifugal() / (r * r) - E;
  out.w = std::sqrt(std::max(std::abs(q_end), 1e-8));
  if (use_exact(potential, ang, options)) {
    const ExactPiecewiseSolution sol(as_piecewise(potential), E);
    out.zeros_inside = sol.count_zeros(r);
    double s1 = 0.0, s2 = 0.0;
    out.y = sol.scaled_value(r, s1);
    out.dy = sol.scaled_derivative(r, s2);
    return out;
  }
  check_tol(options.tol);
  const SeriesStart s = series_start(potential, ang, E, options.tol);
  if (r <= s.r0) {
    const double p = ang.lambda + 0.5;
    out.y = r * (1.0 + s.coeff * r * r);
    out.dy = p * (1.0 + s.coeff * r * r) + 2.0 * s.coeff * r * r;
    return out;
  }
  Equation eq{potential, ang.centrifugal(), E};
  ode::State state = start_state(s, ang);
  ode::Options opts;
  opts.tol = options.tol;
  opts.max_steps = options.max_steps;
  ZeroScanner scanner;
  int count = 0;
  const auto reason = ode::integrate(
      [&](double x) { return eq.q(x); }, [&](double x) { return eq.q_left(x); },
      potential.discontinuities(), state, r, opts, [&](const ode::Step& st) {
        scanner.scan(st, [&](double z, bool) {
          if (z < r) ++count;
        });
        return true;
      });
  if (reason == ode::StopReason::step_limit) throw RangeError("dirichlet_probe: step limit");
  out.zeros_inside = count;
  out.y = state.y;
  out.dy = state.dy;
  return out;
}

}  // namespace

DirichletProbe dirichlet_probe(const Potential& potential, AngularParameter ang, double E,
                               double r, const SolverOptions& options) {
  const EndState e = end_state(potential, ang, E, r, options);
  return {e.zeros_inside, e.y / std::hypot(e.y, e.dy / e.w)};
}

double dirichlet_energy(const Potential& potential, AngularParameter ang, int n, double r,
                        const SolverOptions& options, std::optional<double> seed) {
  if (n < 1) throw InputError("dirichlet_energy: n must be >= 1");
  auto probe = [&](double E) { return dirichlet_probe(potential, ang, E, r, options); };
  // below min V the solution has no zeros at all
  const double floor_E = potential.lower_bound() - 1e-9 * (1.0 + std::abs(potential.lower_bound()));

  double lo, hi;
  DirichletProbe plo, phi;
  if (seed) {
    double d = 1e-3 * (1.0 + std::abs(*seed));
    lo = std::max(*seed - d, floor_E);
    hi = std::max(*seed + d, lo + d);
    plo = probe(lo);
    while (plo.zeros_inside >= n && lo > floor_E) {
      d *= 2.0;
      lo = std::max(lo - d, floor_E);
      plo = probe(lo);
    }
    phi = probe(hi);
    while (phi.zeros_inside < n) {
      d *= 2.0;
      hi += d;
      phi = probe(hi);
      if (hi > 1e12) throw RangeError("dirichlet_energy: no bracket");
    }
  } else {
    lo = floor_E;
    plo = probe(lo);
    const double base = (n * kPi + ang.lambda) / r;
    hi = potential.upper_bound() + base * base + 1.0;
    phi = probe(hi);
    while (phi.zeros_inside < n) {
      hi = lo + 2.0 * (hi - lo);
      phi = probe(hi);
      if (hi > 1e12) throw RangeError("dirichlet_energy: no bracket");
    }
  }
  if (plo.zeros_inside >= n) throw RangeError("dirichlet_energy: zero count at V_min too high");

  for (int it = 0; it < 200 && !(plo.zeros_inside == n - 1 && phi.zeros_inside == n); ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto pm = probe(mid);
    if (pm.zeros_inside >= n) {
      hi = mid;
      phi = pm;
    } else {
      lo = mid;
      plo = pm;
    }
  }
  return bracketed_root([&](double E) { return probe(E).normalized_value; }, lo, hi,
                        plo.normalized_value, phi.normalized_value);
}

double dirichlet_lambda(const Potential& potential, double E, int n, double r, double lambda_min,
                        const SolverOptions& options, std::optional<double> seed) {
  if (n < 1) throw InputError("dirichlet_lambda: n must be >= 1");
  auto probe = [&](double lam) {
    return dirichlet_probe(potential, AngularParameter(lam), E, r, options);
  };
  // zero count is non-increasing in lambda: lo has >= n zeros, hi fewer
  double lo = lambda_min, hi;
  DirichletProbe plo, phi;
  if (seed && *seed > lambda_min) {
    double d = 1e-3 * (1.0 + *seed);
    lo = std::max(*seed - d, lambda_min);
    plo = probe(lo);
    while (plo.zeros_inside < n && lo > lambda_min) {
      d *= 2.0;
      lo = std::max(lo - d, lambda_min);
      plo = probe(lo);
    }
    hi = *seed + d;
  } else {
    plo = probe(lo);
    hi = lo + 1.0;
  }
  if (plo.zeros_inside < n)
    throw RangeError("dirichlet_lambda: fewer than n zeros inside r at lambda_min");
  phi = probe(hi);
  for (double d = hi - lo; phi.zeros_inside >= n; d *= 2.0) {
    hi += d;
    phi = probe(hi);
    if (hi > 1e6) throw RangeError("dirichlet_lambda: no bracket");
  }
  for (int it = 0; it < 200 && !(plo.zeros_inside == n && phi.zeros_inside == n - 1); ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto pm = probe(mid);
    if (pm.zeros_inside >= n) {
      lo = mid;
      plo = pm;
    } else {
      hi = mid;
      phi = pm;
    }
  }
  return bracketed_root([&](double lam) { return probe(lam).normalized_value; }, lo, hi,
                        plo.normalized_value, phi.normalized_value);
}

// ---------------------------------------------------------------------------
// Phase shifts.

double matching_radius(const Potential& potential, double tol) {
  return std::max(1.0, potential.support_radius(1e-2 * tol));
}

double phase_shift(const Potential& potential, int ell, double k, double r_match,
                   const SolverOptions& options) {
  if (ell < 0) throw InputError("phase_shift: ell must be >= 0");
  if (!(k > 0.0)) throw InputError("phase_shift: k must be positive");
  const auto ang = AngularParameter::from_ell(ell);
  if (potential.is_zero()) return 0.0;
  if (ell == 0 && use_exact(potential, ang, options))
    return exact_phase_shift(as_piecewise(potential), k);
  check_tol(options.tol);
  if (!(r_match > 0.0)) r_match = matching_radius(potential, options.tol);

  const double E = k * k;
  Equation eq{potential, ang.centrifugal(), E};
  const SeriesStart s = series_start(potential, ang, E, options.tol);
  ode::State state = start_state(s, ang);
  ode::Options opts;
  opts.tol = options.tol;
  opts.max_steps = options.max_steps;
  const auto reason = ode::integrate([&](double x) { return eq.q(x); },
                                     [&](double x) { return eq.q_left(x); },
                                     potential.discontinuities(), state, r_match, opts,
                                     [](const ode::Step&) { return true; });
  if (reason == ode::StopReason::step_limit) throw RangeError("phase_shift: step limit");

  // Wronskians with the free solutions: psi ~ cos(d) jhat - sin(d) nhat.
  const auto rb = riccati_bessel(ell, k * r_match);
  const auto l = static_cast<std::size_t>(ell);
  const double y = state.y, dyk = state.dy / k;
  const double a = y * rb.dn[l] - dyk * rb.n[l];
  const double b = rb.j[l] * dyk - rb.dj[l] * y;
  return reduce_half_pi(std::atan2(-b, a));
}

std::vector<double> phase_shift_branch(const Potential& potential, int ell,
                                       const std::vector<double>& k_grid,
                                       const SolverOptions& options) {
  std::vector<std::size_t> order(k_grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return k_grid[i] > k_grid[j]; });
  std::vector<double> out(k_grid.size());
  const double r_match = matching_radius(potential, options.tol);
  double prev = 0.0;
  for (std::size_t i : order) {
    const double d = phase_shift(potential, ell, k_grid[i], r_match, options);
    out[i] = d + kPi * std::round((prev - d) / kPi);
    prev = out[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> bound_states(const Potential& potential, int ell, double E_lo, double E_hi,
                                 const SolverOptions& options) {
  if (!(E_hi < 0.0) || !(E_lo < E_hi)) throw InputError("bound_states: need E_lo < E_hi < 0");
  if (potential.is_zero()) return {};
  const auto ang = AngularParameter::from_ell(ell);
  const double R = std::min(options.r_ceiling,
                            matching_radius(potential, 1e-12) + 40.0 / std::sqrt(-E_hi));
  auto probe = [&](double E) { return dirichlet_probe(potential, ang, E, R, options); };
  auto plo0 = probe(E_lo);
  auto phi0 = probe(E_hi);
  std::vector<double> out;
  for (int j = plo0.zeros_inside + 1; j <= phi0.zeros_inside; ++j) {
    double lo = E_lo, hi = E_hi;
    auto plo = plo0, phi = phi0;
    // narrow to a bracket where the count steps from j-1 to j
    for (int it = 0; it < 200 && !(plo.zeros_inside == j - 1 && phi.zeros_inside == j); ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto pm = probe(mid);
      if (pm.zeros_inside >= j) {
        hi = mid;
        phi = pm;
      } else {
        lo = mid;
        plo = pm;
      }
    }
    // log-derivative matching to the decaying tail: psi' + kappa psi = 0
    auto match = [&](double E) {
      const auto e = end_state(potential, ang, E, R, options);
      return (e.dy + std::sqrt(-E) * e.y) / std::hypot(e.y, e.dy / e.w);
    };
    const double mlo = match(lo), mhi = match(hi);
    double e;
    if ((mlo > 0.0) != (mhi > 0.0))
      e = bracketed_root(match, lo, hi, mlo, mhi);
    else
      e = bracketed_root([&](double E) { return probe(E).normalized_value; }, lo, hi,
                         plo.normalized_value, phi.normalized_value);
    out.push_back(e);
  }
  return out;
}

}  // namespace zeroinv
