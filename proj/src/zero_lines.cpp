#include "zeroinv/zero_lines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

// pchip.hpp in Boost 1.74 calls isnan unqualified; the global declaration
// from <math.h> makes it resolvable.
#include <math.h>  // NOLINT(modernize-deprecated-headers)

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "zeroinv/errors.hpp"

namespace zeroinv {

namespace {

Backend backend_for(const Potential& p, AngularParameter ang, const SolverOptions& o) {
  if (o.backend == Backend::numeric) return Backend::numeric;
  return exact_backend_applies(p, ang) ? Backend::exact : Backend::numeric;
}

std::optional<double> extrapolate(const std::vector<double>& x, const std::vector<double>& y,
                                  double at) {
  const std::size_t m = y.size();
  if (m == 0) return std::nullopt;
  if (m == 1) return y.back();
  const double slope = (y[m - 1] - y[m - 2]) / (x[m - 1] - x[m - 2]);
  return y[m - 1] + slope * (at - x[m - 1]);
}

}  // namespace

ZeroLine trace_fixed_l(const Potential& potential, int n, AngularParameter ell0,
                       const std::vector<double>& E_grid, const SolverOptions& options) {
  if (n < 1) throw InputError("trace: n must be >= 1");
  for (std::size_t i = 1; i < E_grid.size(); ++i)
    if (!(E_grid[i] < E_grid[i - 1])) throw InputError("trace: energy grid must be descending");
  ZeroLine line;
  line.n = n;
  line.ell0 = ell0;
  const Backend b = backend_for(potential, ell0, options);
  for (double E : E_grid) {
    double r;
    try {
      r = nth_zero(potential, ell0, E, n, options);
    } catch (const ZeroBeyondRange&) {
      line.truncated_at = E;
      break;
    }
    if (!line.r.empty() && !(r > line.r.back()))
      throw InvariantViolation("trace: zero line not monotone at E=" + std::to_string(E));
    line.E.push_back(E);
    line.r.push_back(r);
    line.backend.push_back(b);
  }
  return line;
}

ZeroLine trace_fixed_l_radius(const Potential& potential, int n, AngularParameter ell0,
                              const std::vector<double>& r_grid, const SolverOptions& options) {
  if (n < 1) throw InputError("trace: n must be >= 1");
  for (std::size_t i = 0; i < r_grid.size(); ++i)
    if (!(r_grid[i] > 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1])))
      throw InputError("trace: radius grid must be positive and ascending");
  ZeroLine line;
  line.n = n;
  line.ell0 = ell0;
  const Backend b = backend_for(potential, ell0, options);
  for (double r : r_grid) {
    const double E =
        dirichlet_energy(potential, ell0, n, r, options, extrapolate(line.r, line.E, r));
    if (!line.E.empty() && !(E < line.E.back()))
      throw InvariantViolation("trace: energy not decreasing at r=" + std::to_string(r));
    line.E.push_back(E);
    line.r.push_back(r);
    line.backend.push_back(b);
  }
  return line;
}

std::vector<double> asymptote_grid(double E_start, double asymptote, double closest, int count) {
  if (!(E_start > asymptote) || !(closest > 0.0) || count < 2 ||
      !(closest < E_start - asymptote))
    throw InputError("asymptote_grid: need E_start - asymptote > closest > 0 and count >= 2");
  std::vector<double> out;
  const double span = E_start - asymptote;
  for (int i = 0; i < count; ++i)
    out.push_back(asymptote + span * std::pow(closest / span, double(i) / (count - 1)));
  return out;
}

MixedZeroLine trace_mixed(const Potential& potential, int n, AngularParameter ell0, double E0,
                          double E_max, double lambda_max, int samples,
                          const SolverOptions& options) {
  if (!(E0 > 0.0) || !(E_max > E0) || !(lambda_max > ell0.lambda) || samples < 2)
    throw InputError("trace_mixed: need 0 < E0 < E_max, lambda_max > lambda0, samples >= 2");
  MixedZeroLine line;
  line.n = n;
  line.ell0 = ell0;
  line.E0 = E0;
  line.r0 = nth_zero(potential, ell0, E0, n, options);

  std::vector<double> grid;
  const double u0 = 1.0 / std::sqrt(E_max), u1 = 1.0 / std::sqrt(E0);
  for (int i = 0; i < samples - 1; ++i) {
    const double u = u0 + (u1 - u0) * i / (samples - 1);
    grid.push_back(1.0 / (u * u));
  }
  const ZeroLine part = trace_fixed_l(potential, n, ell0, grid, options);
  if (part.truncated_at) throw RangeError("trace_mixed: energy part truncated");
  line.E = part.E;
  line.rE = part.r;
  if (!line.rE.empty() && !(line.r0 > line.rE.back()))
    throw InvariantViolation("trace_mixed: energy part not monotone at the junction");
  line.E.push_back(E0);
  line.rE.push_back(line.r0);

  line.lambda.push_back(ell0.lambda);
  line.rL.push_back(line.r0);
  for (int i = 1; i < samples; ++i) {
    const double lam = ell0.lambda + (lambda_max - ell0.lambda) * i / (samples - 1);
    const double r = nth_zero(potential, AngularParameter(lam), E0, n, options);
    if (!(r > line.rL.back()))
      throw InvariantViolation("trace_mixed: lambda part not increasing at lambda=" +
                               std::to_string(lam));
    line.lambda.push_back(lam);
    line.rL.push_back(r);
  }
  return line;
}

MixedZeroLine trace_mixed_radius(const Potential& potential, int n, AngularParameter ell0,
                                 double E0, double r_min, double r_max, double h,
                                 const SolverOptions& options) {
  if (!(E0 > 0.0) || !(r_min > 0.0) || !(r_max > r_min) || !(h > 0.0))
    throw InputError("trace_mixed_radius: need E0 > 0, 0 < r_min < r_max, h > 0");
  MixedZeroLine line;
  line.n = n;
  line.ell0 = ell0;
  line.E0 = E0;
  line.r0 = nth_zero(potential, ell0, E0, n, options);
  if (!(line.r0 > r_min && line.r0 < r_max))
    throw InputError("trace_mixed_radius: junction r0=" + std::to_string(line.r0) +
                     " outside the radius range");

  const double gap = 1e-9 * (1.0 + line.r0);
  std::vector<double> rE, rL;
  const auto count = static_cast<long>(std::floor((r_max - r_min) / h + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double r = r_min + static_cast<double>(i) * h;
    if (r < line.r0 - gap) rE.push_back(r);
    else if (r > line.r0 + gap) rL.push_back(r);
  }

  const ZeroLine part = trace_fixed_l_radius(potential, n, ell0, rE, options);
  line.E = part.E;
  line.rE = part.r;
  if (!line.E.empty() && !(line.E.back() > E0))
    throw InvariantViolation("trace_mixed_radius: energy part not monotone at the junction");
  line.E.push_back(E0);
  line.rE.push_back(line.r0);

  line.lambda.push_back(ell0.lambda);
  line.rL.push_back(line.r0);
  for (double r : rL) {
    const double lam = dirichlet_lambda(potential, E0, n, r, ell0.lambda, options,
                                        extrapolate(line.rL, line.lambda, r));
    if (!(lam > line.lambda.back()))
      throw InvariantViolation("trace_mixed_radius: lambda not increasing at r=" +
                               std::to_string(r));
    line.lambda.push_back(lam);
    line.rL.push_back(r);
  }
  return line;
}

// ---------------------------------------------------------------------------

FreeReference::FreeReference(int n, AngularParameter ell0) {
  const double j = boost::math::cyl_bessel_j_zero(ell0.lambda, n);
  j2 = j * j;
}

double FreeReference::derivative(double r, int k) const {
  // d^k/dr^k r^-2 = (-1)^k (k+1)! r^{-2-k}
  double f = 1.0;
  for (int i = 2; i <= k + 1; ++i) f *= i;
  return (k % 2 == 0 ? 1.0 : -1.0) * f * j2 * std::pow(r, -2.0 - k);
}

namespace {

std::shared_ptr<const std::function<double(double)>> make_interp(std::vector<double> x,
                                                                 std::vector<double> y) {
  if (x.size() >= 4) {
    auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(x), std::move(y));
    return std::make_shared<const std::function<double(double)>>(
        [p](double t) { return (*p)(t); });
  }
  return std::make_shared<const std::function<double(double)>>(
      [x = std::move(x), y = std::move(y)](double t) -> double {
        if (x.size() == 1) return y[0];
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1,
                                                x.size() - 1);
        const double u = (t - x[i - 1]) / (x[i] - x[i - 1]);
        return (1.0 - u) * y[i - 1] + u * y[i];
      });
}

// Exact sample value when r hits a knot.
std::optional<double> knot_value(const std::vector<double>& x, const std::vector<double>& y,
                                 double r) {
  auto it = std::lower_bound(x.begin(), x.end(), r);
  if (it != x.end() && *it == r) return y[static_cast<std::size_t>(it - x.begin())];
  return std::nullopt;
}

}  // namespace

InverseLine::InverseLine(const ZeroLine& line) : n_(line.n), ell0_(line.ell0) {
  if (line.r.empty()) throw InputError("inverse line: empty zero line");
  energy_r_.assign(line.r.begin(), line.r.end());
  energy_values_.assign(line.E.begin(), line.E.end());
  build();
}

InverseLine::InverseLine(const MixedZeroLine& line)
    : n_(line.n), ell0_(line.ell0), E0_(line.E0), junction_(line.r0) {
  if (line.rE.empty() || line.rL.empty()) throw InputError("inverse line: empty mixed line");
  energy_r_ = line.rE;
  energy_values_ = line.E;
  lambda_r_ = line.rL;
  lambda_values_ = line.lambda;
  build();
}

void InverseLine::build() {
  for (std::size_t i = 1; i < energy_r_.size(); ++i)
    if (!(energy_r_[i] > energy_r_[i - 1]) || !(energy_values_[i] < energy_values_[i - 1]))
      throw InvariantViolation("inverse line: energy part not strictly monotone");
  for (std::size_t i = 1; i < lambda_r_.size(); ++i)
    if (!(lambda_r_[i] > lambda_r_[i - 1]) || !(lambda_values_[i] > lambda_values_[i - 1]))
      throw InvariantViolation("inverse line: lambda part not strictly monotone");
  reference_ = FreeReference(n_, ell0_);
  e_interp_ = make_interp(energy_r_, energy_values_);
  if (!lambda_r_.empty()) l_interp_ = make_interp(lambda_r_, lambda_values_);
}

double InverseLine::r_min() const { return energy_r_.front(); }
double InverseLine::r_max() const {
  return lambda_r_.empty() ? energy_r_.back() : lambda_r_.back();
}

InverseLine::Value InverseLine::operator()(double r) const {
  if (!contains(r))
    throw RangeError("inverse line: r=" + std::to_string(r) + " outside [" +
                     std::to_string(r_min()) + ", " + std::to_string(r_max()) + "]");
  if (!mixed() || r <= junction_) {
    if (auto v = knot_value(energy_r_, energy_values_, r)) return {ParamKind::energy, *v};
    return {ParamKind::energy, (*e_interp_)(r)};
  }
  if (auto v = knot_value(lambda_r_, lambda_values_, r)) return {ParamKind::lambda, *v};
  return {ParamKind::lambda, (*l_interp_)(r)};
}

double InverseLine::energy(double r) const {
  const auto v = (*this)(r);
  if (v.kind != ParamKind::energy) throw RangeError("inverse line: r lies on the lambda part");
  return v.value;
}

double InverseLine::lambda(double r) const {
  const auto v = (*this)(r);
  if (v.kind != ParamKind::lambda) throw RangeError("inverse line: r lies on the energy part");
  return v.value;
}

numerics::DerivativeEstimate one_sided_derivatives(const InverseLine& line, double r, Side side,
                                                   int window, int degree) {
  if (window < degree + 2) throw InputError("one_sided_derivatives: window too small for degree");
  const bool use_lambda = line.mixed() && (r > line.junction() ||
                                           (r == line.junction() && side == Side::right));
  const auto& xs = use_lambda ? line.lambda_r() : line.energy_r();
  const auto& ys = use_lambda ? line.lambda_values() : line.energy_values();

  std::vector<double> x, y;
  if (side == Side::left) {
    auto it = std::lower_bound(xs.begin(), xs.end(), r);
    const auto have = it - xs.begin();
    if (have < window)
      throw InputError("one_sided_derivatives: left side has " + std::to_string(have) +
                       " samples, need " + std::to_string(window));
    for (auto j = have - window; j < have; ++j) {
      x.push_back(xs[static_cast<std::size_t>(j)]);
      y.push_back(ys[static_cast<std::size_t>(j)]);
    }
  } else {
    auto it = std::upper_bound(xs.begin(), xs.end(), r);
    const auto start = it - xs.begin();
    const auto have = static_cast<long>(xs.size()) - start;
    if (have < window)
      throw InputError("one_sided_derivatives: right side has " + std::to_string(have) +
                       " samples, need " + std::to_string(window));
    for (auto j = start; j < start + window; ++j) {
      x.push_back(xs[static_cast<std::size_t>(j)]);
      y.push_back(ys[static_cast<std::size_t>(j)]);
    }
  }
  if (!use_lambda)
    for (std::size_t i = 0; i < x.size(); ++i) y[i] -= line.reference().value(x[i]);
  auto d = numerics::fit_derivatives(x, y, degree, r);
  if (!use_lambda) {
    d.d1 += line.reference().derivative(r, 1);
    d.d2 += line.reference().derivative(r, 2);
    d.d3 += line.reference().derivative(r, 3);
  }
  return d;
}

SpectralDatum spectral_data(const ZeroLine& line, double R, int window) {
  const InverseLine inv(line);
  SpectralDatum out;
  out.R = R;
  out.E_star = inv.energy(R);
  // centered fit on the samples nearest R
  const auto& xs = inv.energy_r();
  const auto& ys = inv.energy_values();
  if (static_cast<int>(xs.size()) < window)
    throw InputError("spectral_data: line has fewer samples than the window");
  auto it = std::lower_bound(xs.begin(), xs.end(), R);
  long lo = static_cast<long>(it - xs.begin()) - window / 2;
  lo = std::clamp(lo, 0L, static_cast<long>(xs.size()) - window);
  std::vector<double> x, y;
  for (long j = lo; j < lo + window; ++j) {
    const auto i = static_cast<std::size_t>(j);
    x.push_back(xs[i]);
    y.push_back(ys[i] - inv.reference().value(xs[i]));
  }
  const int degree = std::min(4, window - 2);
  const auto d = numerics::fit_derivatives(x, y, degree, R);
  const double slope = d.d1 + inv.reference().derivative(R, 1);
  out.rho = -1.0 / slope;
  if (!(out.rho > 0.0) || !std::isfinite(out.rho))
    throw InvariantViolation("spectral_data: non-positive normalization constant at R=" +
                             std::to_string(R));
  return out;
}

Distinction lines_distinguish(const Potential& A, const Potential& B, int n,
                              AngularParameter ell0, const std::vector<double>& E_grid,
                              double tol, const SolverOptions& options) {
  auto zero = [&](const Potential& p, double E) {
    try {
      return nth_zero(p, ell0, E, n, options);
    } catch (const ZeroBeyondRange&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  for (double E : E_grid) {
    const double ra = zero(A, E), rb = zero(B, E);
    const bool na = std::isnan(ra), nb = std::isnan(rb);
    if (na && nb) continue;
    if (na != nb || std::abs(ra - rb) > tol) return {true, E, ra, rb};
  }
  return {};
}

}  // namespace zeroinv
