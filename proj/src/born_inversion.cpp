#include "zeroinv/born_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "zeroinv/numerics.hpp"
#include "zeroinv/riccati_bessel.hpp"

namespace zeroinv {

namespace {

using std::numbers::pi;

// int_R^inf e^{-mu r} sin^2(k r) dr, times e^{mu R}.
double exp_sin2_tail(double mu, double k, double R) {
  const double w = 2.0 * k;
  return 0.5 / mu - 0.5 * (mu * std::cos(w * R) - w * std::sin(w * R)) / (mu * mu + w * w);
}

// Points where the integrand may lose smoothness, plus the end of the
// numerically relevant range.
std::vector<double> pieces(const Potential& potential, double R) {
  std::vector<double> pts{0.0};
  for (double a : potential.discontinuities())
    if (a < R) pts.push_back(a);
  if (auto* s = potential.get_if<SampledPotential>())
    for (double g : s->grid())
      if (g > 0.0 && g < R) pts.push_back(g);
  pts.push_back(R);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct BornRange {
  double R = 0.0;
  double tail_mu = 0.0;  // 0: compact support, nothing beyond R
};

BornRange born_range(const Potential& potential) {
  BornRange out;
  if (potential.is_zero()) return out;
  const double scale = std::max(std::abs(potential.lower_bound()), std::abs(potential.upper_bound()));
  if (potential.get_if<PiecewiseConstantPotential>() || potential.get_if<SampledPotential>()) {
    out.R = potential.support_radius(0.0);
    return out;
  }
  out.R = potential.support_radius(1e-13 * scale);
  if (out.R <= 0.0) return out;
  const double step = std::min(1.0, 0.5 * out.R);
  const double v1 = std::abs(potential(out.R - step));
  const double v2 = std::abs(potential(out.R));
  if (v2 == 0.0) return out;
  if (!(v1 > v2))
    throw RangeError("Born phase: V does not decay beyond r=" + std::to_string(out.R) +
                     "; check the integrability conditions");
  out.tail_mu = std::log(v1 / v2) / step;
  return out;
}

template <class F>
double born_integral(const Potential& potential, double k, int ell, F&& weight) {
  const BornRange range = born_range(potential);
  if (range.R <= 0.0) return 0.0;
  const auto pts = pieces(potential, range.R);
  const double width = std::min(pi / (4.0 * k), 0.5);
  const auto f = [&](double r) { return weight(r) * potential(r); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += numerics::integrate_panels(f, pts[i], pts[i + 1], width);
  if (range.tail_mu > 0.0) {
    // Beyond the turning point jhat^2 oscillates like sin^2; inside it the
    // weight is tiny and the tail is V(R) jhat(kR)^2 / mu at most.
    const double kr = k * range.R;
    const double tail = kr * kr > ell * (ell + 1.0) ? exp_sin2_tail(range.tail_mu, k, range.R)
                                                   : weight(range.R) / range.tail_mu;
    total += potential(range.R) * tail;
  }
  return total;
}

void check_k(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InputError("Born phase: k must be positive");
}

}  // namespace

double born_phase_swave(const Potential& potential, double k) {
  check_k(k);
  return -born_integral(potential, k, 0, [k](double r) {
           const double s = std::sin(k * r);
           return s * s;
         }) /
         k;
}

double born_phase_partial(const Potential& potential, int ell, double k) {
  check_k(k);
  if (ell < 0) throw InputError("Born phase: ell must be >= 0");
  if (ell == 0) return born_phase_swave(potential, k);
  return -born_integral(potential, k, ell, [ell, k](double r) {
           const double j = riccati_j(ell, k * r)[static_cast<std::size_t>(ell)];
           return j * j;
         }) /
         k;
}

void PhaseShiftDataset::validate() const {
  if (!(k0 > 0.0)) throw InputError("phase-shift data: k0 must be positive");
  for (std::size_t i = 0; i < fixed_l_branch.size(); ++i) {
    if (i == 0 && std::abs(fixed_l_branch[0].k - k0) > 1e-9 * k0)
      throw InputError("phase-shift data: the k branch must start at k0");
    if (i > 0 && !(fixed_l_branch[i].k > fixed_l_branch[i - 1].k))
      throw InputError("phase-shift data: k must increase");
    // a branch cut left in the data: differentiating it would produce a spike
    if (i > 0 && std::abs(fixed_l_branch[i].delta - fixed_l_branch[i - 1].delta) > pi / 2)
      throw InputError("phase-shift data: delta jumps by more than pi/2 at k=" +
                       std::to_string(fixed_l_branch[i].k));
  }
  for (std::size_t i = 0; i < fixed_E_branch.size(); ++i)
    if (fixed_E_branch[i].ell != ell0 + static_cast<int>(i))
      throw InputError("phase-shift data: ell values must be consecutive from ell0");
}

PhaseShiftDataset make_dataset(const Potential& potential, double k0, double k_max, double dk,
                               int L_max, PhaseSource source, const SolverOptions& options) {
  if (!(k0 > 0.0) || !(k_max >= k0) || !(dk > 0.0) || L_max < 0)
    throw InputError("make_dataset: need 0 < k0 <= k_max, dk > 0, L_max >= 0");
  PhaseShiftDataset d;
  d.k0 = k0;
  d.source = source;
  const auto count = static_cast<long>(std::floor((k_max - k0) / dk + 1e-9));
  std::vector<double> ks;
  for (long i = 0; i <= count; ++i) ks.push_back(k0 + static_cast<double>(i) * dk);

  if (source == PhaseSource::born) {
    for (double k : ks) d.fixed_l_branch.push_back({k, born_phase_swave(potential, k)});
    for (int l = 0; l <= L_max; ++l) d.fixed_E_branch.push_back({l, born_phase_partial(potential, l, k0)});
  } else {
    const auto deltas = phase_shift_branch(potential, 0, ks, options);
    for (std::size_t i = 0; i < ks.size(); ++i) d.fixed_l_branch.push_back({ks[i], deltas[i]});
    for (int l = 0; l <= L_max; ++l)
      d.fixed_E_branch.push_back({l, phase_shift(potential, l, k0, 0.0, options)});
  }
  return d;
}

// ---------------------------------------------------------------------------

double exponential_sine_transform(double v0, double mu, double q) {
  const double s = mu * mu + q * q;
  return 2.0 * v0 * mu * q / (s * s);
}

SineProfile analytic_profile(double v0, double mu, const std::vector<double>& q) {
  SineProfile p;
  p.q = q;
  for (double x : q) {
    p.g.push_back(exponential_sine_transform(v0, mu, x));
    p.region.push_back(Region::analytic);
  }
  return p;
}

SineProfile g_high(const PhaseShiftDataset& data) {
  data.validate();
  if (data.ell0 != 0) throw InputError("g_high: unsupported ell0 (the k-derivative route is s-wave only)");
  const auto& b = data.fixed_l_branch;
  if (b.size() < 9) throw InputError("g_high: need at least 9 samples on the k branch");
  std::vector<double> k(b.size()), h(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i > 0 && std::abs(b[i].delta - b[i - 1].delta) > 0.5 * pi)
      throw InvariantViolation("g_high: phase-shift branch jumps between k=" +
                               std::to_string(b[i - 1].k) + " and k=" + std::to_string(b[i].k));
    k[i] = b[i].k;
    h[i] = b[i].k * b[i].delta;
  }
  const auto smooth = numerics::smoothing_spline_gcv(k, h);
  const auto dh = numerics::local_derivative(k, smooth.fitted);
  SineProfile p;
  for (std::size_t i = 0; i < k.size(); ++i) {
    p.q.push_back(2.0 * k[i]);
    p.g.push_back(-dh[i]);
    p.region.push_back(Region::high);
  }
  return p;
}

namespace {

// log|delta_l| ~ a + b l + c ln l + d / l on the last `m` terms; empty when the
// terms do not look like a clean decaying envelope.
std::vector<double> extrapolated_tail(const std::vector<double>& delta, std::size_t m) {
  const std::size_t L = delta.size() - 1;
  if (delta.size() < m + 1) return {};
  const double sign = delta[L] > 0.0 ? 1.0 : -1.0;
  for (std::size_t l = L + 1 - m; l <= L; ++l) {
    if (delta[l] * sign <= 0.0) return {};
    if (l > L + 1 - m && std::abs(delta[l]) >= std::abs(delta[l - 1])) return {};
  }
  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), 4);
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double l = static_cast<double>(L + 1 - m + i);
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = 1.0;
    A(row, 1) = l;
    A(row, 2) = std::log(l);
    A(row, 3) = 1.0 / l;
    y(row) = std::log(std::abs(delta[L + 1 - m + i]));
  }
  const Eigen::Vector4d c = A.colPivHouseholderQr().solve(y);
  if (!(c(1) < 0.0)) return {};
  double head = 0.0;
  for (std::size_t l = 0; l <= L; ++l) head += (2.0 * l + 1.0) * std::abs(delta[l]);
  std::vector<double> tail;
  for (std::size_t l = L + 1; l < L + 20000; ++l) {
    const double x = static_cast<double>(l);
    const double t = sign * std::exp(c(0) + c(1) * x + c(2) * std::log(x) + c(3) / x);
    tail.push_back(t);
    if ((2.0 * x + 1.0) * std::abs(t) < 1e-18 * head) break;
  }
  return tail;
}

// sum_l (2l+1) d_l P_l(x), upward recurrence.
double legendre_sum(const std::vector<double>& d, double x) {
  double p0 = 1.0, p1 = x, sum = d.empty() ? 0.0 : d[0];
  if (d.size() > 1) sum += 3.0 * d[1] * x;
  for (std::size_t l = 1; l + 1 < d.size(); ++l) {
    const double lf = static_cast<double>(l);
    const double p2 = ((2.0 * lf + 1.0) * x * p1 - lf * p0) / (lf + 1.0);
    sum += (2.0 * lf + 3.0) * d[l + 1] * p2;
    p0 = p1;
    p1 = p2;
  }
  return sum;
}

}  // namespace

std::vector<double> low_grid(double k0, int count) {
  if (count < 2) throw InputError("low_grid: need at least two points");
  std::vector<double> q(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) q[static_cast<std::size_t>(i)] = 2.0 * k0 * i / (count - 1);
  q.back() = 2.0 * k0;
  return q;
}

SineProfile g_low(const PhaseShiftDataset& data, const std::vector<double>& q,
                  const LowOptions& options) {
  data.validate();
  if (data.ell0 != 0) throw InputError("g_low: unsupported ell0 (the resummation needs ell from 0)");
  if (data.fixed_E_branch.empty()) throw InputError("g_low: empty fixed-energy branch");
  const double k0 = data.k0;
  std::vector<double> delta;
  for (const auto& s : data.fixed_E_branch) delta.push_back(s.delta);
  const std::size_t L = delta.size() - 1;

  std::vector<double> full = delta, alt = delta;
  bool extrapolated = false;
  if (options.extrapolate) {
    const auto t9 = extrapolated_tail(delta, 9);
    const auto t6 = extrapolated_tail(delta, 6);
    if (!t9.empty() && !t6.empty()) {
      full.insert(full.end(), t9.begin(), t9.end());
      alt.insert(alt.end(), t6.begin(), t6.end());
      extrapolated = true;
    }
  }

  SineProfile p;
  double gmax = 0.0;
  double bound_coeff = 0.0;  // bound = bound_coeff * q / k0
  if (extrapolated) {
    const std::size_t n = std::max(full.size(), alt.size());
    for (std::size_t l = L + 1; l < n; ++l) {
      const double a = l < full.size() ? full[l] : 0.0;
      const double b = l < alt.size() ? alt[l] : 0.0;
      bound_coeff += (2.0 * l + 1.0) * std::abs(a - b);
    }
  } else if (L >= 1 && delta[L] != 0.0) {
    const double rho = std::abs(delta[L] / delta[L - 1]);
    bound_coeff = rho < 1.0 ? (2.0 * L + 1.0) * std::abs(delta[L]) * rho / (1.0 - rho)
                            : std::numeric_limits<double>::infinity();
  }

  for (double x : q) {
    if (x < 0.0 || x > 2.0 * k0 * (1.0 + 1e-12))
      throw InputError("g_low: q outside [0, 2 k0]");
    const double c = std::clamp(1.0 - x * x / (2.0 * k0 * k0), -1.0, 1.0);
    const double g = -(x / k0) * legendre_sum(full, c);
    p.q.push_back(x);
    p.g.push_back(g);
    p.region.push_back(Region::low);
    gmax = std::max(gmax, std::abs(g));
  }
  const double qmax = q.empty() ? 0.0 : *std::max_element(q.begin(), q.end());
  p.truncation_bound = bound_coeff * qmax / k0;
  if (p.truncation_bound > options.truncation_tol * gmax && gmax > 0.0) {
    std::ostringstream msg;
    msg << "g_low: truncation bound " << p.truncation_bound << " exceeds "
        << options.truncation_tol << " * max|g| at L_max=" << L << "; increase L_max";
    throw RangeError(msg.str());
  }
  return p;
}

// ---------------------------------------------------------------------------

SeamMismatch::SeamMismatch(double lo, double hi, double sc)
    : RangeError([&] {
        std::ostringstream m;
        m << "seam mismatch at q=2k0: low " << lo << ", high " << hi << " (max|g| " << sc << ")";
        return m.str();
      }()),
      low(lo), high(hi), scale(sc) {}

SineProfile assemble_g(const SineProfile& low, const SineProfile& high, double seam_tol) {
  if (low.q.empty() || high.q.empty()) throw InputError("assemble_g: empty profile");
  const double seam = high.q.front();
  if (std::abs(low.q.back() - seam) > 1e-9 * std::max(1.0, seam))
    throw InputError("assemble_g: low profile must end where the high profile begins");
  double scale = 0.0;
  for (double g : low.g) scale = std::max(scale, std::abs(g));
  for (double g : high.g) scale = std::max(scale, std::abs(g));
  const double a = low.g.back(), b = high.g.front();
  if (std::abs(a - b) > seam_tol * scale) throw SeamMismatch(a, b, scale);

  SineProfile out;
  out.q.assign(low.q.begin(), low.q.end() - 1);
  out.g.assign(low.g.begin(), low.g.end() - 1);
  out.region.assign(low.region.begin(), low.region.end() - 1);
  out.seam_index = static_cast<int>(out.q.size());
  out.q.push_back(seam);
  out.g.push_back(0.5 * (a + b));
  out.region.push_back(Region::low);
  out.q.insert(out.q.end(), high.q.begin() + 1, high.q.end());
  out.g.insert(out.g.end(), high.g.begin() + 1, high.g.end());
  out.region.insert(out.region.end(), high.region.begin() + 1, high.region.end());
  out.truncation_bound = low.truncation_bound;
  return out;
}

// ---------------------------------------------------------------------------

double default_q_max(const SineProfile& profile) {
  std::size_t peak = 0;
  for (std::size_t i = 0; i < profile.g.size(); ++i)
    if (std::abs(profile.g[i]) > std::abs(profile.g[peak])) peak = i;
  const double mu_est = std::sqrt(3.0) * profile.q[peak];
  const double q = 12.0 * mu_est;
  return q > 0.0 ? std::min(q, profile.q.back()) : profile.q.back();
}

namespace {

// (2/pi) int_0^Q sin(q r) g(q) dq on panels bounded by both the spline knots
// and the zeros of sin(q r).
double sine_integral(const numerics::CubicSpline& g, const std::vector<double>& knots, double Q,
                     double r) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  double total = 0.0;
  const double half = r > 0.0 ? pi / r : std::numeric_limits<double>::infinity();
  const auto f = [&](double q) { return std::sin(q * r) * g(q); };
  double next_zero = half;
  for (std::size_t i = 0; i + 1 < knots.size() && knots[i] < Q; ++i) {
    double lo = knots[i];
    const double hi = std::min(knots[i + 1], Q);
    while (next_zero < hi) {
      if (next_zero > lo) total += Rule::integrate(f, lo, next_zero);
      lo = next_zero;
      next_zero += half;
    }
    total += Rule::integrate(f, lo, hi);
  }
  return 2.0 / pi * total;
}

// d/dr (r V) at 0 = (2/pi) int q g dq.
double first_moment(const numerics::CubicSpline& g, const std::vector<double>& knots, double Q) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size() && knots[i] < Q; ++i)
    total += Rule::integrate([&](double q) { return q * g(q); }, knots[i], std::min(knots[i + 1], Q));
  return 2.0 / pi * total;
}

SineInversion invert_on(const SineProfile& profile, const std::vector<double>& r, double Q,
                        bool tail_correction, std::vector<std::string> warnings) {
  if (profile.q.size() < 4) throw InputError("sine inversion: need at least 4 profile samples");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw InputError("sine inversion: r grid must increase");
  const numerics::CubicSpline g(profile.q, profile.g);

  // One-term tail model g ~ A q^-p fitted on the last decade of samples.
  double gQ = g(Q), slope = 0.0;
  bool tail = tail_correction && gQ != 0.0;
  if (tail) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < profile.q.size(); ++i)
      if (profile.q[i] >= 0.8 * Q && profile.q[i] <= Q && profile.g[i] * gQ > 0.0) {
        lx.push_back(std::log(profile.q[i]));
        ly.push_back(std::log(std::abs(profile.g[i])));
      }
    if (lx.size() >= 3) {
      const auto fit = numerics::fit_polynomial(lx, ly, 1, std::log(Q), 1.0);
      const double p = -fit.derivative_at_center(1);
      if (p > 0.0) slope = -p * gQ / Q;
      else tail = false;
    } else {
      tail = false;
    }
    if (!tail) warnings.push_back("tail correction skipped: g not monotonically decaying at q_max");
  }

  SineInversion out;
  out.q_max = Q;
  out.r = r;
  std::vector<double> V(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = r[i];
    if (x <= 0.0) {
      out.rV.push_back(0.0);
      V[i] = first_moment(g, profile.q, Q);
      continue;
    }
    double rv = sine_integral(g, profile.q, Q, x);
    if (tail) {
      // Model integrated out to where q r >> 1, then the by-parts asymptotics.
      const double p = -slope * Q / gQ;
      const auto model = [&](double q) { return gQ * std::pow(q / Q, -p); };
      const double Q2 = std::max(2.0 * Q, Q + 40.0 / x);
      double t = numerics::integrate_panels([&](double q) { return std::sin(q * x) * model(q); },
                                            Q, Q2, std::min(pi / (2.0 * x), 0.25 * Q));
      const double g2 = model(Q2), d2 = -p * g2 / Q2;
      t += g2 * std::cos(Q2 * x) / x - d2 * std::sin(Q2 * x) / (x * x);
      rv += 2.0 / pi * t;
    }
    out.rV.push_back(rv);
    V[i] = rv / x;
  }
  out.warnings = std::move(warnings);
  if (!r.empty() && r.front() > 0.0) out.potential = SampledPotential(r, V);
  else if (r.size() > 1) {
    std::vector<double> rr(r.begin() + 1, r.end()), vv(V.begin() + 1, V.end());
    out.potential = SampledPotential(rr, vv);
  }
  return out;
}

}  // namespace

SineInversion invert_sine(const SineProfile& profile, const std::vector<double>& r,
                          const InvertOptions& options) {
  if (profile.q.empty()) throw InputError("invert_sine: empty profile");
  std::vector<std::string> warnings;
  double Q = options.q_max > 0.0 ? options.q_max : default_q_max(profile);
  if (Q > profile.q.back()) {
    warnings.push_back("q_max beyond the profile; clamped to " + std::to_string(profile.q.back()));
    Q = profile.q.back();
  }
  double gmax = 0.0;
  for (double x : profile.g) gmax = std::max(gmax, std::abs(x));
  const numerics::CubicSpline g(profile.q, profile.g);
  if (std::abs(g(Q)) > options.tail_tol * gmax)
    warnings.push_back("|g(q_max)| = " + std::to_string(std::abs(g(Q))) +
                       " above the tail tolerance");
  return invert_on(profile, r, Q, options.tail_correction, std::move(warnings));
}

SineInversion invert_sine_band_limited(const SineProfile& low, const std::vector<double>& r) {
  if (low.q.empty()) throw InputError("invert_sine_band_limited: empty profile");
  return invert_on(low, r, low.q.back(), false, {});
}

double relative_l2_error(const std::vector<double>& r, const std::vector<double>& approx,
                         const std::vector<double>& exact) {
  if (r.size() != approx.size() || r.size() != exact.size() || r.size() < 2)
    throw InputError("relative_l2_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double h = r[i + 1] - r[i];
    const double d0 = approx[i] - exact[i], d1 = approx[i + 1] - exact[i + 1];
    num += 0.5 * h * (d0 * d0 + d1 * d1);
    den += 0.5 * h * (exact[i] * exact[i] + exact[i + 1] * exact[i + 1]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

namespace {

double error_against(const Potential& potential, const SineInversion& inv, double lo, double hi) {
  std::vector<double> r, a, e;
  for (std::size_t i = 0; i < inv.r.size(); ++i) {
    const double x = inv.r[i];
    if (x < lo - 1e-12 || x > hi + 1e-12 || x <= 0.0) continue;
    r.push_back(x);
    a.push_back(inv.rV[i] / x);
    e.push_back(potential(x));
  }
  return relative_l2_error(r, a, e);
}

}  // namespace

PipelineResult mixed_pipeline(const Potential& potential, double k0, double k_max, int L_max,
                              const PipelineOptions& options) {
  PipelineResult res;
  std::vector<double> r = options.r;
  if (r.empty())
    for (int i = 0; i <= 790; ++i) r.push_back(0.1 + 0.01 * i);
  res.dataset = make_dataset(potential, k0, k_max, options.dk, L_max, options.source, options.solver);
  res.low = g_low(res.dataset, low_grid(k0, options.low_points), options.low);
  res.high = g_high(res.dataset);
  double scale = 0.0;
  for (double g : res.low.g) scale = std::max(scale, std::abs(g));
  for (double g : res.high.g) scale = std::max(scale, std::abs(g));
  const double gap = std::abs(res.low.g.back() - res.high.g.front());
  res.seam_mismatch = scale > 0.0 ? gap / scale : gap;
  res.profile = assemble_g(res.low, res.high, options.seam_tol);
  res.reconstruction = invert_sine(res.profile, r, options.invert);
  res.band_limited = invert_sine_band_limited(res.low, r);
  res.error = error_against(potential, res.reconstruction, options.error_r_min, options.error_r_max);
  res.band_limited_error =
      error_against(potential, res.band_limited, options.error_r_min, options.error_r_max);
  return res;
}

}  // namespace zeroinv
