#include "zeroinv/piecewise_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "zeroinv/errors.hpp"
#include "zeroinv/numerics.hpp"

namespace zeroinv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// p(x) + H(x - s) sum_{m=3}^{d} b_m (x - s)^m: C^2 at s, free third and higher
// derivatives on the right. The third-derivative jump is 6 b_3.
struct KinkFit {
  double jump3 = kNaN;
  double slope = kNaN;
  double stat_err = kNaN;
  double rss = kNaN;
};

KinkFit fit_kink(std::span<const double> x, std::span<const double> y, double s, int degree) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const int p = (degree + 1) + (degree - 2);
  if (n <= p) throw InputError("jump fit: too few samples for the kink model");
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi - s));
  scale = std::max(scale, 1e-300);
  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x[static_cast<std::size_t>(i)] - s) / scale;
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k, pw *= u) A(i, k) = pw;
    for (int m = 3; m <= degree; ++m) A(i, degree + m - 2) = u > 0.0 ? std::pow(u, m) : 0.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd c = qr.solve(b);
  KinkFit f;
  f.rss = (A * c - b).squaredNorm();
  f.jump3 = 6.0 * c(degree + 1) / (scale * scale * scale);
  f.slope = c(1) / scale;
  const double sigma2 = f.rss / static_cast<double>(std::max<Eigen::Index>(n - p, 1));
  const Eigen::MatrixXd cov = (A.transpose() * A).inverse();
  f.stat_err = 6.0 * std::sqrt(std::max(sigma2 * cov(degree + 1, degree + 1), 0.0)) /
               (scale * scale * scale);
  return f;
}

struct Part {
  std::vector<double> x, y;  // detrended
  const FreeReference* ref = nullptr;
  double ref_slope(double r) const { return ref ? ref->derivative(r, 1) : 0.0; }
};

Part make_part(const std::vector<double>& r, const std::vector<double>& p,
               const FreeReference* ref) {
  if (r.size() != p.size()) throw InputError("jump scan: r and p sizes differ");
  Part part;
  part.x = r;
  part.y = p;
  part.ref = ref;
  if (ref)
    for (std::size_t i = 0; i < r.size(); ++i) part.y[i] -= ref->value(r[i]);
  return part;
}

// Kink fit at split s using samples [lo, hi) with the degree-(d+1) variant as a
// systematic error estimate.
JumpRecord kink_record(const Part& part, std::size_t lo, std::size_t hi, double s, ParamKind kind,
                       const DetectOptions& o) {
  std::span<const double> xs(part.x.data() + lo, hi - lo), ys(part.y.data() + lo, hi - lo);
  const KinkFit f = fit_kink(xs, ys, s, o.refine_degree);
  const KinkFit g = fit_kink(xs, ys, s, o.refine_degree + 1);
  JumpRecord rec;
  rec.a = s;
  rec.kind = kind;
  rec.jump3 = f.jump3;
  rec.slope = f.slope + part.ref_slope(s);
  const double err3 = std::hypot(f.stat_err, f.jump3 - g.jump3);
  const double denom = o.coefficient * rec.slope;
  rec.deltaV = rec.jump3 / denom;
  rec.error = err3 / std::abs(denom);
  rec.confidence = err3 > 0.0 ? std::abs(rec.jump3) / err3 : std::numeric_limits<double>::infinity();
  return rec;
}

// Split point in (x[i-4], x[i+3]) minimizing the kink-model residual over
// samples [lo, hi). The residual has kinks at the samples, so a grid pass
// picks the basin before the golden-section polish.
double best_split(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo,
                  std::size_t hi, std::size_t i, int degree) {
  const std::size_t n = x.size();
  std::span<const double> xs(x.data() + lo, hi - lo), ys(y.data() + lo, hi - lo);
  auto rss = [&](double s) { return fit_kink(xs, ys, s, degree).rss; };
  const std::size_t il = std::min<std::size_t>(i, 4), ir = std::min(n - 1 - i, std::size_t{3});
  const double left = x[i - il], right = x[i + ir];
  const int steps = std::max(1, 8 * static_cast<int>(il + ir));
  const double dx = (right - left) / steps;
  double best = left, best_rss = rss(left);
  for (int q = 1; q <= steps; ++q) {
    const double v = rss(left + q * dx);
    if (v < best_rss) {
      best_rss = v;
      best = left + q * dx;
    }
  }
  double a = std::max(left, best - dx), b = std::min(right, best + dx);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = rss(c), fd = rss(d);
  for (int it = 0; it < 60 && (b - a) > 1e-10 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = rss(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = rss(d);
    }
  }
  return 0.5 * (a + b);
}

struct Coarse {
  double t, jump, err, d1, d3_left;
};

// One-sided fits on both sides of each sample boundary.
std::vector<Coarse> coarse_scan(const Part& part, const DetectOptions& o) {
  std::vector<Coarse> out;
  const auto w = static_cast<std::size_t>(o.window);
  const std::size_t n = part.x.size();
  if (n < 2 * w) return out;
  for (std::size_t i = w; i + w <= n; ++i) {
    const double t = 0.5 * (part.x[i - 1] + part.x[i]);
    std::span<const double> xl(part.x.data() + i - w, w), yl(part.y.data() + i - w, w);
    std::span<const double> xr(part.x.data() + i, w), yr(part.y.data() + i, w);
    const auto L = numerics::fit_derivatives(xl, yl, o.degree, t);
    const auto R = numerics::fit_derivatives(xr, yr, o.degree, t);
    const auto L2 = numerics::fit_derivatives(xl, yl, o.degree + 1, t);
    const auto R2 = numerics::fit_derivatives(xr, yr, o.degree + 1, t);
    Coarse c;
    c.t = t;
    c.jump = R.d3 - L.d3;
    c.err = std::sqrt(L.err3 * L.err3 + R.err3 * R.err3 + (L.d3 - L2.d3) * (L.d3 - L2.d3) +
                      (R.d3 - R2.d3) * (R.d3 - R2.d3));
    c.d1 = 0.5 * (L.d1 + R.d1) + part.ref_slope(t);
    c.d3_left = L.d3 + (part.ref ? part.ref->derivative(t, 3) : 0.0);
    out.push_back(c);
  }
  return out;
}

std::vector<JumpRecord> scan_part(const Part& part, ParamKind kind, const DetectOptions& o) {
  const auto coarse = coarse_scan(part, o);
  const auto w = static_cast<std::size_t>(o.window);
  // candidates: confident local maxima of |jump|
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double J = std::abs(coarse[i].jump);
    if (!(J > o.threshold * coarse[i].err)) continue;
    bool is_max = true;
    const std::size_t lo = i >= w ? i - w : 0, hi = std::min(coarse.size(), i + w + 1);
    for (std::size_t j = lo; j < hi && is_max; ++j)
      if (std::abs(coarse[j].jump) > J) is_max = false;
    if (is_max) cand.push_back(i);
  }
  // merge candidates closer than the window
  std::vector<std::size_t> kept;
  std::vector<bool> merged;
  for (std::size_t c : cand) {
    if (!kept.empty() && c - kept.back() <= w) {
      merged.back() = true;
      if (std::abs(coarse[c].jump) > std::abs(coarse[kept.back()].jump)) kept.back() = c;
      continue;
    }
    kept.push_back(c);
    merged.push_back(false);
  }

  std::vector<JumpRecord> out;
  const std::size_t n = part.x.size();
  const auto rw = static_cast<std::size_t>(o.refine_window);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const std::size_t i = kept[k] + w;  // first sample right of the boundary
    std::size_t lo = i >= rw ? i - rw : 0, hi = std::min(n, i + rw);
    // stay clear of neighbouring candidates
    if (k > 0) lo = std::max(lo, (kept[k - 1] + w + i) / 2);
    if (k + 1 < kept.size()) hi = std::min(hi, (kept[k + 1] + w + i) / 2);
    const double split = best_split(part.x, part.y, lo, hi, i, o.refine_degree);
    auto rec = kink_record(part, lo, hi, split, kind, o);
    rec.merged = merged[k];
    rec.accepted = rec.confidence > o.threshold;
    out.push_back(rec);
  }
  return out;
}

}  // namespace

std::vector<JumpRecord> detect_jumps(const std::vector<double>& r, const std::vector<double>& p,
                                     ParamKind kind, const DetectOptions& options,
                                     const FreeReference* reference) {
  if (options.window < options.degree + 3)
    throw InputError("detect_jumps: window must exceed degree + 2");
  return scan_part(make_part(r, p, reference), kind, options);
}

std::vector<JumpRecord> detect_jumps(const InverseLine& line, const DetectOptions& options) {
  auto out = detect_jumps(line.energy_r(), line.energy_values(), ParamKind::energy, options,
                          &line.reference());
  if (line.mixed()) {
    auto more = detect_jumps(line.lambda_r(), line.lambda_values(), ParamKind::lambda, options);
    out.insert(out.end(), more.begin(), more.end());
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  return out;
}

JumpRecord fit_jump_at(const std::vector<double>& r, const std::vector<double>& p, double a,
                       ParamKind kind, const DetectOptions& options,
                       const FreeReference* reference) {
  const Part part = make_part(r, p, reference);
  const auto it = std::lower_bound(part.x.begin(), part.x.end(), a);
  const auto i = static_cast<std::size_t>(it - part.x.begin());
  const auto rw = static_cast<std::size_t>(options.refine_window);
  const std::size_t lo = i >= rw ? i - rw : 0, hi = std::min(part.x.size(), i + rw);
  auto rec = kink_record(part, lo, hi, a, kind, options);
  rec.accepted = rec.confidence > options.threshold;
  return rec;
}

ConsistencyResult jump_consistency(const ZeroLine& line, double E_a, const DetectOptions& o,
                                   double abs_tol) {
  // samples in ascending E
  std::vector<double> E(line.E.rbegin(), line.E.rend()), r(line.r.rbegin(), line.r.rend());
  auto it = std::lower_bound(E.begin(), E.end(), E_a);
  if (it == E.begin() || it == E.end())
    throw InputError("jump_consistency: E_a outside the sampled energies");
  const auto i = static_cast<std::size_t>(it - E.begin());
  const auto rw = static_cast<std::size_t>(o.refine_window);
  if (i < rw || i + rw > E.size())
    throw InputError("jump_consistency: too few samples around E_a");
  // image point a = r(E_a)
  const double a0 = [&] {
    const double t = (E_a - E[i - 1]) / (E[i] - E[i - 1]);
    return r[i - 1] + t * (r[i] - r[i - 1]);
  }();
  // Detrend by the constant-potential line r = j / sqrt(E - c), c matched at
  // (E_a, a) and kept below every energy in the window.
  const FreeReference ref(line.n, line.ell0);
  const double j = std::sqrt(ref.j2);
  double c = E_a - ref.j2 / (a0 * a0);
  c = std::min(c, E[i - rw] - 0.25 * ref.j2 / (r[i - rw] * r[i - rw]));
  std::vector<double> xs(E.begin() + static_cast<long>(i - rw), E.begin() + static_cast<long>(i + rw));
  std::vector<double> ys(2 * rw);
  for (std::size_t m = 0; m < xs.size(); ++m) ys[m] = r[i - rw + m] - j / std::sqrt(xs[m] - c);
  // each route localizes its own split near the given point
  const double Es = best_split(xs, ys, 0, xs.size(), rw, o.refine_degree);
  const KinkFit f = fit_kink(xs, ys, Es, o.refine_degree);
  const KinkFit g = fit_kink(xs, ys, Es, o.refine_degree + 1);
  ConsistencyResult out;
  out.E_split = Es;
  out.r3_jump = f.jump3;
  out.r_slope = f.slope - 0.5 * j * std::pow(Es - c, -1.5);
  const double r3 = out.r_slope * out.r_slope * out.r_slope;
  // V(r(E_a+)) - V(r(E_a-)) = V(a-) - V(a+)
  out.deltaV = -f.jump3 / (2.0 * r3);
  out.error = std::hypot(f.stat_err, f.jump3 - g.jump3) / std::abs(2.0 * r3);

  // E(r) route around the image point
  const InverseLine inv(line);
  const Part part = make_part(inv.energy_r(), inv.energy_values(), &inv.reference());
  const auto k = static_cast<std::size_t>(
      std::lower_bound(part.x.begin(), part.x.end(), a0) - part.x.begin());
  if (k < rw || k + rw > part.x.size())
    throw InputError("jump_consistency: too few radius samples around the jump");
  const double as = best_split(part.x, part.y, k - rw, k + rw, k, o.refine_degree);
  const auto rec = kink_record(part, k - rw, k + rw, as, ParamKind::energy, o);
  out.a_split = as;
  out.deltaV_r = rec.deltaV;
  out.error_r = rec.error;
  const double diff = std::abs(out.deltaV - out.deltaV_r);
  out.within_tol = diff <= abs_tol;
  out.within_errors = diff <= 3.0 * std::hypot(out.error, out.error_r);
  out.agree = out.within_tol && out.within_errors;
  return out;
}

PiecewiseConstantPotential backward_sweep(const std::vector<JumpRecord>& accepted) {
  std::vector<JumpRecord> js = accepted;
  std::sort(js.begin(), js.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  std::vector<double> breaks(js.size()), values(js.size());
  double right = 0.0;
  for (std::size_t k = js.size(); k-- > 0;) {
    breaks[k] = js[k].a;
    values[k] = right - js[k].deltaV;
    right = values[k];
  }
  return {breaks, values};
}

namespace {

ReconstructionReport finish(std::vector<JumpRecord> jumps, const InverseLine& line,
                            const ReconstructOptions& o) {
  ReconstructionReport rep;
  rep.jumps = std::move(jumps);
  std::vector<JumpRecord> acc;
  for (const auto& j : rep.jumps) {
    if (j.accepted) acc.push_back(j);
    if (j.merged) rep.warnings.push_back("merged jump candidates near r=" + std::to_string(j.a));
  }
  for (std::size_t k = 1; k < acc.size(); ++k)
    if (!(acc[k].a > acc[k - 1].a)) throw InvariantViolation("reconstruct: coincident jumps");
  if (!acc.empty()) {
    const auto& xs = line.mixed() ? line.lambda_r() : line.energy_r();
    const auto beyond = std::count_if(xs.begin(), xs.end(),
                                      [&](double x) { return x > acc.back().a; });
    if (beyond < o.detect.window)
      throw RangeError("reconstruct: support not covered; the line ends too close to r=" +
                       std::to_string(acc.back().a));
  }
  rep.potential = backward_sweep(acc);
  if (!o.validate) return rep;

  // forward re-solve of the line for the reconstructed potential
  const Potential P(rep.potential);
  const auto stride = static_cast<std::size_t>(std::max(1, o.residual_stride));
  double res = 0.0;
  const auto& rE = line.energy_r();
  for (std::size_t i = 0; i < rE.size(); i += stride) {
    const double E = dirichlet_energy(P, line.ell0(), line.n(), rE[i], o.solver);
    res = std::max(res, std::abs(E - line.energy_values()[i]));
  }
  const auto& rL = line.lambda_r();
  for (std::size_t i = 1; i < rL.size(); i += stride) {
    const double lam =
        dirichlet_lambda(P, line.E0(), line.n(), rL[i], line.ell0().lambda, o.solver);
    res = std::max(res, std::abs(lam - line.lambda_values()[i]));
  }
  rep.residual = res;
  return rep;
}

}  // namespace

ReconstructionReport reconstruct(const ZeroLine& line, const ReconstructOptions& options) {
  const InverseLine inv(line);
  // a line that cannot be scanned would silently come back as V = 0
  if (inv.energy_r().size() < 2 * static_cast<std::size_t>(options.detect.window))
    throw InputError("reconstruct: line has " + std::to_string(inv.energy_r().size()) +
                     " samples, the scan needs at least " +
                     std::to_string(2 * options.detect.window));
  return finish(detect_jumps(inv, options.detect), inv, options);
}

ReconstructionReport reconstruct_mixed(const MixedZeroLine& line,
                                       const ReconstructOptions& options) {
  const InverseLine inv(line);
  auto jumps = detect_jumps(inv, options.detect);
  // the junction kink is not a jump; boundaries within a window of it are not scanned
  const auto w = static_cast<std::size_t>(options.detect.window);
  const auto& rE = inv.energy_r();
  const auto& rL = inv.lambda_r();
  const double lo = rE.size() > w ? rE[rE.size() - w] : rE.front();
  const double hi = rL.size() > w ? rL[w - 1] : rL.back();
  auto rep = finish(std::move(jumps), inv, options);
  rep.exclusion_window = std::make_pair(lo, hi);
  rep.warnings.push_back("breakpoints in (" + std::to_string(lo) + ", " + std::to_string(hi) +
                         ") around the junction r0=" + std::to_string(line.r0) +
                         " are unresolvable");
  return rep;
}

JumpProfile jump_profile(const InverseLine& line, const DetectOptions& options) {
  JumpProfile prof;
  auto add = [&](const Part& part) {
    for (const auto& c : coarse_scan(part, options)) {
      prof.r.push_back(c.t);
      prof.raw.push_back(-c.d3_left / (2.0 * c.d1));
      prof.delta.push_back(c.jump / (options.coefficient * c.d1));
      prof.error.push_back(c.err / std::abs(options.coefficient * c.d1));
    }
  };
  add(make_part(line.energy_r(), line.energy_values(), &line.reference()));
  if (line.mixed()) add(make_part(line.lambda_r(), line.lambda_values(), nullptr));
  return prof;
}

}  // namespace zeroinv
