#include "zeroinv/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zeroinv/born_inversion.hpp"
#include "zeroinv/errors.hpp"
#include "zeroinv/piecewise_inversion.hpp"
#include "zeroinv/potential_io.hpp"

namespace zeroinv::verify {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int Rng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

PiecewiseConstantPotential random_piecewise(Rng& rng, const RandomPiecewiseOptions& o) {
  if (o.min_steps < 1 || o.max_steps < o.min_steps)
    throw InputError("random_piecewise: need 1 <= min_steps <= max_steps");
  const int J = rng.integer(o.min_steps, o.max_steps);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> b(static_cast<std::size_t>(J)), v(static_cast<std::size_t>(J));
    for (auto& x : b) x = rng.uniform(o.break_lo, o.break_hi);
    for (auto& x : v) x = rng.uniform(o.value_lo, o.value_hi);
    std::sort(b.begin(), b.end());
    bool ok = true;
    for (std::size_t j = 1; j < b.size() && ok; ++j) ok = b[j] - b[j - 1] >= o.min_spacing;
    for (std::size_t j = 0; j < v.size() && ok; ++j) {
      const double right = j + 1 < v.size() ? v[j + 1] : 0.0;
      ok = std::abs(right - v[j]) >= o.min_jump;
    }
    if (ok) return {b, v};
  }
  throw InputError("random_piecewise: constraints cannot be met");
}

ZeroLine scan_line(const Potential& potential, const LineGrid& g, const SolverOptions& options) {
  std::vector<double> r;
  const auto count = static_cast<long>(std::floor((g.r_max - g.r_min) / g.h + 1e-9));
  for (long i = 0; i <= count; ++i) r.push_back(g.r_min + static_cast<double>(i) * g.h);
  return trace_fixed_l_radius(potential, 1, AngularParameter{}, r, options);
}

int SuiteReport::failures() const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(),
                                        [](const auto& c) { return !c.passed; }));
}

namespace {

std::string describe(const Potential& p) {
  std::string s = format_potential(p);
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

void worst(SuiteReport& rep, const std::string& key, double value) {
  auto [it, inserted] = rep.metrics.emplace(key, value);
  if (!inserted) it->second = std::max(it->second, value);
}

// Runs one case, turning library exceptions into a failed case.
template <class F>
void run_case(SuiteReport& rep, const std::string& label, F&& body) {
  CaseResult c;
  c.label = label;
  try {
    std::ostringstream detail;
    c.passed = body(detail);
    c.detail = detail.str();
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  rep.cases.push_back(std::move(c));
}

// Energies from E_hi down towards E_lo, denser near the bottom.
std::vector<double> descending_grid(double E_lo, double E_hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = 1.0 - static_cast<double>(i) / (count - 1);
    out.push_back(E_lo + (E_hi - E_lo) * t * t);
  }
  out.back() = E_lo;
  return out;
}

// Reconstructed breakpoints and values against the truth.
bool compare_potentials(const PiecewiseConstantPotential& truth,
                        const PiecewiseConstantPotential& rec, double break_tol, double value_tol,
                        std::ostream& detail, SuiteReport& rep) {
  const auto& tb = truth.breakpoints();
  const auto& rb = rec.breakpoints();
  if (tb.size() != rb.size()) {
    detail << "found " << rb.size() << " breakpoints, expected " << tb.size();
    return false;
  }
  double eb = 0.0, ev = 0.0;
  for (std::size_t j = 0; j < tb.size(); ++j) {
    eb = std::max(eb, std::abs(tb[j] - rb[j]));
    ev = std::max(ev, std::abs(truth.values()[j] - rec.values()[j]));
  }
  worst(rep, "max_break_error", eb);
  worst(rep, "max_value_error", ev);
  detail << "break error " << eb << ", value error " << ev;
  return eb <= break_tol && ev <= value_tol;
}

}  // namespace

SuiteReport monotonicity_suite(std::uint64_t seed, int count) {
  SuiteReport rep;
  rep.suite = "monotonicity";
  rep.seed = seed;
  Rng rng(seed);
  RandomPiecewiseOptions po;
  po.value_lo = -5.0;
  po.value_hi = 5.0;
  SolverOptions so;
  so.tol = 1e-10;
  // sanity bound only: the fit straddles kinks of the line at breakpoints
  const double rho_tol = 0.25;
  double worst_rho = 0.0;
  for (int i = 0; i < count; ++i) {
    // one in five is a smooth exponential, attractive or repulsive
    Potential P;
    if (i % 5 == 4) {
      const double v0 = rng.uniform(-5.0, 5.0), mu = rng.uniform(0.5, 2.0);
      P = Potential::exponential(v0, mu);
    } else {
      P = Potential(random_piecewise(rng, po));
    }
    const double vmin = std::min(0.0, P.lower_bound());
    const auto grid = descending_grid(vmin + 0.05, 150.0, 120);
    for (int n = 1; n <= 3; ++n) {
      run_case(rep, describe(P) + " n=" + std::to_string(n), [&](std::ostream& detail) {
        const ZeroLine line = trace_fixed_l(P, n, AngularParameter{}, grid, so);
        if (line.size() < 12) {
          detail << "only " << line.size() << " samples";
          return false;
        }
        for (std::size_t k = 1; k < line.size(); ++k)
          if (!(line.E[k] < line.E[k - 1] && line.r[k] > line.r[k - 1])) {
            detail << "E-segment not monotone at E=" << line.E[k];
            return false;
          }
        // spectral data between samples at three places along the line, with
        // rho checked against a centered difference of the zero itself
        for (double f : {0.25, 0.5, 0.75}) {
          const auto i = static_cast<std::size_t>(f * static_cast<double>(line.size() - 1));
          const double R = 0.5 * (line.r[i] + line.r[i + 1]);
          const auto d = spectral_data(line, R);
          if (!(d.rho > 0.0)) {
            detail << "rho <= 0 at R=" << R;
            return false;
          }
          const double h = 1e-4 * std::max(1.0, std::abs(d.E_star));
          const double fd = -(nth_zero(P, AngularParameter{}, d.E_star + h, n, so) -
                              nth_zero(P, AngularParameter{}, d.E_star - h, n, so)) /
                            (2.0 * h);
          const double rel = std::abs(d.rho - fd) / fd;
          worst_rho = std::max(worst_rho, rel);
          if (!(rel < rho_tol)) {
            detail << "rho=" << d.rho << " vs difference " << fd << " at R=" << R;
            return false;
          }
        }
        // lambda-segment at a mid-line energy
        const double E0 = line.E[line.size() / 2];
        double prev = 0.0;
        for (int j = 0; j < 16; ++j) {
          const double lam = 0.5 + 0.4 * j;
          const double r = nth_zero(P, AngularParameter(lam), E0, n, so);
          if (j > 0 && !(r > prev)) {
            detail << "lambda-segment not increasing at lambda=" << lam;
            return false;
          }
          prev = r;
        }
        detail << line.size() << " samples";
        return true;
      });
    }
  }
  rep.metrics["rho_rel_error"] = worst_rho;
  return rep;
}

SuiteReport distinguishability_suite(std::uint64_t seed, int count) {
  SuiteReport rep;
  rep.suite = "distinguishability";
  rep.seed = seed;
  Rng rng(seed);
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(100.0 - 99.0 * i / 49.0);
  for (int i = 0; i < count; ++i) {
    const auto a = random_piecewise(rng);
    auto b = random_piecewise(rng);
    while (b == a) b = random_piecewise(rng);
    const Potential A(a), B(b);
    run_case(rep, describe(A) + " | " + describe(B), [&](std::ostream& detail) {
      for (int n = 1; n <= 3; ++n) {
        const auto d = lines_distinguish(A, B, n, AngularParameter{}, grid, 1e-6);
        if (d.separated) {
          detail << "separated by n=" << n << " at E=" << d.E;
          return true;
        }
      }
      detail << "no line n <= 3 separates the pair";
      return false;
    });
  }
  return rep;
}

SuiteReport roundtrip_suite(std::uint64_t seed, int count) {
  SuiteReport rep;
  rep.suite = "roundtrip";
  rep.seed = seed;
  Rng rng(seed);
  ReconstructOptions ro;
  ro.residual_stride = 25;
  for (int i = 0; i < count; ++i) {
    const auto truth = random_piecewise(rng);
    const Potential P(truth);
    run_case(rep, describe(P), [&](std::ostream& detail) {
      const auto rec = reconstruct(scan_line(P), ro);
      worst(rep, "max_residual", rec.residual);
      return compare_potentials(truth, rec.potential, 5e-3, 2e-2, detail, rep);
    });
  }
  // smooth control: no accepted jump
  const Potential X = Potential::exponential(-0.5, 1.0);
  run_case(rep, "control " + describe(X), [&](std::ostream& detail) {
    SolverOptions so;
    so.tol = 1e-12;
    ReconstructOptions o = ro;
    o.validate = false;
    const auto rec = reconstruct(scan_line(X, {}, so), o);
    const auto accepted = std::count_if(rec.jumps.begin(), rec.jumps.end(),
                                        [](const auto& j) { return j.accepted; });
    detail << accepted << " accepted jumps";
    return accepted == 0;
  });
  return rep;
}

SuiteReport equivalence_suite(std::uint64_t seed, int count) {
  SuiteReport rep;
  rep.suite = "equivalence";
  rep.seed = seed;
  Rng rng(seed);
  RandomPiecewiseOptions po;
  po.max_steps = 2;
  ReconstructOptions ro;
  ro.validate = false;
  for (int i = 0; i < count; ++i) {
    const auto truth = random_piecewise(rng, po);
    const Potential P(truth);
    run_case(rep, describe(P), [&](std::ostream& detail) {
      const ZeroLine line = scan_line(P);
      const InverseLine inv(line);
      const auto rec = reconstruct(line, ro);
      std::size_t seen = 0;
      bool ok = true;
      for (const auto& j : rec.jumps) {
        if (!j.accepted) continue;
        ++seen;
        const auto c = jump_consistency(line, inv.energy(j.a), ro.detect);
        const double diff = std::abs(c.deltaV - c.deltaV_r);
        worst(rep, "max_route_difference", diff);
        detail << "a=" << j.a << " dV(E(r))=" << c.deltaV_r << " dV(r(E))=" << c.deltaV
               << " diff=" << diff << "; ";
        ok = ok && c.agree;
      }
      if (seen != truth.breakpoints().size()) {
        detail << "found " << seen << " jumps, expected " << truth.breakpoints().size();
        return false;
      }
      return ok;
    });
  }
  return rep;
}

SuiteReport born_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "born";
  rep.seed = seed;
  const double v0 = -0.5, mu = 1.0;
  const Potential X = Potential::exponential(v0, mu);
  PipelineOptions po;
  po.invert.q_max = 60.0;
  const auto res = mixed_pipeline(X, 5.0, 30.0, 40, po);

  auto rel_vs_analytic = [&](const SineProfile& p) {
    double w = 0.0;
    for (std::size_t i = 0; i < p.q.size(); ++i) {
      if (p.q[i] <= 0.0) continue;
      const double a = exponential_sine_transform(v0, mu, p.q[i]);
      w = std::max(w, std::abs(p.g[i] - a) / std::abs(a));
    }
    return w;
  };
  run_case(rep, "g_low vs analytic", [&](std::ostream& d) {
    const double w = rel_vs_analytic(res.low);
    rep.metrics["g_low_rel_error"] = w;
    d << w;
    return w <= 1e-3;
  });
  run_case(rep, "g_high vs analytic", [&](std::ostream& d) {
    const double w = rel_vs_analytic(res.high);
    rep.metrics["g_high_rel_error"] = w;
    d << w;
    return w <= 1e-3;
  });
  run_case(rep, "seam", [&](std::ostream& d) {
    rep.metrics["seam_mismatch"] = res.seam_mismatch;
    d << res.seam_mismatch;
    return res.seam_mismatch < 1e-3;
  });
  run_case(rep, "g(0) = 0", [&](std::ostream& d) {
    d << res.profile.g.front();
    return res.profile.q.front() == 0.0 && res.profile.g.front() == 0.0;
  });
  run_case(rep, "reconstruction error", [&](std::ostream& d) {
    rep.metrics["reconstruction_error"] = res.error;
    d << res.error;
    return res.error < 0.02;
  });
  run_case(rep, "Parseval", [&](std::ostream& d) {
    double lhs = 0.0;
    const auto& q = res.profile.q;
    const auto& g = res.profile.g;
    for (std::size_t i = 0; i + 1 < q.size(); ++i)
      lhs += 0.5 * (q[i + 1] - q[i]) * (g[i] * g[i] + g[i + 1] * g[i + 1]);
    lhs *= 2.0 / std::acos(-1.0);
    const double rhs = v0 * v0 * 2.0 / (8.0 * mu * mu * mu);  // int r^2 v0^2 e^{-2 mu r}
    const double rel = std::abs(lhs - rhs) / rhs;
    rep.metrics["parseval_rel"] = rel;
    d << lhs << " vs " << rhs;
    return rel < 0.02;
  });
  run_case(rep, "band-limited worse than mixed, worse at small k0", [&](std::ostream& d) {
    const auto small = mixed_pipeline(X, 0.5, 30.0, 40, po);
    rep.metrics["band_limited_error_k0_5"] = res.band_limited_error;
    rep.metrics["band_limited_error_k0_0.5"] = small.band_limited_error;
    d << "mixed " << res.error << ", band-limited k0=5 " << res.band_limited_error
      << ", k0=0.5 " << small.band_limited_error;
    return small.band_limited_error > res.error && res.band_limited_error > res.error &&
           small.band_limited_error > res.band_limited_error;
  });
  // linearity: two step potentials on shared breakpoints and their combination
  run_case(rep, "linearity", [&](std::ostream& d) {
    Rng rng(seed);
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    const std::vector<double> br{1.0, 2.0};
    const std::vector<double> v1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<double> v2{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<double> v3{a * v1[0] + b * v2[0], a * v1[1] + b * v2[1]};
    PipelineOptions lo;
    lo.dk = 0.02;
    lo.low.extrapolate = false;
    lo.low.truncation_tol = 1e300;
    lo.seam_tol = 1e300;
    lo.invert.q_max = 40.0;
    lo.invert.tail_correction = false;
    const auto r1 = mixed_pipeline(Potential::piecewise(br, v1), 3.0, 20.0, 30, lo);
    const auto r2 = mixed_pipeline(Potential::piecewise(br, v2), 3.0, 20.0, 30, lo);
    const auto r3 = mixed_pipeline(Potential::piecewise(br, v3), 3.0, 20.0, 30, lo);
    auto gap = [&](const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& z) {
      double e = 0.0, s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        e = std::max(e, std::abs(z[i] - (a * x[i] + b * y[i])));
        s = std::max(s, std::abs(z[i]));
      }
      return s > 0.0 ? e / s : e;
    };
    std::vector<double> d1, d2, d3;
    for (std::size_t i = 0; i < r1.dataset.fixed_l_branch.size(); ++i) {
      d1.push_back(r1.dataset.fixed_l_branch[i].delta);
      d2.push_back(r2.dataset.fixed_l_branch[i].delta);
      d3.push_back(r3.dataset.fixed_l_branch[i].delta);
    }
    const double e_delta = gap(d1, d2, d3);
    const double e_low = gap(r1.low.g, r2.low.g, r3.low.g);
    const double e_high = gap(r1.high.g, r2.high.g, r3.high.g);
    const double e_rec = gap(r1.reconstruction.rV, r2.reconstruction.rV, r3.reconstruction.rV);
    const double e = std::max({e_delta, e_low, e_high, e_rec});
    rep.metrics["linearity_rel"] = e;
    d << "delta " << e_delta << ", g_low " << e_low << ", g_high " << e_high << ", rV " << e_rec;
    return e < 1e-6;
  });
  return rep;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"monotonicity", "distinguishability", "roundtrip",
                                              "equivalence", "born"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count) {
  if (name == "monotonicity") return monotonicity_suite(seed, count > 0 ? count : 100);
  if (name == "distinguishability") return distinguishability_suite(seed, count > 0 ? count : 100);
  if (name == "roundtrip") return roundtrip_suite(seed, count > 0 ? count : 50);
  if (name == "equivalence") return equivalence_suite(seed, count > 0 ? count : 20);
  if (name == "born") return born_suite(seed);
  throw InputError("unknown suite '" + name + "'");
}

std::string format_report(const SuiteReport& r) {
  std::ostringstream out;
  out << "suite=" << r.suite << '\n'
      << "seed=" << r.seed << '\n'
      << "cases=" << r.cases.size() << '\n'
      << "failures=" << r.failures() << '\n'
      << "passed=" << (r.passed() ? "true" : "false") << '\n';
  for (const auto& [k, v] : r.metrics) out << "metric." << k << '=' << format_number(v) << '\n';
  for (const auto& c : r.cases)
    if (!c.passed) out << "FAIL " << c.label << " :: " << c.detail << '\n';
  return out.str();
}

}  // namespace zeroinv::verify
