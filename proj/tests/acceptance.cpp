// One line per acceptance criterion: "criterion N PASS|FAIL <title> :: <figures>".
// Exit status is the number of failed criteria.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "zeroinv/born_inversion.hpp"
#include "zeroinv/errors.hpp"
#include "zeroinv/piecewise_inversion.hpp"
#include "zeroinv/verification.hpp"
#include "zeroinv/zero_lines.hpp"

using namespace zeroinv;
using std::numbers::pi;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = true;
  std::ostringstream info;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      info << "[failed: " << what << "] ";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.info << "[exception: " << e.what() << "] ";
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("criterion %d %s %s :: %s(%.1f s)\n", id, o.pass ? "PASS" : "FAIL", title.c_str(),
              o.info.str().c_str(), s);
  std::fflush(stdout);
}

SolverOptions solver(Backend b = Backend::automatic, double tol = 1e-12) {
  SolverOptions o;
  o.backend = b;
  o.tol = tol;
  return o;
}

bool strictly_monotone(const ZeroLine& l) {
  for (std::size_t i = 1; i < l.size(); ++i)
    if (!(l.E[i] < l.E[i - 1] && l.r[i] > l.r[i - 1])) return false;
  return true;
}

// Third derivative at 0 of the degree-(m-1) interpolant through (x_i, y_i).
double third_derivative_at_zero(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = std::pow(x[i], static_cast<double>(j));
    b(i) = y[i];
  }
  const Eigen::VectorXd c = A.fullPivLu().solve(b);
  return 6.0 * c(3);
}

void report_suite(Outcome& o, const verify::SuiteReport& rep) {
  o.info << "cases=" << rep.cases.size() << " failures=" << rep.failures() << ' ';
  for (const auto& [k, v] : rep.metrics) o.info << k << '=' << v << ' ';
  int shown = 0;
  for (const auto& c : rep.cases)
    if (!c.passed && shown++ < 3) o.info << "{" << c.label << ": " << c.detail << "} ";
  o.require(rep.passed(), "suite");
}

}  // namespace

int main() {
  criterion(1, "free-particle exactness", [](Outcome& o) {
    double worst_exact = 0.0, worst_numeric = 0.0, worst_inverse = 0.0;
    const auto V = Potential::zero();
    for (double E : {1.0, 4.0, pi * pi, 100.0})
      for (int n = 1; n <= 5; ++n) {
        const double expect = n * pi / std::sqrt(E);
        worst_exact = std::max(worst_exact, std::abs(nth_zero(V, {}, E, n, solver(Backend::exact)) - expect));
        worst_numeric = std::max(worst_numeric,
                                 std::abs(nth_zero(V, {}, E, n, solver(Backend::numeric, 1e-10)) - expect));
      }
    for (int n = 1; n <= 5; ++n) {
      const auto line = trace_fixed_l(V, n, {}, {100.0, pi * pi, 4.0, 1.0}, solver(Backend::exact));
      const InverseLine inv(line);
      for (double r : line.r) {
        const double e = n * n * pi * pi / (r * r);
        worst_inverse = std::max(worst_inverse, std::abs(inv.energy(r) - e) / e);
      }
    }
    o.info << "exact=" << worst_exact << " numeric=" << worst_numeric << " inverse_rel=" << worst_inverse << ' ';
    o.require(worst_exact <= 1e-10, "exact backend <= 1e-10");
    o.require(worst_numeric <= 1e-6, "numeric backend <= 1e-6");
    o.require(worst_inverse <= 1e-12, "inverse equals n^2 pi^2 / r^2");
  });

  criterion(2, "third-derivative profile of the two-step potential", [](Outcome& o) {
    const auto line = verify::scan_line(Potential::two_step_example());
    const InverseLine inv(line);
    const auto profile = jump_profile(inv);
    o.require(!profile.r.empty(), "profile emitted");
    std::vector<JumpRecord> acc;
    for (const auto& j : detect_jumps(inv))
      if (j.accepted) acc.push_back(j);
    o.info << "accepted=" << acc.size() << ' ';
    o.require(acc.size() == 2, "exactly two accepted jumps");
    if (acc.size() != 2) return;
    const double where[] = {2.0, 3.0};
    for (int i = 0; i < 2; ++i) {
      o.info << "a=" << acc[i].a << " deltaV=" << acc[i].deltaV << ' ';
      o.require(std::abs(acc[i].a - where[i]) <= 5e-3, "location within 5e-3");
      o.require(std::abs(acc[i].deltaV - 1.0) <= 0.02, "deltaV = 1 +- 0.02");
    }
    const auto V = backward_sweep(acc);
    const auto& v = V.values();
    o.info << "values=" << v[0] << ',' << v[1] << ",0 ";
    o.require(std::abs(v[0] + 2.0) <= 0.02 && std::abs(v[1] + 1.0) <= 0.02, "sweep values");
  });

  criterion(3, "lines of the one-bound-state potential", [](Outcome& o) {
    const auto V = Potential::bargmann(std::sqrt(10.0));
    const auto so = solver(Backend::automatic, 1e-10);
    // n = 1: from E = 20 down to -10 + 1e-3
    std::vector<double> g1;
    for (int i = 0; i < 60; ++i) g1.push_back(20.0 - 25.0 * i / 60.0);
    for (double E : asymptote_grid(-5.0, -10.0, 1e-3, 60)) g1.push_back(E);
    const auto l1 = trace_fixed_l(V, 1, {}, g1, so);
    o.require(l1.size() == g1.size() && strictly_monotone(l1), "n=1 monotone to -10+1e-3");
    const double ratio = l1.r.back() / nth_zero(V, {}, -9.0, 1, so);
    o.info << "r1(-10+1e-3)/r1(-9)=" << ratio << ' ';
    o.require(ratio >= 2.0, "divergence proxy >= 2");
    // n >= 2: no zero below E = 0 (one state below), divergence as E -> 0+
    for (int n = 2; n <= 4; ++n) {
      std::vector<double> g;
      for (int i = 0; i < 60; ++i) g.push_back(20.0 - 15.0 * i / 60.0);
      for (double E : asymptote_grid(5.0, 0.0, 1e-3, 60)) g.push_back(E);
      g.push_back(-5.0);
      const auto l = trace_fixed_l(V, n, {}, g, so);
      const bool truncated = l.truncated_at && *l.truncated_at == -5.0;
      const double grow = l.r.back() / nth_zero(V, {}, 5.0, n, so);
      o.info << "n=" << n << " r(0+)/r(5)=" << grow << ' ';
      o.require(strictly_monotone(l), "monotone");
      o.require(truncated, "no zero at E=-5");
      o.require(grow > 3.0, "growth > 3x toward E=0");
    }
  });

  criterion(4, "E(r) and r(E) jump routes agree", [](Outcome& o) {
    report_suite(o, verify::equivalence_suite(kSeed, 20));
  });

  criterion(5, "piecewise roundtrip from the first s-wave line", [](Outcome& o) {
    report_suite(o, verify::roundtrip_suite(kSeed, 50));
  });

  criterion(6, "mixed-line roundtrip", [](Outcome& o) {
    // calibration: lambda''' jump against -2 lambda' dV by direct Dirichlet solves
    const double a = 2.0, dV = 1.0;
    const auto S = Potential::piecewise({a}, {-dV});
    const auto so = solver(Backend::automatic, 1e-13);
    const double E0 = dirichlet_energy(S, {}, 1, 1.0, so);
    auto lam = [&](double r) { return dirichlet_lambda(S, E0, 1, r, 0.5, so); };
    const double h = 0.02;
    std::vector<double> xl, yl, xr, yr;
    for (int i = 0; i <= 6; ++i) {
      xl.push_back(-i * h);
      yl.push_back(lam(a - i * h));
      xr.push_back(i * h);
      yr.push_back(lam(a + i * h));
    }
    const double slope = (yr[1] - yl[1]) / (2.0 * h);
    const double jump3 = third_derivative_at_zero(xr, yr) - third_derivative_at_zero(xl, yl);
    const double coefficient = jump3 / (slope * dV);
    o.info << "lambda coefficient=" << coefficient << ' ';
    o.require(std::abs(coefficient + 2.0) <= 0.02, "calibration within 1%");

    const auto P = Potential::two_step_example();
    struct Placement {
      int n;
      double r0;
    };
    for (const Placement p : {Placement{1, 1.5}, Placement{2, 2.5}}) {
      const double e0 = dirichlet_energy(P, {}, p.n, p.r0, solver());
      const auto line = trace_mixed_radius(P, p.n, {}, e0, 0.25, 4.5, 0.0025, solver());
      const auto rep = reconstruct_mixed(line);
      const auto& bp = rep.potential.breakpoints();
      const auto& v = rep.potential.values();
      o.info << "r0=" << p.r0 << ": ";
      o.require(bp.size() == 2, "two breakpoints");
      if (bp.size() != 2) continue;
      o.info << "breaks=" << bp[0] << ',' << bp[1] << " values=" << v[0] << ',' << v[1] << ' ';
      o.require(std::abs(bp[0] - 2.0) <= 5e-3 && std::abs(bp[1] - 3.0) <= 5e-3, "breakpoints");
      o.require(std::abs(v[0] + 2.0) <= 2e-2 && std::abs(v[1] + 1.0) <= 2e-2, "values");
    }
  });

  criterion(7, "Born pipeline for an exponential", [](Outcome& o) {
    const double v0 = -0.5, mu = 1.0;
    const auto X = Potential::exponential(v0, mu);
    PipelineOptions po;
    po.invert.q_max = 60.0;
    const auto res = mixed_pipeline(X, 5.0, 30.0, 40, po);
    auto worst = [&](const SineProfile& p) {
      double w = 0.0;
      for (std::size_t i = 0; i < p.q.size(); ++i)
        if (p.q[i] > 0.0) {
          const double g = exponential_sine_transform(v0, mu, p.q[i]);
          w = std::max(w, std::abs(p.g[i] - g) / std::abs(g));
        }
      return w;
    };
    const double wl = worst(res.low), wh = worst(res.high);
    const auto small = mixed_pipeline(X, 0.5, 30.0, 40, po);
    o.info << "g_low=" << wl << " g_high=" << wh << " seam=" << res.seam_mismatch
           << " error=" << res.error << " band_limited(k0=0.5)=" << small.band_limited_error << ' ';
    o.require(wl <= 1e-3 && wh <= 1e-3, "(a) both routes within 1e-3");
    o.require(res.seam_mismatch < 1e-3, "(b) seam");
    o.require(res.error < 0.02, "(c) L2 error < 2%");
    o.require(small.band_limited_error > res.error, "(d) band-limited error larger");
  });

  criterion(8, "monotonicity properties", [](Outcome& o) {
    report_suite(o, verify::monotonicity_suite(kSeed, 100));
  });

  criterion(9, "distinguishability of random pairs", [](Outcome& o) {
    report_suite(o, verify::distinguishability_suite(kSeed, 100));
  });

  std::printf("acceptance: %d of 9 criteria failed\n", failures);
  return failures;
}
