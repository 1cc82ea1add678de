#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zeroinv/errors.hpp"
#include "zeroinv/piecewise_inversion.hpp"
#include "zeroinv/verification.hpp"

using namespace zeroinv;

namespace {

std::vector<double> radius_grid(double lo, double hi, double h) {
  std::vector<double> g;
  const int m = static_cast<int>(std::lround((hi - lo) / h));
  for (int i = 0; i <= m; ++i) g.push_back(lo + h * i);
  return g;
}

SolverOptions tight() {
  SolverOptions o;
  o.tol = 1e-12;
  return o;
}

std::vector<JumpRecord> accepted(const std::vector<JumpRecord>& all) {
  std::vector<JumpRecord> out;
  for (const auto& j : all)
    if (j.accepted) out.push_back(j);
  return out;
}

}  // namespace

TEST_CASE("two-step example: detection and backward sweep") {
  const auto line = verify::scan_line(Potential::two_step_example());
  const auto rep = reconstruct(line);
  const auto& bp = rep.potential.breakpoints();
  const auto& v = rep.potential.values();
  REQUIRE(bp.size() == 2);
  CHECK(bp[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(bp[1] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(v[0] == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(v[1] == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(rep.residual < 1e-6);
  for (const auto& j : accepted(rep.jumps)) {
    CHECK(j.kind == ParamKind::energy);
    CHECK(j.deltaV == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(j.error < 1e-4);
  }
}

TEST_CASE("jump law: p''' jump equals -2 p' dV for a known step") {
  // single step of height dV at a; the jump is measured with a fixed split
  const double a = 1.3, dV = 2.5;
  const auto V = Potential::piecewise({a}, {-dV});
  const auto line = trace_fixed_l_radius(V, 1, {}, radius_grid(0.4, 3.0, 0.0025), tight());
  const InverseLine inv(line);
  const auto j = fit_jump_at(inv.energy_r(), inv.energy_values(), a, ParamKind::energy, {},
                             &inv.reference());
  CHECK(j.jump3 == doctest::Approx(-2.0 * j.slope * dV).epsilon(1e-4));
  CHECK(j.deltaV == doctest::Approx(dV).epsilon(1e-4));
}

TEST_CASE("smooth and empty potentials give no accepted jumps") {
  for (const auto& V : {Potential::exponential(-3.0, 1.2), Potential::zero()}) {
    const auto line = trace_fixed_l_radius(V, 1, {}, radius_grid(0.25, 4.5, 0.0025), tight());
    CHECK(accepted(detect_jumps(InverseLine(line))).empty());
  }
}

TEST_CASE("backward sweep sums jumps inward from zero") {
  JumpRecord a, b;
  a.a = 1.0;
  a.deltaV = 0.5;
  a.accepted = true;
  b.a = 2.5;
  b.deltaV = -1.5;
  b.accepted = true;
  const auto p = backward_sweep({b, a});
  REQUIRE(p.breakpoints().size() == 2);
  CHECK(p.breakpoints()[0] == 1.0);
  CHECK(p.values()[1] == doctest::Approx(1.5));
  CHECK(p.values()[0] == doctest::Approx(1.0));
  CHECK(backward_sweep({}).breakpoints().empty());
}

TEST_CASE("E(r) and r(E) routes agree on the two-step example") {
  const auto line = verify::scan_line(Potential::two_step_example());
  const InverseLine inv(line);
  for (double a : {2.0, 3.0}) {
    const auto c = jump_consistency(line, inv.energy(a));
    CHECK(c.agree);
    CHECK(c.deltaV == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(c.deltaV_r == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(c.a_split == doctest::Approx(a).epsilon(1e-5));
  }
}

TEST_CASE("jump profile of a free line") {
  const auto line = trace_fixed_l_radius(Potential::zero(), 1, {}, radius_grid(0.5, 3.0, 0.005));
  const auto prof = jump_profile(InverseLine(line));
  REQUIRE(!prof.r.empty());
  for (std::size_t i = 0; i < prof.r.size(); i += 25) {
    CHECK(prof.raw[i] == doctest::Approx(-6.0 / (prof.r[i] * prof.r[i])).epsilon(1e-5));
    CHECK(std::abs(prof.delta[i]) < 1e-4);
  }
}

TEST_CASE("lambda segment of a mixed line carries the breakpoints") {
  const auto V = Potential::two_step_example();
  const auto line = trace_mixed_radius(V, 1, {}, 6.0, 0.25, 4.5, 0.0025, tight());
  const auto rep = reconstruct_mixed(line);
  const auto& bp = rep.potential.breakpoints();
  REQUIRE(bp.size() == 2);
  CHECK(bp[0] == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(bp[1] == doctest::Approx(3.0).epsilon(5e-3));
  CHECK(rep.potential.values()[0] == doctest::Approx(-2.0).epsilon(1e-2));
  for (const auto& j : accepted(rep.jumps)) CHECK(j.kind == ParamKind::lambda);
}

TEST_CASE("reconstruction rejects lines that are too short") {
  const auto line = trace_fixed_l_radius(Potential::zero(), 1, {}, radius_grid(1.0, 1.05, 0.01));
  CHECK_THROWS_AS(reconstruct(line), InputError);
}
