#include <doctest.h>

#include <sstream>

#include "zeroinv/errors.hpp"
#include "zeroinv/line_io.hpp"

using namespace zeroinv;

namespace {

ZeroLine sample_line() {
  ZeroLine l;
  l.n = 2;
  l.ell0 = AngularParameter(1.5);
  l.E = {10.0, 5.0 / 3.0, 0.1};
  l.r = {1.0 / 3.0, 2.0, 7.123456789012345};
  l.backend.assign(3, Backend::numeric);
  l.truncated_at = -0.25;
  return l;
}

}  // namespace

TEST_CASE("fixed-l line CSV round-trips bit for bit") {
  const auto l = sample_line();
  std::stringstream ss;
  write_line_csv(ss, l, {{"seed", "7"}});
  const auto text = ss.str();
  CHECK(text.rfind("# n=2 ell0=1.5 E0=none\n", 0) == 0);
  CHECK(text.find("param_kind,param_value,r\n") != std::string::npos);
  const auto back = std::get<ZeroLine>(read_line_csv(ss));
  CHECK(back.n == 2);
  CHECK(back.ell0.lambda == 1.5);
  CHECK(back.E == l.E);
  CHECK(back.r == l.r);
  REQUIRE(back.truncated_at);
  CHECK(*back.truncated_at == -0.25);
  std::stringstream again(text);
  const auto meta = read_metadata(again);
  CHECK(std::find(meta.begin(), meta.end(), std::pair<std::string, std::string>{"seed", "7"}) != meta.end());
}

TEST_CASE("mixed line CSV round-trips") {
  MixedZeroLine m;
  m.n = 1;
  m.E0 = 4.25;
  m.r0 = 1.5;
  m.E = {9.0, 4.25};
  m.rE = {1.0, 1.5};
  m.lambda = {0.5, 1.0, 2.0};
  m.rL = {1.5, 1.7, 2.2};
  std::stringstream ss;
  write_line_csv(ss, m);
  const auto back = std::get<MixedZeroLine>(read_line_csv(ss));
  CHECK(back.E0 == 4.25);
  CHECK(back.r0 == 1.5);
  CHECK(back.lambda == m.lambda);
  CHECK(back.rL == m.rL);
}

TEST_CASE("malformed line files are input errors") {
  auto bad = [](const std::string& s) {
    std::stringstream ss(s);
    return read_line_csv(ss);
  };
  CHECK_THROWS_AS(bad("E,1,2\n"), InputError);
  CHECK_THROWS_AS(bad("# n=1 ell0=0.5 E0=none\nwrong,header\n"), InputError);
  CHECK_THROWS_AS(bad("# n=1 ell0=0.5 E0=none\nparam_kind,param_value,r\nE,1,x\n"), InputError);
  CHECK_THROWS_AS(bad("# n=1 ell0=0.5 E0=none\nparam_kind,param_value,r\nE,1,1\nE,2,2\n"), InputError);
  CHECK_THROWS_AS(bad("# ell0=0.5 E0=none\nparam_kind,param_value,r\nE,1,1\n"), InputError);
  CHECK_THROWS_AS(bad("# n=1 ell0=0.5 E0=none\nparam_kind,param_value,r\nmu,1,1\n"), InputError);
  CHECK_THROWS_AS(read_line_file("/nonexistent.csv"), InputError);
}

TEST_CASE("jump table columns") {
  JumpRecord j;
  j.a = 2.0;
  j.deltaV = 1.0;
  j.accepted = true;
  std::stringstream ss;
  write_jumps_csv(ss, {j}, {{"tool", "zeroinv"}});
  const auto s = ss.str();
  CHECK(s.find("a,jump3,slope,deltaV,confidence,error,kind,accepted,merged\n") != std::string::npos);
  CHECK(s.find("\n2,0,0,1,0,0,E,1,0\n") != std::string::npos);
}

TEST_CASE("phase-shift datasets and sine profiles round-trip") {
  PhaseShiftDataset d;
  d.ell0 = 0;
  d.k0 = 0.5;
  d.source = PhaseSource::exact;
  d.fixed_l_branch = {{0.5, 0.3}, {0.51, 0.29}};
  d.fixed_E_branch = {{0, 0.3}, {1, 0.01}, {2, 1e-4}};
  std::stringstream ss;
  write_dataset_csv(ss, d);
  const auto back = read_dataset_csv(ss);
  CHECK(back.k0 == 0.5);
  CHECK(back.source == PhaseSource::exact);
  REQUIRE(back.fixed_E_branch.size() == 3);
  CHECK(back.fixed_E_branch[2].delta == 1e-4);
  CHECK(back.fixed_l_branch[1].k == 0.51);

  SineProfile p;
  p.q = {0.0, 1.0, 2.0};
  p.g = {0.0, -0.1, -0.05};
  p.region = {Region::low, Region::low, Region::high};
  p.seam_index = 1;
  p.truncation_bound = 3e-9;
  std::stringstream sp;
  write_profile_csv(sp, p);
  const auto pb = read_profile_csv(sp);
  CHECK(pb.g == p.g);
  CHECK(pb.region == p.region);
  CHECK(pb.seam_index == 1);
  CHECK(pb.truncation_bound == 3e-9);
}
