#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zeroinv/born_inversion.hpp"
#include "zeroinv/errors.hpp"
#include "zeroinv/line_io.hpp"
#include "zeroinv/piecewise_inversion.hpp"
#include "zeroinv/potential_io.hpp"
#include "zeroinv/radial_solver.hpp"
#include "zeroinv/verification.hpp"
#include "zeroinv/zero_lines.hpp"

namespace fs = std::filesystem;
using namespace zeroinv;

namespace {

// Everything a command needs to be re-run goes into every file it writes.
struct Run {
  std::string command;
  Metadata meta;
  fs::path out = ".";
  bool gnuplot = false;

  void note(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void note(const std::string& key, double value) { note(key, format_number(value)); }

  Metadata header() const {
    Metadata m{{"tool", "zeroinv"}, {"version", ZEROINV_VERSION}, {"command", command}};
    m.insert(m.end(), meta.begin(), meta.end());
    return m;
  }

  std::ofstream open(const std::string& name) const {
    fs::create_directories(out);
    std::ofstream f(out / name);
    if (!f) throw InputError("cannot write '" + (out / name).string() + "'");
    return f;
  }

  void plot(const std::string& name, const std::string& body) const {
    if (!gnuplot) return;
    auto f = open(name);
    f << "# gnuplot script for " << command << '\n' << body;
  }
};

struct PotentialArgs {
  std::string spec;
  std::optional<double> gamma2, v0, mu;
};

void add_potential(CLI::App* app, PotentialArgs& p, bool required) {
  auto* opt = app->add_option("--potential", p.spec,
                              "potential file, or a type name (zero, two-step, bargmann, "
                              "exponential) completed by --gamma2/--v0/--mu");
  if (required) opt->required();
  app->add_option("--gamma2", p.gamma2, "bargmann: bound-state depth");
  app->add_option("--v0", p.v0, "exponential: strength");
  app->add_option("--mu", p.mu, "exponential: inverse range");
}

Potential load_potential(const PotentialArgs& p, Run& run) {
  Potential pot;
  if (fs::is_regular_file(p.spec)) {
    pot = read_potential_file(p.spec);
  } else if (p.spec == "two-step") {
    pot = Potential::two_step_example();
  } else {
    std::string text = p.spec.find('=') == std::string::npos ? "type=" + p.spec : p.spec;
    std::replace(text.begin(), text.end(), ';', '\n');
    text += '\n';
    if (p.gamma2) text += "gamma2=" + format_number(*p.gamma2) + '\n';
    if (p.v0) text += "v0=" + format_number(*p.v0) + '\n';
    if (p.mu) text += "mu=" + format_number(*p.mu) + '\n';
    pot = parse_potential(text);
  }
  // one line, so the header stays a single key=value token
  std::string flat = format_potential(pot);
  while (!flat.empty() && flat.back() == '\n') flat.pop_back();
  std::replace(flat.begin(), flat.end(), '\n', ';');
  run.note("potential", flat);
  return pot;
}

// "3", "1..4" or "1,3,5".
std::vector<int> parse_indices(const std::string& text) {
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
    for (int i = a; i <= b; ++i) out.push_back(i);
  } else {
    for (double x : parse_list(text)) out.push_back(static_cast<int>(x));
  }
  if (out.empty()) throw InputError("empty index list '" + text + "'");
  for (int i : out)
    if (i < 1) throw InputError("indices must be >= 1");
  return out;
}

std::vector<double> uniform(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw InputError("grid needs count >= 2 and max > min");
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(lo + (hi - lo) * i / (count - 1));
  return g;
}

void positive(double x, const std::string& name) {
  if (!(x > 0.0)) throw InputError(name + " must be positive");
}

// ---------------------------------------------------------------------------

struct ForwardArgs {
  PotentialArgs pot;
  int ell = 0, n = 3, count = 50;
  double e_min = 1.0, e_max = 100.0, k_min = 0.1, k_max = 10.0, dk = 0.1, tol = 1e-10;
  bool born = false;
};

int cmd_forward(const ForwardArgs& a, Run& run) {
  const Potential pot = load_potential(a.pot, run);
  positive(a.tol, "--tol");
  positive(a.dk, "--dk");
  if (a.ell < 0) throw InputError("--fixed-l must be >= 0");
  run.note("fixed_l", std::to_string(a.ell));
  run.note("n", std::to_string(a.n));
  run.note("e_min", a.e_min);
  run.note("e_max", a.e_max);
  run.note("count", std::to_string(a.count));
  run.note("k_min", a.k_min);
  run.note("k_max", a.k_max);
  run.note("dk", a.dk);
  run.note("tol", a.tol);
  run.note("born", a.born ? "1" : "0");
  SolverOptions so;
  so.tol = a.tol;
  const auto ang = AngularParameter::from_ell(a.ell);

  {
    auto f = run.open("zeros.csv");
    write_metadata(f, run.header());
    f << "E,n,r\n";
    for (double E : uniform(a.e_min, a.e_max, a.count)) {
      for (int n = 1; n <= a.n; ++n) {
        double r;
        try {
          r = nth_zero(pot, ang, E, n, so);
        } catch (const ZeroBeyondRange&) {
          break;
        }
        f << format_number(E) << ',' << n << ',' << format_number(r) << '\n';
      }
    }
  }
  {
    std::vector<double> k;
    for (int i = 0;; ++i) {
      const double x = a.k_min + i * a.dk;
      if (x > a.k_max + 1e-12 * a.k_max) break;
      k.push_back(x);
    }
    if (k.empty() || !(a.k_min > 0.0)) throw InputError("k grid must be non-empty and positive");
    const auto delta = phase_shift_branch(pot, a.ell, k, so);
    auto f = run.open("phase_shifts.csv");
    write_metadata(f, run.header());
    f << (a.born ? "k,delta,delta_born\n" : "k,delta\n");
    for (std::size_t i = 0; i < k.size(); ++i) {
      f << format_number(k[i]) << ',' << format_number(delta[i]);
      if (a.born)
        f << ',' << format_number(a.ell == 0 ? born_phase_swave(pot, k[i])
                                             : born_phase_partial(pot, a.ell, k[i]));
      f << '\n';
    }
  }
  run.plot("forward.gp",
           "set datafile separator ','\nset multiplot layout 1,2\n"
           "set xlabel 'E'; set ylabel 'r_n'\n"
           "plot 'zeros.csv' using 1:($2==1?$3:1/0) title 'n=1' with lines\n"
           "set xlabel 'k'; set ylabel 'delta'\n"
           "plot 'phase_shifts.csv' using 1:2 title 'delta' with lines\n"
           "unset multiplot\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct TraceArgs {
  PotentialArgs pot;
  std::string n = "1";
  double fixed_l = 0.0, tol = 1e-10;
  std::optional<double> e0, e_min, h;
  double e_max = 100.0, lambda_max = 10.0, closest = 1e-3, r_min = 0.25, r_max = 4.5;
  int count = 200;
  std::string spacing = "uniform";
};

int cmd_trace(const TraceArgs& a, Run& run) {
  const Potential pot = load_potential(a.pot, run);
  positive(a.tol, "--tol");
  const auto ns = parse_indices(a.n);
  const auto ang = AngularParameter::from_ell(a.fixed_l);
  SolverOptions so;
  so.tol = a.tol;
  run.note("fixed_l", a.fixed_l);
  run.note("tol", a.tol);

  std::vector<std::string> files;
  if (a.h) {
    positive(*a.h, "--dr");
    run.note("r_min", a.r_min);
    run.note("r_max", a.r_max);
    run.note("dr", *a.h);
  } else {
    run.note("e_max", a.e_max);
    run.note("count", std::to_string(a.count));
  }
  if (a.e0) {
    run.note("e0", *a.e0);
    if (!a.h) run.note("lambda_max", a.lambda_max);
  }

  std::vector<double> grid;
  if (!a.h && !a.e0) {
    if (!a.e_min) throw InputError("--e-min is required for an energy grid");
    run.note("e_min", *a.e_min);
    run.note("spacing", a.spacing);
    if (a.spacing == "uniform") {
      grid = uniform(*a.e_min, a.e_max, a.count);
      std::reverse(grid.begin(), grid.end());
    } else if (a.spacing == "asymptote") {
      run.note("closest", a.closest);
      grid = asymptote_grid(a.e_max, *a.e_min, a.closest, a.count);
    } else {
      throw InputError("--spacing must be uniform or asymptote");
    }
  }

  for (int n : ns) {
    const std::string name = "line_n" + std::to_string(n) + ".csv";
    auto f = run.open(name);
    if (a.e0) {
      const MixedZeroLine line =
          a.h ? trace_mixed_radius(pot, n, ang, *a.e0, a.r_min, a.r_max, *a.h, so)
              : trace_mixed(pot, n, ang, *a.e0, a.e_max, a.lambda_max, a.count, so);
      write_line_csv(f, line, run.header());
    } else {
      const ZeroLine line = a.h ? trace_fixed_l_radius(pot, n, ang, uniform(a.r_min, a.r_max,
                                      static_cast<int>(std::lround((a.r_max - a.r_min) / *a.h)) + 1), so)
                                : trace_fixed_l(pot, n, ang, grid, so);
      write_line_csv(f, line, run.header());
    }
    files.push_back(name);
  }

  std::ostringstream gp;
  gp << "set datafile separator ','\nset xlabel 'E'\nset ylabel 'r'\nplot ";
  for (std::size_t i = 0; i < files.size(); ++i)
    gp << (i ? ", " : "") << "'" << files[i] << "' using ($1 eq 'E' ? $2 : 1/0):3 skip 1 title '"
       << files[i] << "' with lines";
  gp << '\n';
  run.plot("trace.gp", gp.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct Fig2Args {
  PotentialArgs pot;
  int n = 1;
  double r_min = 0.25, r_max = 4.5, h = 0.0025, tol = 1e-12;
};

int cmd_fig2(Fig2Args a, Run& run) {
  if (a.pot.spec.empty()) a.pot.spec = "two-step";
  const Potential pot = load_potential(a.pot, run);
  positive(a.h, "--dr");
  positive(a.tol, "--tol");
  run.note("n", std::to_string(a.n));
  run.note("r_min", a.r_min);
  run.note("r_max", a.r_max);
  run.note("dr", a.h);
  run.note("tol", a.tol);
  SolverOptions so;
  so.tol = a.tol;
  const auto r = uniform(a.r_min, a.r_max, static_cast<int>(std::lround((a.r_max - a.r_min) / a.h)) + 1);
  const ZeroLine line = trace_fixed_l_radius(pot, a.n, AngularParameter{}, r, so);
  const InverseLine inv(line);
  const JumpProfile prof = jump_profile(inv);
  {
    auto f = run.open("fig2.csv");
    write_metadata(f, run.header());
    f << "r,minus_E3_over_2E1,deltaV_local,error\n";
    for (std::size_t i = 0; i < prof.r.size(); ++i)
      f << format_number(prof.r[i]) << ',' << format_number(prof.raw[i]) << ','
        << format_number(prof.delta[i]) << ',' << format_number(prof.error[i]) << '\n';
  }
  {
    auto f = run.open("fig2_jumps.csv");
    write_jumps_csv(f, detect_jumps(inv), run.header());
  }
  run.plot("fig2.gp",
           "set datafile separator ','\nset xlabel 'r'\nset ylabel \"-E'''/(2E')\"\n"
           "plot 'fig2.csv' using 1:2 title \"-E'''/(2E')\" with lines\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct InvertPiecewiseArgs {
  std::string line;
  double tol = 1e-10;
  int stride = 10;
  bool no_validate = false;
};

int cmd_invert_piecewise(const InvertPiecewiseArgs& a, Run& run) {
  positive(a.tol, "--tol");
  run.note("line", a.line);
  run.note("tol", a.tol);
  run.note("stride", std::to_string(a.stride));
  ReconstructOptions ro;
  ro.solver.tol = a.tol;
  ro.residual_stride = a.stride;
  ro.validate = !a.no_validate;
  const AnyLine line = read_line_file(a.line);
  const ReconstructionReport rep =
      std::holds_alternative<ZeroLine>(line)
          ? reconstruct(std::get<ZeroLine>(line), ro)
          : reconstruct_mixed(std::get<MixedZeroLine>(line), ro);
  {
    auto f = run.open("potential.txt");
    for (const auto& [k, v] : run.header()) f << "# " << k << '=' << v << '\n';
    f << format_potential(Potential(rep.potential));
  }
  {
    auto f = run.open("jumps.csv");
    write_jumps_csv(f, rep.jumps, run.header());
  }
  {
    auto f = run.open("report.txt");
    write_metadata(f, run.header());
    f << "accepted=" << rep.potential.breakpoints().size() << '\n'
      << "residual=" << format_number(rep.residual) << '\n';
    if (rep.exclusion_window)
      f << "exclusion_window=" << format_number(rep.exclusion_window->first) << ','
        << format_number(rep.exclusion_window->second) << '\n';
    for (const auto& w : rep.warnings) f << "warning=" << w << '\n';
  }
  std::cout << format_potential(Potential(rep.potential));
  return 0;
}

// ---------------------------------------------------------------------------

struct InvertBornArgs {
  PotentialArgs pot;
  std::string dataset;
  double k0 = 5.0, k_max = 40.0, dk = 0.01, q_max = 0.0, tol = 1e-10;
  int lmax = 40;
  std::string source = "born";
};

int cmd_invert_born(const InvertBornArgs& a, Run& run) {
  positive(a.dk, "--dk");
  positive(a.tol, "--tol");
  PipelineOptions po;
  po.dk = a.dk;
  po.invert.q_max = a.q_max;
  po.solver.tol = a.tol;
  if (a.source == "exact") po.source = PhaseSource::exact;
  else if (a.source != "born") throw InputError("--source must be born or exact");
  run.note("q_max", a.q_max);

  std::optional<Potential> truth;
  PhaseShiftDataset data;
  if (!a.dataset.empty()) {
    run.note("dataset", a.dataset);
    std::ifstream in(a.dataset);
    if (!in) throw InputError("cannot open dataset '" + a.dataset + "'");
    data = read_dataset_csv(in);
  } else {
    if (a.pot.spec.empty()) throw InputError("need --potential or --dataset");
    truth = load_potential(a.pot, run);
    positive(a.k0, "--k0");
    run.note("k0", a.k0);
    run.note("k_max", a.k_max);
    run.note("dk", a.dk);
    run.note("lmax", std::to_string(a.lmax));
    run.note("source", a.source);
    run.note("tol", a.tol);
  }

  PipelineResult res;
  if (truth) {
    res = mixed_pipeline(*truth, a.k0, a.k_max, a.lmax, po);
  } else {
    // same stages as the pipeline, without a reference to score against
    res.dataset = data;
    res.low = g_low(data, low_grid(data.k0, po.low_points), po.low);
    res.high = g_high(data);
    res.profile = assemble_g(res.low, res.high, po.seam_tol);
    std::vector<double> r;
    for (int i = 0; i <= 790; ++i) r.push_back(0.1 + 0.01 * i);
    res.reconstruction = invert_sine(res.profile, r, po.invert);
    res.band_limited = invert_sine_band_limited(res.low, r);
  }

  {
    auto f = run.open("dataset.csv");
    write_dataset_csv(f, res.dataset, run.header());
  }
  {
    auto f = run.open("profile.csv");
    write_profile_csv(f, res.profile, run.header());
  }
  {
    auto f = run.open("reconstruction.csv");
    write_metadata(f, run.header());
    const auto& rec = res.reconstruction;
    f << (truth ? "r,V,V_band_limited,V_true\n" : "r,V,V_band_limited\n");
    for (std::size_t i = 0; i < rec.r.size(); ++i) {
      f << format_number(rec.r[i]) << ',' << format_number(rec.rV[i] / rec.r[i]) << ','
        << format_number(res.band_limited.rV[i] / rec.r[i]);
      if (truth) f << ',' << format_number((*truth)(rec.r[i]));
      f << '\n';
    }
  }
  {
    auto f = run.open("report.txt");
    write_metadata(f, run.header());
    f << "q_max=" << format_number(res.reconstruction.q_max) << '\n'
      << "truncation_bound=" << format_number(res.profile.truncation_bound) << '\n';
    if (truth)
      f << "seam_mismatch=" << format_number(res.seam_mismatch) << '\n'
        << "relative_l2_error=" << format_number(res.error) << '\n'
        << "band_limited_error=" << format_number(res.band_limited_error) << '\n';
    for (const auto& w : res.reconstruction.warnings) f << "warning=" << w << '\n';
  }
  if (truth)
    std::cout << "relative_l2_error=" << format_number(res.error) << '\n'
              << "band_limited_error=" << format_number(res.band_limited_error) << '\n';
  run.plot("born.gp",
           "set datafile separator ','\nset multiplot layout 1,2\n"
           "set xlabel 'q'; plot 'profile.csv' using 1:2 title 'g(q)' with lines\n"
           "set xlabel 'r'; plot 'reconstruction.csv' using 1:2 title 'V' with lines, "
           "'' using 1:3 title 'band-limited' with lines\nunset multiplot\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 7;
  int count = 0;
};

int cmd_verify(const VerifyArgs& a, Run& run) {
  run.note("seed", std::to_string(a.seed));
  run.note("count", std::to_string(a.count));
  std::vector<std::string> names;
  if (a.suite == "all") names = verify::suite_names();
  else names.push_back(a.suite);
  bool ok = true;
  for (const auto& name : names) {
    const auto rep = verify::run_suite(name, a.seed, a.count);
    const std::string text = verify::format_report(rep);
    std::cout << text;
    auto f = run.open("verify_" + name + ".txt");
    write_metadata(f, run.header());
    f << text;
    ok = ok && rep.passed();
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lines of zeros of radial Schrodinger solutions and the inverse problems built on them"};
  app.require_subcommand(1);
  Run run;
  std::string out = ".";
  bool gnuplot = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");
  };

  ForwardArgs fa;
  auto* forward = app.add_subcommand("forward", "zeros and phase shifts of a potential");
  add_potential(forward, fa.pot, true);
  forward->add_option("--fixed-l", fa.ell, "angular momentum ell");
  forward->add_option("--n", fa.n, "largest zero index");
  forward->add_option("--e-min", fa.e_min);
  forward->add_option("--e-max", fa.e_max);
  forward->add_option("--count", fa.count, "energies in the zero table");
  forward->add_option("--k-min", fa.k_min);
  forward->add_option("--k-max", fa.k_max);
  forward->add_option("--dk", fa.dk);
  forward->add_option("--tol", fa.tol);
  forward->add_flag("--born", fa.born, "add first-order Born phase shifts");
  common(forward);

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace", "trace lines of zeros");
  add_potential(trace, ta.pot, true);
  trace->add_option("--n", ta.n, "zero indices: 2, 1..4 or 1,3");
  trace->add_option("--fixed-l", ta.fixed_l, "ell (real) of the E segment");
  trace->add_option("--e0", ta.e0, "junction energy: trace a mixed line");
  trace->add_option("--e-min", ta.e_min, "lowest energy (or asymptote with --spacing asymptote)");
  trace->add_option("--e-max", ta.e_max);
  trace->add_option("--count", ta.count, "samples per segment");
  trace->add_option("--spacing", ta.spacing, "uniform or asymptote");
  trace->add_option("--closest", ta.closest, "asymptote spacing: closest approach");
  trace->add_option("--lambda-max", ta.lambda_max);
  trace->add_option("--dr", ta.h, "sample on a radius grid of this spacing instead");
  trace->add_option("--r-min", ta.r_min);
  trace->add_option("--r-max", ta.r_max);
  trace->add_option("--tol", ta.tol);
  common(trace);

  Fig2Args f2;
  auto* fig2 = app.add_subcommand("fig2", "third-derivative profile of the first s-wave line");
  add_potential(fig2, f2.pot, false);
  fig2->add_option("--n", f2.n);
  fig2->add_option("--dr", f2.h);
  fig2->add_option("--r-min", f2.r_min);
  fig2->add_option("--r-max", f2.r_max);
  fig2->add_option("--tol", f2.tol);
  common(fig2);

  InvertPiecewiseArgs ip;
  auto* invp = app.add_subcommand("invert-piecewise", "step potential from a line CSV");
  invp->add_option("--line", ip.line, "line CSV written by trace")->required();
  invp->add_option("--tol", ip.tol, "solver tolerance for validation");
  invp->add_option("--stride", ip.stride, "validate every k-th sample");
  invp->add_flag("--no-validate", ip.no_validate);
  common(invp);

  InvertBornArgs ib;
  auto* invb = app.add_subcommand("invert-born", "Born inversion from mixed phase-shift data");
  add_potential(invb, ib.pot, false);
  invb->add_option("--dataset", ib.dataset, "phase-shift CSV instead of a potential");
  invb->add_option("--k0", ib.k0);
  invb->add_option("--k-max", ib.k_max);
  invb->add_option("--dk", ib.dk);
  invb->add_option("--lmax", ib.lmax);
  invb->add_option("--qmax", ib.q_max, "sine-transform cutoff (0: automatic)");
  invb->add_option("--source", ib.source, "born or exact phase shifts");
  invb->add_option("--tol", ib.tol);
  common(invb);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "randomized property suites");
  verify->add_option("--suite", va.suite, "suite name or all");
  verify->add_option("--seed", va.seed);
  verify->add_option("--count", va.count, "cases (0: suite default)");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  run.out = out;
  run.gnuplot = gnuplot;
  try {
    if (*forward) return run.command = "forward", cmd_forward(fa, run);
    if (*trace) return run.command = "trace", cmd_trace(ta, run);
    if (*fig2) return run.command = "fig2", cmd_fig2(f2, run);
    if (*invp) return run.command = "invert-piecewise", cmd_invert_piecewise(ip, run);
    if (*invb) return run.command = "invert-born", cmd_invert_born(ib, run);
    if (*verify) return run.command = "verify", cmd_verify(va, run);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "range error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
