#pragma once

// Randomized property suites. Every suite is a pure function of its seed: the
// same seed gives the same potentials, the same cases and the same report.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "zeroinv/potentials.hpp"
#include "zeroinv/zero_lines.hpp"

namespace zeroinv::verify {

/// mt19937_64 with its own uniform mapping, so draws do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  ///< [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi);  ///< inclusive

private:
  std::mt19937_64 engine_;
};

struct RandomPiecewiseOptions {
  int min_steps = 1;
  int max_steps = 3;
  double break_lo = 0.5, break_hi = 4.0;
  double value_lo = -5.0, value_hi = 0.0;
  /// Smallest |V(a+) - V(a-)| at every breakpoint (including the drop to the
  /// zero tail) and smallest spacing between breakpoints.
  double min_jump = 0.25;
  double min_spacing = 0.3;
};

PiecewiseConstantPotential random_piecewise(Rng& rng, const RandomPiecewiseOptions& options = {});

/// First s-wave line on the radius grid used by the inversion suites.
struct LineGrid {
  double r_min = 0.25, r_max = 4.5, h = 0.0025;
};
ZeroLine scan_line(const Potential& potential, const LineGrid& grid = {},
                   const SolverOptions& options = {});

struct CaseResult {
  std::string label;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CaseResult> cases;
  std::map<std::string, double> metrics;  ///< worst-case figures

  int failures() const;
  bool passed() const { return !cases.empty() && failures() == 0; }
};

SuiteReport monotonicity_suite(std::uint64_t seed, int count = 100);
SuiteReport distinguishability_suite(std::uint64_t seed, int count = 100);
SuiteReport roundtrip_suite(std::uint64_t seed, int count = 50);
SuiteReport equivalence_suite(std::uint64_t seed, int count = 20);
SuiteReport born_suite(std::uint64_t seed);

const std::vector<std::string>& suite_names();
/// count <= 0 uses the suite's default. Throws InputError for unknown names.
SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count = 0);

/// key=value summary lines followed by one line per failed case.
std::string format_report(const SuiteReport& report);

}  // namespace zeroinv::verify
