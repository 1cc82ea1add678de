#pragma once

// Reconstruction of a step potential from one line of zeros. Along the line
// psi(p(r), r) = 0 (p = E or lambda), a jump of V at r = a shows up as a jump
// of the third derivative:
//
//   p'''(a+) - p'''(a-) = -2 p'(a) [V(a+) - V(a-)].
//
// The potential is then recovered by summing jumps inward from the support end.

#include <optional>
#include <string>
#include <vector>

#include "zeroinv/potentials.hpp"
#include "zeroinv/radial_solver.hpp"
#include "zeroinv/zero_lines.hpp"

namespace zeroinv {

struct JumpRecord {
  double a = 0.0;
  double jump3 = 0.0;   ///< p'''(a+) - p'''(a-)
  double slope = 0.0;   ///< p'(a)
  double deltaV = 0.0;  ///< V(a+) - V(a-)
  double error = 0.0;   ///< standard error of deltaV
  double confidence = 0.0;
  ParamKind kind = ParamKind::energy;
  bool accepted = false;
  bool merged = false;  ///< several coarse candidates collapsed into this one
};

struct DetectOptions {
  int window = 16;         ///< samples per side in the coarse scan
  int degree = 4;          ///< local polynomial degree
  double threshold = 5.0;  ///< accept when |jump| > threshold * error
  int refine_window = 30;  ///< samples per side in the refinement fit
  int refine_degree = 10;  ///< polynomial degree of the refinement fit
  /// Jump law coefficient c in p''' jump = c p' dV (c = -2 from the derivation).
  double coefficient = -2.0;
};

/// Scan of one part of a line (r ascending, p sampled at r).
std::vector<JumpRecord> detect_jumps(const std::vector<double>& r, const std::vector<double>& p,
                                     ParamKind kind, const DetectOptions& options = {},
                                     const FreeReference* reference = nullptr);
/// All parts of an inverse line (the junction of a mixed line is never scanned).
std::vector<JumpRecord> detect_jumps(const InverseLine& line, const DetectOptions& options = {});

/// Jump fitted with its position fixed at `a` (samples within `window` of it).
JumpRecord fit_jump_at(const std::vector<double>& r, const std::vector<double>& p, double a,
                       ParamKind kind, const DetectOptions& options = {},
                       const FreeReference* reference = nullptr);

/// The same jump seen on r(E): V(r(E_a+)) - V(r(E_a-)) =
/// [r'''(E_a+) - r'''(E_a-)] / (2 r'(E_a)^3). Returned as V(a+) - V(a-) for
/// comparison with the E(r) route.
struct ConsistencyResult {
  double deltaV = 0.0;       ///< V(a+) - V(a-) via r(E)
  double error = 0.0;
  double deltaV_r = 0.0;     ///< same jump via E(r), split at the same point
  double error_r = 0.0;
  double E_split = 0.0;      ///< split localized on r(E) near E_a
  double a_split = 0.0;      ///< split localized on E(r) near r(E_a)
  double r3_jump = 0.0;      ///< r'''(E_a+) - r'''(E_a-)
  double r_slope = 0.0;      ///< r'(E_a)
  bool within_tol = false;     ///< |difference| <= abs_tol
  bool within_errors = false;  ///< |difference| <= 3 sigma (errors added in quadrature)
  bool agree = false;          ///< both
};
ConsistencyResult jump_consistency(const ZeroLine& line, double E_a,
                                   const DetectOptions& options = {}, double abs_tol = 1e-3);

struct ReconstructionReport {
  PiecewiseConstantPotential potential;
  std::vector<JumpRecord> jumps;  ///< all candidates, accepted or not
  double residual = 0.0;          ///< sup |p_rec - p_in| over re-solved samples
  std::vector<std::string> warnings;
  /// Mixed lines: radii around the junction that cannot be scanned.
  std::optional<std::pair<double, double>> exclusion_window;
};

struct ReconstructOptions {
  DetectOptions detect;
  SolverOptions solver;
  int residual_stride = 10;  ///< re-solve every k-th sample for validation
  bool validate = true;
};

ReconstructionReport reconstruct(const ZeroLine& line, const ReconstructOptions& options = {});
ReconstructionReport reconstruct_mixed(const MixedZeroLine& line,
                                       const ReconstructOptions& options = {});

/// Backward sweep: V = 0 beyond the last jump, V(left) = V(right) - deltaV.
PiecewiseConstantPotential backward_sweep(const std::vector<JumpRecord>& accepted);

/// Scan profile for plotting: at each interior sample boundary, the one-sided
/// third-derivative jump divided by -2 p' (the local deltaV estimate) and the
/// raw -p'''/(2 p') from the left fit.
struct JumpProfile {
  std::vector<double> r, raw, delta, error;
};
JumpProfile jump_profile(const InverseLine& line, const DetectOptions& options = {});

}  // namespace zeroinv
