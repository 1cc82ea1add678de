#pragma once

// Born inversion from mixed phase-shift data. With
//
//   g(q) = int_0^inf r V(r) sin(q r) dr,
//
// the fixed-energy phase shifts delta_l(k0) give g on [0, 2 k0] through the
// partial-wave sum, the s-wave phase shifts delta_0(k), k >= k0 give it beyond
// through g(2k) = -d(k delta_0)/dk, and r V(r) = (2/pi) int_0^inf g(q) sin(q r) dq.

#include <string>
#include <vector>

#include "zeroinv/errors.hpp"
#include "zeroinv/potentials.hpp"
#include "zeroinv/radial_solver.hpp"

namespace zeroinv {

/// -(1/k) int_0^inf sin^2(k r) V(r) dr.
double born_phase_swave(const Potential& potential, double k);
/// -(1/k) int_0^inf jhat_l(k r)^2 V(r) dr.
double born_phase_partial(const Potential& potential, int ell, double k);

enum class PhaseSource { born, exact };

struct PhaseShiftDataset {
  int ell0 = 0;
  double k0 = 0.0;
  struct KSample {
    double k, delta;
  };
  struct LSample {
    int ell;
    double delta;
  };
  std::vector<KSample> fixed_l_branch;  ///< k ascending from k0
  std::vector<LSample> fixed_E_branch;  ///< ell = ell0, ell0 + 1, ...
  PhaseSource source = PhaseSource::born;

  /// Throws InputError on unsorted grids, gaps in ell or pi-sized jumps.
  void validate() const;
};

/// k grid: k0, k0 + dk, ..., up to k_max (inclusive when it lands on the grid).
PhaseShiftDataset make_dataset(const Potential& potential, double k0, double k_max, double dk,
                               int L_max, PhaseSource source = PhaseSource::born,
                               const SolverOptions& options = {});

enum class Region { low, high, analytic };

struct SineProfile {
  std::vector<double> q;
  std::vector<double> g;
  std::vector<Region> region;
  int seam_index = -1;  ///< index of q = 2 k0 after assembly
  double truncation_bound = 0.0;  ///< low route: estimated error from the ell cut
};

/// g(q) = 2 v0 mu q / (mu^2 + q^2)^2.
double exponential_sine_transform(double v0, double mu, double q);
SineProfile analytic_profile(double v0, double mu, const std::vector<double>& q);

/// High region from the s-wave branch: samples q = 2k.
SineProfile g_high(const PhaseShiftDataset& data);

struct LowOptions {
  /// Extrapolate delta_l beyond the last datum along a fitted envelope.
  bool extrapolate = true;
  /// Relative to max |g|; the truncation bound must stay below it.
  double truncation_tol = 1e-3;
};
/// Low region from the fixed-energy branch on `q` (within [0, 2 k0]).
SineProfile g_low(const PhaseShiftDataset& data, const std::vector<double>& q,
                  const LowOptions& options = {});
/// Uniform grid of `count` points on [0, 2 k0].
std::vector<double> low_grid(double k0, int count);

struct SeamMismatch : RangeError {
  SeamMismatch(double low, double high, double scale);
  double low, high, scale;
};

/// Concatenation at q = 2 k0 (seam value averaged). Throws SeamMismatch when
/// |g_low - g_high| > seam_tol * max|g|.
SineProfile assemble_g(const SineProfile& low, const SineProfile& high, double seam_tol = 1e-3);

struct SineInversion {
  SampledPotential potential;
  std::vector<double> r, rV;
  double q_max = 0.0;
  std::vector<std::string> warnings;
};

struct InvertOptions {
  double q_max = 0.0;     ///< 0: pick from the decay of g
  double tail_tol = 1e-2;  ///< |g(q_max)| relative to max |g| before a warning
  bool tail_correction = true;
};

/// Default cutoff: 12 mu_est, mu_est = sqrt(3) q_peak (the peak of g for an
/// exponential of range 1/mu_est).
double default_q_max(const SineProfile& profile);

SineInversion invert_sine(const SineProfile& profile, const std::vector<double>& r,
                          const InvertOptions& options = {});
/// The fixed-energy-only answer: g assumed to vanish beyond the last sample.
SineInversion invert_sine_band_limited(const SineProfile& low, const std::vector<double>& r);

/// sqrt(int (a - b)^2 dr / int b^2 dr) on the grid (trapezoid).
double relative_l2_error(const std::vector<double>& r, const std::vector<double>& approx,
                         const std::vector<double>& exact);

struct PipelineOptions {
  double dk = 0.01;
  int low_points = 401;
  std::vector<double> r;  ///< empty: 0.1 .. 8 step 0.01
  double error_r_min = 0.1, error_r_max = 8.0;
  double seam_tol = 1e-3;
  PhaseSource source = PhaseSource::born;
  InvertOptions invert;
  LowOptions low;
  SolverOptions solver;
};

struct PipelineResult {
  PhaseShiftDataset dataset;
  SineProfile low, high, profile;
  SineInversion reconstruction, band_limited;
  double error = 0.0;               ///< relative L2 on [error_r_min, error_r_max]
  double band_limited_error = 0.0;
  double seam_mismatch = 0.0;       ///< |g_low - g_high| at 2 k0 over max |g|
};

PipelineResult mixed_pipeline(const Potential& potential, double k0, double k_max, int L_max,
                              const PipelineOptions& options = {});

}  // namespace zeroinv
