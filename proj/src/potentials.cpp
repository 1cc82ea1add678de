#include "zeroinv/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zeroinv/errors.hpp"
#include "zeroinv/numerics.hpp"

namespace zeroinv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------

PiecewiseConstantPotential::PiecewiseConstantPotential(std::vector<double> breakpoints,
                                                       std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() != values_.size())
    throw InputError("piecewise potential: need one value per breakpoint (got " +
                     std::to_string(breakpoints_.size()) + " breakpoints, " +
                     std::to_string(values_.size()) + " values)");
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (!std::isfinite(breakpoints_[j]) || !std::isfinite(values_[j]))
      throw InputError("piecewise potential: non-finite entry");
    if (breakpoints_[j] <= 0.0)
      throw InputError("piecewise potential: breakpoints must be positive");
    if (j > 0 && breakpoints_[j] <= breakpoints_[j - 1])
      throw InputError("piecewise potential: breakpoints must be strictly increasing");
  }
}

double PiecewiseConstantPotential::operator()(double r) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), r);
  auto j = static_cast<std::size_t>(it - breakpoints_.begin());
  return j < values_.size() ? values_[j] : 0.0;
}

double PiecewiseConstantPotential::left_limit(double r) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), r);
  auto j = static_cast<std::size_t>(it - breakpoints_.begin());
  return j < values_.size() ? values_[j] : 0.0;
}

std::vector<PiecewiseConstantPotential::Segment> PiecewiseConstantPotential::segments() const {
  std::vector<Segment> out;
  double start = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    out.push_back({start, breakpoints_[j], values_[j]});
    start = breakpoints_[j];
  }
  out.push_back({start, kInf, 0.0});
  return out;
}

// ---------------------------------------------------------------------------

double bargmann_profile(double gamma, double c, double r) {
  if (!(gamma > 0.0) || !(c > 0.0)) throw InputError("bargmann: gamma and c must be positive");
  if (r < 0.0) throw InputError("bargmann: negative radius");
  // With S = sinh(x), C = cosh(x), x = gamma r, W = 1 + c(SC/2 - x/2),
  // W' = c gamma S^2 and W'' = 2 c gamma^2 S C:
  //   W'' W - W'^2 = c gamma^2 S (2C + cS - c x C),
  // which has no cancellation between leading terms. Everything is scaled by
  // e^{-2x} so large x cannot overflow.
  const double x = gamma * r;
  const double e2 = std::exp(-2.0 * x);
  const double s = -0.5 * std::expm1(-2.0 * x);  // S e^{-x}
  const double ch = 0.5 * (1.0 + e2);            // C e^{-x}
  // W e^{-2x}; the bracket equals (sinh(2x)/4 - x/2) e^{-2x}
  double bracket;
  if (x < 1e-2) {
    // sinh(2x)/4 - x/2 = x^3/3 + x^5/15 + ...
    const double x2 = x * x;
    bracket = x * x2 / 3.0 * (1.0 + x2 / 5.0 + 2.0 * x2 * x2 / 105.0) * e2;
  } else {
    bracket = -0.125 * std::expm1(-4.0 * x) - 0.5 * x * e2;
  }
  const double w = e2 + c * bracket;
  const double num = c * s * (2.0 * ch + c * s - c * x * ch);  // (W''W - W'^2) e^{-2x} / gamma^2
  return -2.0 * gamma * gamma * num * e2 / (w * w);
}

double BargmannOneBoundPotential::operator()(double r) const {
  return bargmann_profile(gamma, c, r);
}

double ExponentialPotential::operator()(double r) const { return v0 * std::exp(-mu * r); }

// ---------------------------------------------------------------------------

SampledPotential::SampledPotential(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() != values_.size() || grid_.size() < 2)
    throw InputError("sampled potential: grid and values must have equal length >= 2");
  if (grid_.front() < 0.0) throw InputError("sampled potential: negative grid radius");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (grid_[i] <= grid_[i - 1])
      throw InputError("sampled potential: grid must be strictly increasing");
}

double SampledPotential::operator()(double r) const {
  if (r <= grid_.front()) return values_.front();
  if (r > grid_.back()) return 0.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
  auto i = static_cast<std::size_t>(it - grid_.begin());
  if (i >= grid_.size()) return values_.back();
  const double t = (r - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return (1.0 - t) * values_[i - 1] + t * values_[i];
}

// ---------------------------------------------------------------------------

Potential::Potential(PotentialModel model) : model_(std::move(model)) {
  std::visit(overloaded{
                 [](const BargmannOneBoundPotential& b) {
                   if (!(b.gamma > 0.0) || !(b.c > 0.0))
                     throw InputError("bargmann: gamma and c must be positive");
                 },
                 [](const ExponentialPotential& e) {
                   if (!(e.mu > 0.0) || !std::isfinite(e.v0))
                     throw InputError("exponential: mu must be positive and v0 finite");
                 },
                 [](const auto&) {},
             },
             model_);
}

Potential Potential::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  return Potential(PiecewiseConstantPotential(std::move(breakpoints), std::move(values)));
}
Potential Potential::exponential(double v0, double mu) {
  return Potential(ExponentialPotential{v0, mu});
}
Potential Potential::bargmann(double gamma, double c) {
  return Potential(BargmannOneBoundPotential{gamma, c});
}
Potential Potential::two_step_example() { return piecewise({2.0, 3.0}, {-2.0, -1.0}); }

double Potential::operator()(double r) const {
  if (!(r >= 0.0)) throw InputError("potential evaluated at negative radius");
  return std::visit(overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [r](const auto& m) { return m(r); },
                    },
                    model_);
}

bool Potential::is_zero() const {
  if (std::holds_alternative<ZeroPotential>(model_)) return true;
  if (auto* p = get_if<PiecewiseConstantPotential>())
    return std::all_of(p->values().begin(), p->values().end(), [](double v) { return v == 0.0; });
  if (auto* e = get_if<ExponentialPotential>()) return e->v0 == 0.0;
  if (auto* s = get_if<SampledPotential>())
    return std::all_of(s->values().begin(), s->values().end(), [](double v) { return v == 0.0; });
  return false;
}

std::string Potential::kind() const {
  return std::visit(overloaded{
                        [](const ZeroPotential&) { return std::string("zero"); },
                        [](const PiecewiseConstantPotential&) { return std::string("piecewise"); },
                        [](const BargmannOneBoundPotential&) { return std::string("bargmann"); },
                        [](const ExponentialPotential&) { return std::string("exponential"); },
                        [](const SampledPotential&) { return std::string("sampled"); },
                    },
                    model_);
}

std::span<const double> Potential::discontinuities() const {
  if (auto* p = get_if<PiecewiseConstantPotential>()) return p->breakpoints();
  return {};
}

double Potential::value_at_origin() const { return (*this)(0.0); }

double Potential::support_radius(double tol) const {
  return std::visit(
      overloaded{
          [](const ZeroPotential&) { return 0.0; },
          [](const PiecewiseConstantPotential& p) {
            return p.breakpoints().empty() ? 0.0 : p.breakpoints().back();
          },
          [](const SampledPotential& s) { return s.grid().back(); },
          [tol](const ExponentialPotential& e) {
            if (e.v0 == 0.0) return 0.0;
            return std::max(0.0, std::log(std::abs(e.v0) / tol) / e.mu);
          },
          [tol](const BargmannOneBoundPotential& b) {
            // V changes sign once in the tail, so probe a stretch rather than a point.
            auto stretch_max = [&](double r) {
              double m = 0.0;
              for (int i = 0; i <= 8; ++i) m = std::max(m, std::abs(b(r * (1.0 + 0.125 * i))));
              return m;
            };
            double r = 1.0 / b.gamma;
            while (stretch_max(r) > tol && r < 1e4) r *= 1.25;
            return r;
          },
      },
      model_);
}

double Potential::lower_bound() const {
  return std::visit(overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [](const PiecewiseConstantPotential& p) {
                          double m = 0.0;
                          for (double v : p.values()) m = std::min(m, v);
                          return m;
                        },
                        [](const SampledPotential& s) {
                          double m = 0.0;
                          for (double v : s.values()) m = std::min(m, v);
                          return m;
                        },
                        [](const ExponentialPotential& e) { return std::min(0.0, e.v0); },
                        [](const BargmannOneBoundPotential& b) {
                          // Sampled minimum with a safety margin; V is smooth on the
                          // scale 1/gamma.
                          double m = 0.0;
                          for (int i = 0; i <= 4000; ++i) m = std::min(m, b(i * 2e-3 / b.gamma));
                          return 1.05 * m;
                        },
                    },
                    model_);
}

double Potential::upper_bound() const {
  return std::visit(overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [](const PiecewiseConstantPotential& p) {
                          double m = 0.0;
                          for (double v : p.values()) m = std::max(m, v);
                          return m;
                        },
                        [](const SampledPotential& s) {
                          double m = 0.0;
                          for (double v : s.values()) m = std::max(m, v);
                          return m;
                        },
                        [](const ExponentialPotential& e) { return std::max(0.0, e.v0); },
                        [](const BargmannOneBoundPotential&) { return 0.0; },
                    },
                    model_);
}

// ---------------------------------------------------------------------------

IntegrabilityReport check_integrability(const Potential& potential, double b, double r_max) {
  if (!(b > 0.0) || !(r_max > b)) throw InputError("check_integrability: need 0 < b < r_max");
  IntegrabilityReport rep;
  auto breaks = potential.discontinuities();
  rep.near_origin_integral = numerics::integrate(
      [&](double r) { return r * std::abs(potential(r)); }, 0.0, b, 1e-12, breaks);
  const double body = numerics::integrate([&](double r) { return std::abs(potential(r)); }, b,
                                          r_max, 1e-12, breaks);

  // Tail beyond r_max: fit |V| ~ A r^{-p} e^{-m r} through three points on the
  // last stretch and integrate the model. Divergence when the fitted decay is
  // no faster than 1/r.
  const double r1 = 0.75 * r_max, r2 = 0.875 * r_max, r3 = r_max;
  const double v1 = std::abs(potential(r1)), v2 = std::abs(potential(r2)),
               v3 = std::abs(potential(r3));
  double remainder = 0.0;
  bool finite = std::isfinite(rep.near_origin_integral) && std::isfinite(body);
  if (v3 > 0.0 && v2 > 0.0 && v1 > 0.0) {
    // ln v = ln A - p ln r - m r: solve the 3x3 system.
    Eigen::Matrix3d a;
    a << 1.0, -std::log(r1), -r1, 1.0, -std::log(r2), -r2, 1.0, -std::log(r3), -r3;
    Eigen::Vector3d rhs(std::log(v1), std::log(v2), std::log(v3));
    Eigen::Vector3d sol = a.colPivHouseholderQr().solve(rhs);
    const double p = sol(1), m = sol(2);
    if (m > 1e-9) {
      // integral of e^{-m r} r^{-p} from r_max ~ v3 / (m + p/r_max) for m r_max >> 1
      remainder = v3 / (m + p / r_max);
    } else if (p > 1.0 + 1e-6) {
      remainder = v3 * r_max / (p - 1.0);
    } else {
      finite = false;
      remainder = std::numeric_limits<double>::infinity();
    }
  }
  rep.tail_remainder = remainder;
  rep.tail_integral = body + remainder;
  rep.both_finite = finite && std::isfinite(rep.tail_integral);
  return rep;
}

}  // namespace zeroinv
