#pragma once

#include <stdexcept>
#include <string>

namespace zeroinv {

/// Malformed user input: bad potential file, inconsistent grid, out-of-domain argument.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical search left its admissible range (zero beyond the radius ceiling,
/// truncation tolerance not reachable, query outside a sampled domain).
class RangeError : public std::runtime_error {
public:
  explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

/// A mathematical invariant that must hold by construction was observed broken.
/// Always signals a solver failure, never bad data.
class InvariantViolation : public std::logic_error {
public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

/// The n-th zero was not found below the radius ceiling.
class ZeroBeyondRange : public RangeError {
public:
  ZeroBeyondRange(int n, double searched)
      : RangeError("zero " + std::to_string(n) + " beyond range: searched up to r=" +
                   std::to_string(searched)),
        index(n), largest_radius(searched) {}
  int index;
  double largest_radius;
};

}  // namespace zeroinv
