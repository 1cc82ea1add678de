#pragma once

// Plain-text key=value potential files:
//
//   type=piecewise
//   breakpoints=2,3
//   values=-2,-1
//
// Other types: zero; exponential (v0, mu); bargmann (gamma or gamma2, c); sampled
// (grid, values).
// Lines starting with '#' are comments. Decimals use '.' radix.

#include <iosfwd>
#include <string>
#include <vector>

#include "zeroinv/potentials.hpp"

namespace zeroinv {

Potential parse_potential(const std::string& text);
Potential read_potential_file(const std::string& path);
std::string format_potential(const Potential& potential);

/// 17-significant-digit decimal, '.' radix, locale independent.
std::string format_number(double x);
std::string format_list(const std::vector<double>& xs);
/// Comma-separated decimals; throws InputError on malformed entries.
std::vector<double> parse_list(const std::string& text);
double parse_number(const std::string& text);

}  // namespace zeroinv
