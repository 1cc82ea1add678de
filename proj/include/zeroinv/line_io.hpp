#pragma once

// CSV interchange for lines, jump tables and Born data. Every file opens with
// '#' metadata lines (key=value); columns follow a single header row.
//
//   # n=1 ell0=0.5 E0=none
//   param_kind,param_value,r
//   E,100,0.314...
//
// Mixed lines list the E part (ending at E0) then the lambda part (starting
// at lambda0), both carrying the junction.

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zeroinv/born_inversion.hpp"
#include "zeroinv/piecewise_inversion.hpp"
#include "zeroinv/zero_lines.hpp"

namespace zeroinv {

using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_metadata(std::ostream& out, const Metadata& meta);

void write_line_csv(std::ostream& out, const ZeroLine& line, const Metadata& meta = {});
void write_line_csv(std::ostream& out, const MixedZeroLine& line, const Metadata& meta = {});
using AnyLine = std::variant<ZeroLine, MixedZeroLine>;
/// Throws InputError on malformed content.
AnyLine read_line_csv(std::istream& in);
AnyLine read_line_file(const std::string& path);

void write_jumps_csv(std::ostream& out, const std::vector<JumpRecord>& jumps,
                     const Metadata& meta = {});

void write_dataset_csv(std::ostream& out, const PhaseShiftDataset& data, const Metadata& meta = {});
PhaseShiftDataset read_dataset_csv(std::istream& in);

void write_profile_csv(std::ostream& out, const SineProfile& profile, const Metadata& meta = {});
SineProfile read_profile_csv(std::istream& in);

/// '#' lines of a file as key=value pairs (tokens without '=' are skipped).
Metadata read_metadata(std::istream& in);

}  // namespace zeroinv
