#include "zeroinv/line_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "zeroinv/errors.hpp"
#include "zeroinv/potential_io.hpp"

namespace zeroinv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(std::istream& in, const std::string& expected_header) {
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      std::istringstream tokens(s.substr(1));
      std::string tok;
      while (tokens >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos && eq > 0) t.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    if (t.header.empty()) {
      t.header = split(s, ',');
      if (s != expected_header)
        throw InputError("line " + std::to_string(lineno) + ": expected header '" +
                         expected_header + "', got '" + s + "'");
      continue;
    }
    auto row = split(s, ',');
    if (row.size() != t.header.size())
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields");
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw InputError("missing header '" + expected_header + "'");
  return t;
}

const std::string& need(const Table& t, const std::string& key) {
  auto it = t.meta.find(key);
  if (it == t.meta.end()) throw InputError("missing metadata '" + key + "'");
  return it->second;
}

int parse_int(const std::string& s) {
  const double x = parse_number(s);
  if (x != static_cast<int>(x)) throw InputError("expected an integer, got '" + s + "'");
  return static_cast<int>(x);
}

void line_header(std::ostream& out, int n, double lambda0, const std::string& e0,
                 const Metadata& meta) {
  out << "# n=" << n << " ell0=" << format_number(lambda0) << " E0=" << e0 << '\n';
  write_metadata(out, meta);
  out << "param_kind,param_value,r\n";
}

}  // namespace

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

Metadata read_metadata(std::istream& in) {
  Metadata m;
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty() || s.front() != '#') continue;
    std::istringstream tokens(s.substr(1));
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos && eq > 0) m.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
  }
  return m;
}

void write_line_csv(std::ostream& out, const ZeroLine& line, const Metadata& meta) {
  Metadata m = meta;
  if (line.truncated_at) m.emplace_back("truncated_at", format_number(*line.truncated_at));
  line_header(out, line.n, line.ell0.lambda, "none", m);
  for (std::size_t i = 0; i < line.size(); ++i)
    out << "E," << format_number(line.E[i]) << ',' << format_number(line.r[i]) << '\n';
}

void write_line_csv(std::ostream& out, const MixedZeroLine& line, const Metadata& meta) {
  Metadata m = meta;
  m.emplace_back("r0", format_number(line.r0));
  line_header(out, line.n, line.ell0.lambda, format_number(line.E0), m);
  for (std::size_t i = 0; i < line.E.size(); ++i)
    out << "E," << format_number(line.E[i]) << ',' << format_number(line.rE[i]) << '\n';
  for (std::size_t i = 0; i < line.lambda.size(); ++i)
    out << "lambda," << format_number(line.lambda[i]) << ',' << format_number(line.rL[i]) << '\n';
}

AnyLine read_line_csv(std::istream& in) {
  const Table t = read_table(in, "param_kind,param_value,r");
  const int n = parse_int(need(t, "n"));
  if (n < 1) throw InputError("line file: n must be >= 1");
  const AngularParameter ell0(parse_number(need(t, "ell0")));
  const std::string e0 = need(t, "E0");

  std::vector<double> E, rE, lam, rL;
  for (const auto& row : t.rows) {
    const double p = parse_number(row[1]), r = parse_number(row[2]);
    if (row[0] == "E") {
      if (!lam.empty()) throw InputError("line file: E rows must precede lambda rows");
      E.push_back(p);
      rE.push_back(r);
    } else if (row[0] == "lambda") {
      lam.push_back(p);
      rL.push_back(r);
    } else {
      throw InputError("line file: unknown param_kind '" + row[0] + "'");
    }
  }

  if (e0 == "none") {
    if (!lam.empty()) throw InputError("line file: lambda rows need E0");
    ZeroLine line;
    line.n = n;
    line.ell0 = ell0;
    line.E = std::move(E);
    line.r = std::move(rE);
    line.backend.assign(line.r.size(), Backend::automatic);
    if (auto it = t.meta.find("truncated_at"); it != t.meta.end())
      line.truncated_at = parse_number(it->second);
    for (std::size_t i = 1; i < line.size(); ++i)
      if (!(line.E[i] < line.E[i - 1]) || !(line.r[i] > line.r[i - 1]))
        throw InputError("line file: E must decrease and r increase");
    return line;
  }
  MixedZeroLine line;
  line.n = n;
  line.ell0 = ell0;
  line.E0 = parse_number(e0);
  if (E.empty() || lam.empty()) throw InputError("mixed line file: both parts are required");
  line.r0 = rE.back();
  if (std::abs(E.back() - line.E0) > 1e-12 * std::max(1.0, std::abs(line.E0)) ||
      std::abs(rL.front() - line.r0) > 1e-12 * std::max(1.0, line.r0))
    throw InputError("mixed line file: parts must meet at (E0, r0)");
  line.E = std::move(E);
  line.rE = std::move(rE);
  line.lambda = std::move(lam);
  line.rL = std::move(rL);
  return line;
}

AnyLine read_line_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open line file '" + path + "'");
  return read_line_csv(f);
}

void write_jumps_csv(std::ostream& out, const std::vector<JumpRecord>& jumps,
                     const Metadata& meta) {
  write_metadata(out, meta);
  out << "a,jump3,slope,deltaV,confidence,error,kind,accepted,merged\n";
  for (const auto& j : jumps)
    out << format_number(j.a) << ',' << format_number(j.jump3) << ',' << format_number(j.slope)
        << ',' << format_number(j.deltaV) << ',' << format_number(j.confidence) << ','
        << format_number(j.error) << ',' << (j.kind == ParamKind::energy ? "E" : "lambda") << ','
        << (j.accepted ? 1 : 0) << ',' << (j.merged ? 1 : 0) << '\n';
}

void write_dataset_csv(std::ostream& out, const PhaseShiftDataset& data, const Metadata& meta) {
  out << "# ell0=" << data.ell0 << " k0=" << format_number(data.k0)
      << " source=" << (data.source == PhaseSource::born ? "born" : "exact") << '\n';
  write_metadata(out, meta);
  out << "branch,param,delta\n";
  for (const auto& s : data.fixed_l_branch)
    out << "k," << format_number(s.k) << ',' << format_number(s.delta) << '\n';
  for (const auto& s : data.fixed_E_branch)
    out << "l," << s.ell << ',' << format_number(s.delta) << '\n';
}

PhaseShiftDataset read_dataset_csv(std::istream& in) {
  const Table t = read_table(in, "branch,param,delta");
  PhaseShiftDataset d;
  d.ell0 = parse_int(need(t, "ell0"));
  d.k0 = parse_number(need(t, "k0"));
  if (auto it = t.meta.find("source"); it != t.meta.end()) {
    if (it->second == "exact") d.source = PhaseSource::exact;
    else if (it->second != "born") throw InputError("dataset: unknown source '" + it->second + "'");
  }
  for (const auto& row : t.rows) {
    if (row[0] == "k") d.fixed_l_branch.push_back({parse_number(row[1]), parse_number(row[2])});
    else if (row[0] == "l") d.fixed_E_branch.push_back({parse_int(row[1]), parse_number(row[2])});
    else throw InputError("dataset: unknown branch '" + row[0] + "'");
  }
  d.validate();
  return d;
}

void write_profile_csv(std::ostream& out, const SineProfile& profile, const Metadata& meta) {
  out << "# seam_index=" << profile.seam_index
      << " truncation_bound=" << format_number(profile.truncation_bound) << '\n';
  write_metadata(out, meta);
  out << "q,g,region\n";
  for (std::size_t i = 0; i < profile.q.size(); ++i) {
    const char* tag = profile.region[i] == Region::low    ? "low"
                      : profile.region[i] == Region::high ? "high"
                                                          : "analytic";
    out << format_number(profile.q[i]) << ',' << format_number(profile.g[i]) << ',' << tag << '\n';
  }
}

SineProfile read_profile_csv(std::istream& in) {
  const Table t = read_table(in, "q,g,region");
  SineProfile p;
  if (auto it = t.meta.find("seam_index"); it != t.meta.end()) p.seam_index = parse_int(it->second);
  if (auto it = t.meta.find("truncation_bound"); it != t.meta.end())
    p.truncation_bound = parse_number(it->second);
  for (const auto& row : t.rows) {
    p.q.push_back(parse_number(row[0]));
    p.g.push_back(parse_number(row[1]));
    if (row[2] == "low") p.region.push_back(Region::low);
    else if (row[2] == "high") p.region.push_back(Region::high);
    else if (row[2] == "analytic") p.region.push_back(Region::analytic);
    else throw InputError("profile: unknown region '" + row[2] + "'");
  }
  for (std::size_t i = 1; i < p.q.size(); ++i)
    if (!(p.q[i] > p.q[i - 1])) throw InputError("profile: q must increase");
  return p;
}

}  // namespace zeroinv
