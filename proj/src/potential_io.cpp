#include "zeroinv/potential_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "zeroinv/errors.hpp"

namespace zeroinv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& type) {
  auto it = kv.find(key);
  if (it == kv.end()) throw InputError("potential type=" + type + " requires key '" + key + "'");
  return it->second;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_number(xs[i]);
  }
  return out;
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(x))
    throw InputError("malformed number '" + t + "'");
  return x;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

Potential parse_potential(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("potential file line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto it = kv.find("type");
  if (it == kv.end()) throw InputError("potential file: missing 'type'");
  const std::string type = it->second;

  if (type == "zero") return Potential::zero();
  if (type == "piecewise") {
    auto b = parse_list(require(kv, "breakpoints", type));
    auto v = parse_list(require(kv, "values", type));
    return Potential::piecewise(std::move(b), std::move(v));
  }
  if (type == "exponential")
    return Potential::exponential(parse_number(require(kv, "v0", type)),
                                  parse_number(require(kv, "mu", type)));
  if (type == "bargmann") {
    double gamma = 0.0;
    if (kv.count("gamma")) {
      gamma = parse_number(kv.at("gamma"));
    } else {
      const double g2 = parse_number(require(kv, "gamma2", type));
      if (!(g2 > 0.0)) throw InputError("bargmann: gamma2 must be positive");
      gamma = std::sqrt(g2);
    }
    const double c = kv.count("c") ? parse_number(kv.at("c")) : 1.0;
    return Potential::bargmann(gamma, c);
  }
  if (type == "sampled")
    return Potential(SampledPotential(parse_list(require(kv, "grid", type)),
                                      parse_list(require(kv, "values", type))));
  throw InputError("unknown potential type '" + type + "'");
}

Potential read_potential_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open potential file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_potential(ss.str());
}

std::string format_potential(const Potential& potential) {
  std::ostringstream out;
  out << "type=" << potential.kind() << '\n';
  if (auto* p = potential.get_if<PiecewiseConstantPotential>()) {
    out << "breakpoints=" << format_list(p->breakpoints()) << '\n';
    out << "values=" << format_list(p->values()) << '\n';
  } else if (auto* e = potential.get_if<ExponentialPotential>()) {
    out << "v0=" << format_number(e->v0) << "\nmu=" << format_number(e->mu) << '\n';
  } else if (auto* b = potential.get_if<BargmannOneBoundPotential>()) {
    out << "gamma=" << format_number(b->gamma) << "\nc=" << format_number(b->c)
        << '\n';
  } else if (auto* s = potential.get_if<SampledPotential>()) {
    out << "grid=" << format_list(s->grid()) << '\n';
    out << "values=" << format_list(s->values()) << '\n';
  }
  return out.str();
}

}  // namespace zeroinv
