#include "lasernoise/curve_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lasernoise/version.hpp"

namespace lasernoise::io {

namespace {

constexpr const char* kHeader = "omega_over_kappa,value,ci_low,ci_high";

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& tok, std::size_t lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size()) {
    throw std::runtime_error("curve csv: bad number '" + tok + "' on line " + std::to_string(lineno));
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve_csv(std::ostream& os, const SpectrumCurve& curve) {
  curve.validate();
  os << "# lasernoise spectrum\n";
  os << "# version: " << kVersion << '\n';
  os << "# label: " << curve.label << '\n';
  for (const auto& [k, v] : curve.meta) os << "# " << k << ": " << v << '\n';
  os << kHeader << '\n';
  for (std::size_t j = 0; j < curve.size(); ++j) {
    os << format_number(curve.omega[j]) << ',' << format_number(curve.values[j]) << ',';
    if (curve.has_ci()) os << format_number(curve.ci_low[j]) << ',' << format_number(curve.ci_high[j]);
    else os << ',';
    os << '\n';
  }
}

SpectrumCurve read_curve_csv(std::istream& is) {
  SpectrumCurve c;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  bool any_ci = false;
  bool any_blank_ci = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_seen) throw std::runtime_error("curve csv: comment after the column header, line " + std::to_string(lineno));
      const std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      const auto colon = body.find(": ");
      if (colon == std::string::npos) continue;  // banner line
      const std::string key = body.substr(0, colon);
      const std::string value = body.substr(colon + 2);
      if (key == "version") continue;
      if (key == "label") c.label = value;
      else c.add_meta(key, value);
      continue;
    }
    if (!header_seen) {
      if (trim(line) != kHeader) throw std::runtime_error("curve csv: missing column header on line " + std::to_string(lineno));
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(trim(tok));
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 4) throw std::runtime_error("curve csv: expected 4 columns on line " + std::to_string(lineno));
    c.omega.push_back(parse_double(cols[0], lineno));
    c.values.push_back(parse_double(cols[1], lineno));
    if (cols[2].empty() && cols[3].empty()) {
      any_blank_ci = true;
    } else {
      any_ci = true;
      c.ci_low.push_back(parse_double(cols[2], lineno));
      c.ci_high.push_back(parse_double(cols[3], lineno));
    }
  }
  if (!header_seen) throw std::runtime_error("curve csv: no column header");
  if (any_ci && any_blank_ci) throw std::runtime_error("curve csv: CI columns present on some rows only");
  c.validate();
  return c;
}

void write_curve_csv(const std::filesystem::path& path, const SpectrumCurve& curve) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_curve_csv(os, curve);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

SpectrumCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_curve_csv(is);
}

void write_gnuplot(std::ostream& os, const SpectrumCurve& curve) {
  os << "# " << curve.label << '\n';
  for (const auto& [k, v] : curve.meta) os << "# " << k << ": " << v << '\n';
  os << "# omega_over_kappa value ci_low ci_high\n";
  for (std::size_t j = 0; j < curve.size(); ++j) {
    os << format_number(curve.omega[j]) << ' ' << format_number(curve.values[j]) << ' ';
    if (curve.has_ci()) os << format_number(curve.ci_low[j]) << ' ' << format_number(curve.ci_high[j]);
    else os << "NaN NaN";
    os << '\n';
  }
}

void write_gnuplot(const std::filesystem::path& path, const SpectrumCurve& curve) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_gnuplot(os, curve);
}

}  // namespace lasernoise::io
