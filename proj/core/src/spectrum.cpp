#include "lasernoise/spectrum.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lasernoise {

std::optional<std::string> SpectrumCurve::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void SpectrumCurve::validate() const {
  if (values.size() != omega.size()) throw std::invalid_argument("spectrum: omega/values length mismatch");
  if (ci_low.size() != ci_high.size()) throw std::invalid_argument("spectrum: ci_low/ci_high length mismatch");
  if (!ci_low.empty() && ci_low.size() != omega.size()) throw std::invalid_argument("spectrum: CI length mismatch");
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (!std::isfinite(omega[j]) || !std::isfinite(values[j])) {
      throw std::invalid_argument("spectrum: non-finite entry at index " + std::to_string(j));
    }
    if (j > 0 && !(omega[j] > omega[j - 1])) {
      throw std::invalid_argument("spectrum: omega not strictly increasing at index " + std::to_string(j));
    }
  }
}

std::vector<double> linear_grid(std::size_t n, double lo, double hi) {
  if (n < 2 || !(hi > lo) || lo < 0.0) throw std::invalid_argument("linear_grid: need n >= 2 and 0 <= lo < hi");
  std::vector<double> g(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) g[j] = lo + step * static_cast<double>(j);
  g.back() = hi;
  return g;
}

std::vector<double> log_grid(std::size_t n, double lo, double hi, bool include_zero) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_grid: need n >= 2 and 0 < lo < hi");
  std::vector<double> g;
  g.reserve(n + (include_zero ? 1 : 0));
  if (include_zero) g.push_back(0.0);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t j = 0; j < n; ++j) {
    g.push_back(std::exp(a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1)));
  }
  g[include_zero ? 1 : 0] = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_grid() { return log_grid(512, 1e-2, 1e2, true); }

std::vector<double> parse_grid(const std::string& spec) {
  std::istringstream is(spec);
  std::string tok;
  std::vector<double> parts;
  while (std::getline(is, tok, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid: cannot parse '" + tok + "' in '" + spec + "'");
    }
  }
  if (parts.size() != 3) throw std::invalid_argument("grid: expected n,lo,hi but got '" + spec + "'");
  if (parts[0] < 2 || parts[0] != std::floor(parts[0])) throw std::invalid_argument("grid: n must be an integer >= 2");
  const auto n = static_cast<std::size_t>(parts[0]);
  if (parts[1] == 0.0) return linear_grid(n, 0.0, parts[2]);
  return log_grid(n, parts[1], parts[2], true);
}

}  // namespace lasernoise
