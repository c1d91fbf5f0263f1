#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lasernoise/spectrum.hpp"

namespace lasernoise::io {

// CSV layout:
//   # lasernoise spectrum
//   # version: <code version>
//   # label: <label>
//   # <key>: <value>              (one line per meta entry, in order)
//   omega_over_kappa,value,ci_low,ci_high
//   <17 significant digits>,...   (ci columns empty when the curve has no CI)

std::string format_number(double v);

void write_curve_csv(std::ostream& os, const SpectrumCurve& curve);
SpectrumCurve read_curve_csv(std::istream& is);

void write_curve_csv(const std::filesystem::path& path, const SpectrumCurve& curve);
SpectrumCurve read_curve_csv(const std::filesystem::path& path);

/// Whitespace-separated columns with '#' comments; missing CI written as NaN.
void write_gnuplot(std::ostream& os, const SpectrumCurve& curve);
void write_gnuplot(const std::filesystem::path& path, const SpectrumCurve& curve);

}  // namespace lasernoise::io
