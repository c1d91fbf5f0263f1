#include "lasernoise/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "lasernoise/curve_io.hpp"
#include "lasernoise/errors.hpp"

namespace lasernoise {

ConfigError::ConfigError(std::string source, std::size_t line, std::string field, const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << source;
        if (line > 0) os << ':' << line;
        os << ": ";
        if (!field.empty()) os << '[' << field << "] ";
        os << message;
        return os.str();
      }()),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Single: return "single";
    case ScenarioKind::Fbl: return "fbl";
    case ScenarioKind::Coupled: return "coupled";
    case ScenarioKind::CoupledFbl: return "coupled-fbl";
  }
  return "?";
}

std::string to_string(Route route) {
  switch (route) {
    case Route::Analytic: return "analytic";
    case Route::Engine: return "engine";
    case Route::Simulate: return "simulate";
  }
  return "?";
}

std::vector<double> GridSpec::build() const {
  if (lo == 0.0) return linear_grid(points, 0.0, hi);
  return log_grid(points, lo, hi, true);
}

GridSpec GridSpec::parse(const std::string& text) {
  (void)parse_grid(text);  // throws on a malformed spec
  std::istringstream is(text);
  std::string n, lo, hi;
  std::getline(is, n, ',');
  std::getline(is, lo, ',');
  std::getline(is, hi, ',');
  return {static_cast<std::size_t>(std::stod(n)), std::stod(lo), std::stod(hi)};
}

bool ExperimentConfig::has_route(Route r) const { return std::find(routes.begin(), routes.end(), r) != routes.end(); }

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument("expected a finite number, got '" + v + "'");
  return d;
}

std::uint64_t to_uint(const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
  }
  return std::stoull(v);
}

ScenarioKind to_scenario(const std::string& v) {
  if (v == "single") return ScenarioKind::Single;
  if (v == "fbl") return ScenarioKind::Fbl;
  if (v == "coupled") return ScenarioKind::Coupled;
  if (v == "coupled-fbl") return ScenarioKind::CoupledFbl;
  throw std::invalid_argument("unknown scenario '" + v + "' (single, fbl, coupled, coupled-fbl)");
}

std::vector<Route> to_routes(const std::string& v) {
  std::vector<Route> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    Route r;
    if (tok == "analytic") r = Route::Analytic;
    else if (tok == "engine") r = Route::Engine;
    else if (tok == "simulate") r = Route::Simulate;
    else throw std::invalid_argument("unknown route '" + tok + "' (analytic, engine, simulate)");
    if (std::find(out.begin(), out.end(), r) != out.end()) throw std::invalid_argument("route '" + tok + "' listed twice");
    out.push_back(r);
  }
  if (out.empty()) throw std::invalid_argument("at least one route is required");
  return out;
}

estimator::Window to_window(const std::string& v) {
  if (v == "hann") return estimator::Window::Hann;
  if (v == "rectangular") return estimator::Window::Rectangular;
  throw std::invalid_argument("unknown window '" + v + "' (hann, rectangular)");
}

ThreeLevelParams& three_level(ExperimentConfig& c) {
  if (!c.three_level) c.three_level.emplace();
  return *c.three_level;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

std::string num(double v) { return io::format_number(v); }

// Single table of every accepted key; parse, serialize and overrides all go through it.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"scenario.name", {[](auto& c, auto& v) { c.scenario = to_scenario(v); }, [](auto& c) { return to_string(c.scenario); }}},
      {"scenario.p", {[](auto& c, auto& v) { c.p = to_double(v); }, [](auto& c) { return num(c.p); }}},
      {"scenario.lambda", {[](auto& c, auto& v) { c.lambda = to_double(v); }, [](auto& c) { return num(c.lambda); }}},
      {"scenario.kappa0_over_kappa",
       {[](auto& c, auto& v) { c.kappa0_over_kappa = to_double(v); }, [](auto& c) { return num(c.kappa0_over_kappa); }}},
      {"scenario.R_over_kappa",
       {[](auto& c, auto& v) { c.R_over_kappa = to_double(v); }, [](auto& c) { return num(c.R_over_kappa); }}},

      {"laser.beta_inv", {[](auto& c, auto& v) { c.laser.beta_inv = to_double(v); }, [](auto& c) { return num(c.laser.beta_inv); }}},
      {"laser.gamma1", {[](auto& c, auto& v) { c.laser.gamma1 = to_double(v); }, [](auto& c) { return num(c.laser.gamma1); }}},
      {"laser.gamma2", {[](auto& c, auto& v) { c.laser.gamma2 = to_double(v); }, [](auto& c) { return num(c.laser.gamma2); }}},
      {"laser.gamma_perp",
       {[](auto& c, auto& v) { c.laser.gamma_perp = to_double(v); }, [](auto& c) { return num(c.laser.gamma_perp); }}},
      {"laser.g",
       {[](auto& c, auto& v) { c.laser.g = to_double(v); },
        [](auto& c) { return c.laser.g ? num(*c.laser.g) : std::string(); }}},

      {"three_level.kappa_tilde",
       {[](auto& c, auto& v) { three_level(c).kappa_tilde = to_double(v); },
        [](auto& c) { return c.three_level ? num(c.three_level->kappa_tilde) : std::string(); }}},
      {"three_level.gamma2_tilde",
       {[](auto& c, auto& v) { three_level(c).gamma2_tilde = to_double(v); },
        [](auto& c) { return c.three_level ? num(c.three_level->gamma2_tilde) : std::string(); }}},
      {"three_level.gamma1_tilde",
       {[](auto& c, auto& v) { three_level(c).gamma1_tilde = to_double(v); },
        [](auto& c) { return c.three_level ? num(c.three_level->gamma1_tilde) : std::string(); }}},
      {"three_level.g13_over_g12",
       {[](auto& c, auto& v) { three_level(c).g13_over_g12 = to_double(v); },
        [](auto& c) { return c.three_level ? num(c.three_level->g13_over_g12) : std::string(); }}},
      {"three_level.N_tilde",
       {[](auto& c, auto& v) { three_level(c).N_tilde = to_double(v); },
        [](auto& c) { return c.three_level ? num(c.three_level->N_tilde) : std::string(); }}},

      {"routes.enabled",
       {[](auto& c, auto& v) { c.routes = to_routes(v); },
        [](auto& c) {
          std::string s;
          for (auto r : c.routes) s += (s.empty() ? "" : ", ") + to_string(r);
          return s;
        }}},

      {"grid.points",
       {[](auto& c, auto& v) { c.grid.points = to_uint(v); }, [](auto& c) { return std::to_string(c.grid.points); }}},
      {"grid.lo", {[](auto& c, auto& v) { c.grid.lo = to_double(v); }, [](auto& c) { return num(c.grid.lo); }}},
      {"grid.hi", {[](auto& c, auto& v) { c.grid.hi = to_double(v); }, [](auto& c) { return num(c.grid.hi); }}},

      {"simulation.duration",
       {[](auto& c, auto& v) { c.sim.duration = to_double(v); }, [](auto& c) { return num(c.sim.duration); }}},
      {"simulation.warmup", {[](auto& c, auto& v) { c.sim.warmup = to_double(v); }, [](auto& c) { return num(c.sim.warmup); }}},
      {"simulation.seed", {[](auto& c, auto& v) { c.sim.seed = to_uint(v); }, [](auto& c) { return std::to_string(c.sim.seed); }}},
      {"simulation.trajectories",
       {[](auto& c, auto& v) { c.trajectories = to_uint(v); }, [](auto& c) { return std::to_string(c.trajectories); }}},
      {"simulation.filter_bandwidth",
       {[](auto& c, auto& v) { c.filter_bandwidth = to_double(v); }, [](auto& c) { return num(c.filter_bandwidth); }}},
      {"simulation.rate_integration_step",
       {[](auto& c, auto& v) { c.sim.rate_integration_step = to_double(v); },
        [](auto& c) { return num(c.sim.rate_integration_step); }}},
      {"simulation.detector_efficiency",
       {[](auto& c, auto& v) { c.sim.detector_efficiency = to_double(v); },
        [](auto& c) { return num(c.sim.detector_efficiency); }}},
      {"simulation.bin_width",
       {[](auto& c, auto& v) { c.bin_width = to_double(v); }, [](auto& c) { return num(c.bin_width); }}},

      {"welch.segment_length",
       {[](auto& c, auto& v) { c.welch.segment_length = to_uint(v); },
        [](auto& c) { return std::to_string(c.welch.segment_length); }}},
      {"welch.overlap", {[](auto& c, auto& v) { c.welch.overlap = to_double(v); }, [](auto& c) { return num(c.welch.overlap); }}},
      {"welch.window",
       {[](auto& c, auto& v) { c.welch.window = to_window(v); },
        [](auto& c) { return std::string(c.welch.window == estimator::Window::Hann ? "hann" : "rectangular"); }}},
      {"welch.min_segments",
       {[](auto& c, auto& v) { c.welch.min_segments = to_uint(v); },
        [](auto& c) { return std::to_string(c.welch.min_segments); }}},
      {"welch.band_lo", {[](auto& c, auto& v) { c.welch.band_lo = to_double(v); }, [](auto& c) { return num(c.welch.band_lo); }}},
      {"welch.band_hi", {[](auto& c, auto& v) { c.welch.band_hi = to_double(v); }, [](auto& c) { return num(c.welch.band_hi); }}},
      {"welch.bands",
       {[](auto& c, auto& v) { c.welch.bands = to_uint(v); }, [](auto& c) { return std::to_string(c.welch.bands); }}},
      {"welch.confidence",
       {[](auto& c, auto& v) { c.welch.confidence = to_double(v); }, [](auto& c) { return num(c.welch.confidence); }}},

      {"compare.tolerance_abs",
       {[](auto& c, auto& v) { c.tolerance_abs = to_double(v); }, [](auto& c) { return num(c.tolerance_abs); }}},
      {"compare.tolerance_rel",
       {[](auto& c, auto& v) { c.tolerance_rel = to_double(v); }, [](auto& c) { return num(c.tolerance_rel); }}},
      {"compare.mc_coverage",
       {[](auto& c, auto& v) { c.mc_coverage = to_double(v); }, [](auto& c) { return num(c.mc_coverage); }}},
      {"compare.limit_tolerance",
       {[](auto& c, auto& v) { c.limit_tolerance = to_double(v); }, [](auto& c) { return num(c.limit_tolerance); }}},
      {"compare.intermediate_p_band",
       {[](auto& c, auto& v) { c.intermediate_p_band = to_double(v); },
        [](auto& c) { return num(c.intermediate_p_band); }}},

      {"output.dir",
       {[](auto& c, auto& v) { c.output_dir = v; }, [](auto& c) { return c.output_dir.string(); }}},
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : fields()) {
    if (k == key) return &f;
  }
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& [k, f] : fields()) {
    if (k.compare(0, s.size() + 1, s + ".") == 0) return true;
  }
  return false;
}

using LineMap = std::map<std::string, std::size_t>;

void validate_impl(const ExperimentConfig& c, const std::string& source, const LineMap& lines) {
  auto fail = [&](const std::string& field, const std::string& msg) -> void {
    const auto it = lines.find(field);
    throw ConfigError(source, it == lines.end() ? 0 : it->second, field, msg);
  };

  if (c.routes.empty()) fail("routes.enabled", "at least one route is required");
  if (!(c.p <= 1.0)) fail("scenario.p", "p must be <= 1");
  if (!(c.R_over_kappa > 0.0)) fail("scenario.R_over_kappa", "R_over_kappa must be > 0");
  if (!(c.lambda >= 0.0)) fail("scenario.lambda", "lambda must be >= 0");
  if (!c.feedback() && c.lambda != 0.0) {
    fail("scenario.lambda", "lambda is only meaningful for scenarios fbl and coupled-fbl");
  }
  if (c.coupled() && !(c.kappa0_over_kappa > 0.0)) {
    fail("scenario.kappa0_over_kappa", "coupled scenarios require kappa0_over_kappa > 0");
  }
  if (!c.coupled() && c.kappa0_over_kappa != 0.0) {
    fail("scenario.kappa0_over_kappa", "kappa0_over_kappa is only meaningful for coupled scenarios");
  }
  if (c.scenario == ScenarioKind::CoupledFbl && c.has_route(Route::Analytic) && c.p != 0.0) {
    fail("routes.enabled", "rule: the coupled-fbl closed form exists only for p = 0; use the engine route for p != 0");
  }
  if (c.has_route(Route::Simulate)) {
    if (c.coupled()) {
      fail("routes.enabled", "rule: route 'simulate' is only available for scenarios single and fbl, not " +
                                 to_string(c.scenario));
    }
    if (c.p < 0.0) fail("scenario.p", "rule: route 'simulate' supports p in [0, 1] only (super-Poissonian pumps are engine-only)");
  }

  try {
    (void)c.grid.build();
  } catch (const std::exception& e) {
    fail("grid.points", e.what());
  }
  if (!(c.tolerance_abs >= 0.0)) fail("compare.tolerance_abs", "must be >= 0");
  if (!(c.tolerance_rel >= 0.0)) fail("compare.tolerance_rel", "must be >= 0");
  if (!(c.mc_coverage > 0.0 && c.mc_coverage <= 1.0)) fail("compare.mc_coverage", "must lie in (0, 1]");
  if (!(c.limit_tolerance > 0.0)) fail("compare.limit_tolerance", "must be > 0");
  if (!(c.intermediate_p_band > 0.0)) fail("compare.intermediate_p_band", "must be > 0");
  if (c.output_dir.empty()) fail("output.dir", "must not be empty");

  try {
    LaserParams laser = c.laser;
    laser.R = c.R_over_kappa;
    laser.p = c.p;
    laser.validate();
    if (c.three_level) c.three_level->validate();
  } catch (const ParameterError& e) {
    fail("laser", e.what());
  }

  if (c.has_route(Route::Simulate)) {
    if (c.trajectories < 1) fail("simulation.trajectories", "must be >= 1");
    if (!(c.filter_bandwidth > 0.0)) fail("simulation.filter_bandwidth", "must be > 0");
    try {
      c.sim.validate(c.feedback() && c.lambda > 0.0);
    } catch (const ParameterError& e) {
      fail("simulation", e.what());
    }
    if (!(c.bin_width > 0.0 && c.bin_width <= estimator::kMaxBinWidth)) {
      fail("simulation.bin_width", "must lie in (0, pi/20] so the band reaches 20 kappa below Nyquist");
    }
    try {
      c.welch.validate();
    } catch (const EstimationError& e) {
      fail("welch", e.what());
    }
    const double bins = std::floor((c.sim.duration - c.sim.warmup) / c.bin_width);
    const double L = static_cast<double>(c.welch.segment_length);
    const double hop = std::max(1.0, std::round(L * (1.0 - c.welch.overlap)));
    const double segments = bins < L ? 0.0 : 1.0 + std::floor((bins - L) / hop);
    if (segments < static_cast<double>(c.welch.min_segments)) {
      fail("simulation.duration", "recorded span yields " + std::to_string(static_cast<long long>(segments)) +
                                      " Welch segments, need welch.min_segments = " + std::to_string(c.welch.min_segments));
    }
  }
}

void assign(ExperimentConfig& c, const std::string& key, const std::string& value, const std::string& source,
            std::size_t line) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError(source, line, key, "unknown key");
  try {
    f->set(c, value);
  } catch (const std::exception& e) {
    throw ConfigError(source, line, key, e.what());
  }
}

}  // namespace

void ExperimentConfig::validate(const std::string& source) const { validate_impl(*this, source, {}); }

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
  ExperimentConfig cfg;
  LineMap lines;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, lineno, "", "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) throw ConfigError(source, lineno, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, lineno, "", "expected 'key = value', got '" + line + "'");
    if (section.empty()) throw ConfigError(source, lineno, "", "key outside of any [section]");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (lines.count(key)) throw ConfigError(source, lineno, key, "duplicate key (first set on line " + std::to_string(lines[key]) + ")");
    assign(cfg, key, value, source, lineno);
    lines[key] = lineno;
  }
  cfg.laser.kappa = 1.0;
  cfg.laser.R = cfg.R_over_kappa;
  cfg.laser.p = cfg.p;
  validate_impl(cfg, source, lines);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string(), 0, "", "cannot open configuration file");
  return parse_config(is, path.string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& [key, f] : fields()) {
    const std::string value = f.get(cfg);
    if (value.empty()) continue;
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != current) {
      if (!current.empty()) os << '\n';
      os << '[' << section << "]\n";
      current = section;
    }
    os << key.substr(dot + 1) << " = " << value << '\n';
  }
  return os.str();
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  std::string full = key.find('.') == std::string::npos ? "scenario." + key : key;
  if (full == "scenario.scenario") full = "scenario.name";
  assign(cfg, full, value, "<override>", 0);
  cfg.laser.R = cfg.R_over_kappa;
  cfg.laser.p = cfg.p;
}

}  // namespace lasernoise
