#include "lasernoise/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <atomic>
#include <limits>

#include "lasernoise/analytic.hpp"
#include "lasernoise/curve_io.hpp"
#include "lasernoise/engine.hpp"
#include "lasernoise/errors.hpp"
#include "lasernoise/estimator.hpp"
#include "lasernoise/version.hpp"

namespace lasernoise {

namespace {

bool same_grid(const SpectrumCurve& a, const SpectrumCurve& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a.omega[j] - b.omega[j]) > 1e-12 * std::max(1.0, std::abs(b.omega[j]))) return false;
  }
  return true;
}

SpectrumCurve restrict_band(const SpectrumCurve& c, double omega_max) {
  SpectrumCurve out;
  out.label = c.label;
  out.meta = c.meta;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c.omega[j] > omega_max) continue;
    out.omega.push_back(c.omega[j]);
    out.values.push_back(c.values[j]);
    if (c.has_ci()) {
      out.ci_low.push_back(c.ci_low[j]);
      out.ci_high.push_back(c.ci_high[j]);
    }
  }
  return out;
}

void echo_scenario(SpectrumCurve& c, const ExperimentConfig& cfg, Route route) {
  c.add_meta("scenario", to_string(cfg.scenario));
  c.add_meta("route", to_string(route));
  c.add_meta("p", io::format_number(cfg.p));
  if (cfg.feedback()) c.add_meta("lambda", io::format_number(cfg.lambda));
  if (cfg.coupled()) c.add_meta("kappa0_over_kappa", io::format_number(cfg.kappa0_over_kappa));
  c.add_meta("R_over_kappa", io::format_number(cfg.R_over_kappa));
}

LaserParams laser_of(const ExperimentConfig& cfg) {
  LaserParams laser = cfg.laser;
  laser.kappa = 1.0;
  laser.R = cfg.R_over_kappa;
  laser.p = cfg.p;
  return laser;
}

}  // namespace

CompareReport compare(const SpectrumCurve& a, const SpectrumCurve& b, double tolerance_abs, double tolerance_rel,
                      double coverage) {
  if (!same_grid(a, b)) throw std::invalid_argument("compare: curves are on different frequency grids");
  CompareReport r;
  r.name = a.label + " vs " + b.label;
  r.tolerance_abs = tolerance_abs;
  r.tolerance_rel = tolerance_rel;
  r.points = a.size();
  bool within = true;
  std::size_t inside = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = std::abs(a.values[j] - b.values[j]);
    const double rel = d == 0.0 ? 0.0 : (b.values[j] == 0.0 ? std::numeric_limits<double>::infinity() : d / std::abs(b.values[j]));
    if (d > r.max_abs) {
      r.max_abs = d;
      r.omega_worst = a.omega[j];
    }
    r.max_rel = std::max(r.max_rel, rel);
    within = within && d <= tolerance_abs + tolerance_rel * std::abs(b.values[j]);
    if (a.has_ci() && b.values[j] >= a.ci_low[j] && b.values[j] <= a.ci_high[j]) ++inside;
  }
  if (a.has_ci()) {
    r.required_coverage = coverage;
    r.ci_coverage = r.points == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(r.points);
    r.pass = r.points > 0 && *r.ci_coverage >= coverage;
  } else {
    r.pass = within;
  }
  return r;
}

SpectrumCurve analytic_route(const ExperimentConfig& cfg, const std::vector<double>& grid) {
  SpectrumCurve c;
  switch (cfg.scenario) {
    case ScenarioKind::Single:
      c = analytic::s_single(cfg.p, grid);
      break;
    case ScenarioKind::Fbl:
      c = analytic::s_fbl(cfg.p, cfg.lambda, grid);
      break;
    case ScenarioKind::Coupled:
      c = analytic::s_coupled(cfg.p, 1.0, 1.0, cfg.kappa0_over_kappa, grid);
      break;
    case ScenarioKind::CoupledFbl:
      if (cfg.p != 0.0) throw ConfigError("<config>", 0, "routes.enabled", "the coupled-fbl closed form exists only for p = 0");
      c = analytic::s_coupled_fbl(cfg.lambda, cfg.kappa0_over_kappa, grid);
      break;
  }
  c.label = "analytic";
  c.meta.clear();
  echo_scenario(c, cfg, Route::Analytic);
  return c;
}

SpectrumCurve engine_route(const ExperimentConfig& cfg, const std::vector<double>& grid,
                           std::optional<double> filter_bandwidth) {
  const LaserParams laser = laser_of(cfg);
  std::optional<CouplingParams> coupling;
  if (cfg.coupled()) coupling = CouplingParams::make(cfg.kappa0_over_kappa, 1.0, 1.0);
  const SteadyState steady = steady_state(laser, coupling);

  engine::ScenarioSpec spec;
  switch (cfg.scenario) {
    case ScenarioKind::Single:
      spec.system = engine::Single{cfg.p};
      break;
    case ScenarioKind::Fbl:
      spec.system = engine::Fbl{cfg.p, cfg.lambda, filter_bandwidth};
      break;
    case ScenarioKind::Coupled:
      spec.system = engine::Coupled{cfg.p, 1.0, 1.0, cfg.kappa0_over_kappa};
      break;
    case ScenarioKind::CoupledFbl:
      spec.system = engine::CoupledFbl{cfg.p, cfg.lambda, 1.0, 1.0, cfg.kappa0_over_kappa};
      break;
  }
  SpectrumCurve c = engine::psd_curve(engine::build_model(spec, steady), grid);
  std::vector<std::pair<std::string, std::string>> extra = std::move(c.meta);
  c.meta.clear();
  c.label = filter_bandwidth ? "engine-causal" : "engine";
  echo_scenario(c, cfg, Route::Engine);
  if (filter_bandwidth) c.add_meta("filter_bandwidth", io::format_number(*filter_bandwidth));
  for (auto& kv : extra) c.meta.push_back(std::move(kv));
  return c;
}

SimulationOutcome simulate_route(const ExperimentConfig& cfg) {
  if (cfg.coupled()) {
    throw ConfigError("<config>", 0, "routes.enabled", "route 'simulate' is only available for scenarios single and fbl");
  }
  const LaserParams laser = laser_of(cfg);
  std::optional<FeedbackParams> fbl;
  if (cfg.scenario == ScenarioKind::Fbl) fbl = FeedbackParams{cfg.lambda, cfg.filter_bandwidth};

  const std::size_t n = cfg.trajectories;
  std::vector<SpectrumCurve> curves(n);
  std::vector<sim::SimDiagnostics> diags(n);
  auto one = [&](std::size_t k) {
    sim::SimConfig sc = cfg.sim;
    sc.seed = cfg.sim.seed + k;
    estimator::CountBinner binner(cfg.bin_width, 0.0, sc.duration - sc.warmup);
    diags[k] = sim::simulate(laser, fbl, sc, [&](double t) { binner.add(t); });
    curves[k] = estimator::estimate_spectrum(binner.counts(), cfg.welch);
  };

  // Trajectories are independent; each writes only its own slot.
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
  std::vector<std::future<void>> pending;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, [&] {
      for (std::size_t k = next++; k < n; k = next++) one(k);
    }));
  }
  for (auto& f : pending) f.get();

  SimulationOutcome out;
  out.curve = estimator::merge_trajectories(curves);
  const auto estimator_meta = out.curve.meta;
  out.curve.meta.clear();
  out.curve.label = "simulate";
  echo_scenario(out.curve, cfg, Route::Simulate);
  out.curve.add_meta("seed", std::to_string(cfg.sim.seed));
  out.curve.add_meta("trajectories", std::to_string(n));
  out.curve.add_meta("duration", io::format_number(cfg.sim.duration));
  out.curve.add_meta("warmup", io::format_number(cfg.sim.warmup));
  if (cfg.scenario == ScenarioKind::Fbl) out.curve.add_meta("filter_bandwidth", io::format_number(cfg.filter_bandwidth));
  for (const auto& kv : estimator_meta) out.curve.meta.push_back(kv);
  double clip = 0.0;
  for (const auto& d : diags) clip = std::max(clip, d.clip_fraction);
  out.curve.add_meta("max_clip_fraction", io::format_number(clip));
  out.diagnostics = std::move(diags);
  return out;
}

RunResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunResult result;
  std::filesystem::create_directories(cfg.output_dir);
  const auto grid = cfg.grid.build();
  const std::string stem = to_string(cfg.scenario);

  auto emit = [&](Route route, const SpectrumCurve& curve) {
    const auto base = cfg.output_dir / (stem + "_" + to_string(route));
    io::write_curve_csv(base.string() + ".csv", curve);
    io::write_gnuplot(base.string() + ".dat", curve);
    result.files.push_back(base.string() + ".csv");
    result.files.push_back(base.string() + ".dat");
  };

  for (Route route : cfg.routes) {
    switch (route) {
      case Route::Analytic:
        result.curves[route] = analytic_route(cfg, grid);
        break;
      case Route::Engine:
        result.curves[route] = engine_route(cfg, grid);
        break;
      case Route::Simulate: {
        auto sim = simulate_route(cfg);
        for (std::size_t k = 0; k < sim.diagnostics.size(); ++k) {
          for (const auto& w : sim.diagnostics[k].warnings) {
            result.warnings.push_back("trajectory " + std::to_string(k) + ": " + w);
          }
        }
        result.curves[route] = std::move(sim.curve);
        break;
      }
    }
    emit(route, result.curves[route]);
  }

  const bool have_a = result.curves.count(Route::Analytic) > 0;
  const bool have_e = result.curves.count(Route::Engine) > 0;
  const bool have_s = result.curves.count(Route::Simulate) > 0;

  if (have_a && have_e) {
    auto r = compare(result.curves[Route::Engine], result.curves[Route::Analytic], cfg.tolerance_abs, cfg.tolerance_rel);
    r.name = "engine vs analytic";
    result.reports.push_back(std::move(r));
  }

  if (have_s) {
    const SpectrumCurve& mc = result.curves[Route::Simulate];
    const bool intermediate = cfg.p > 0.0 && cfg.p < 1.0;
    const bool filtered = cfg.scenario == ScenarioKind::Fbl && cfg.lambda > 0.0;
    const SpectrumCurve mc_band = intermediate ? restrict_band(mc, cfg.intermediate_p_band) : mc;
    const std::string band_note = "intermediate-p: low-frequency check only (omega <= " +
                                  io::format_number(cfg.intermediate_p_band) + " kappa)";

    const std::optional<double> filter = filtered ? std::optional<double>(cfg.filter_bandwidth) : std::nullopt;
    const SpectrumCurve causal = restrict_band(engine_route(cfg, mc.omega, filter), mc_band.omega.empty() ? 0.0 : mc_band.omega.back());
    const SpectrumCurve ideal = restrict_band(analytic_route(cfg, mc.omega), mc_band.omega.empty() ? 0.0 : mc_band.omega.back());
    double clip = 0.0;
    if (auto v = mc.find_meta("max_clip_fraction")) clip = std::stod(*v);

    auto annotate = [&](CompareReport& r) {
      if (intermediate) r.notes.push_back(band_note);
      r.notes.push_back("max clipping fraction " + io::format_number(clip));
      for (const auto& w : result.warnings) r.notes.push_back(w);
    };

    if (have_e || !have_a) {
      auto r = compare(mc_band, causal, 0.0, 0.0, cfg.mc_coverage);
      r.name = filtered ? "simulate vs engine (causal feedback filter)" : "simulate vs engine";
      annotate(r);
      result.reports.push_back(std::move(r));
    }
    if (have_a) {
      auto r = compare(mc_band, ideal, 0.0, 0.0, cfg.mc_coverage);
      r.name = "simulate vs analytic";
      annotate(r);
      if (filtered) {
        const auto bias = compare(causal, ideal, 0.0, 0.0);
        r.gating = have_e ? false : r.gating;
        r.notes.push_back("finite feedback filter bandwidth " + io::format_number(cfg.filter_bandwidth) +
                          ": linear theory puts the ideal closed form up to " + io::format_number(bias.max_abs) +
                          " away (at omega = " + io::format_number(bias.omega_worst) + ")");
      }
      result.reports.push_back(std::move(r));
    }
  }

  if (cfg.scenario == ScenarioKind::CoupledFbl && (have_a || have_e)) {
    const SpectrumCurve& base = have_a ? result.curves[Route::Analytic] : result.curves[Route::Engine];
    const SpectrumCurve band = restrict_band(base, 10.0);
    if (band.size() > 0) {
      auto limit = analytic::s_strong_limit(cfg.kappa0_over_kappa, band.omega);
      limit.label = "strong-limit";
      auto r = compare(band, limit, 0.0, cfg.limit_tolerance);
      r.name = (have_a ? std::string("analytic") : std::string("engine")) + " vs strong-limit (omega <= 10 kappa)";
      r.gating = false;
      r.notes.push_back("limit valid for lambda >> 1 and kappa0 >> kappa");
      result.reports.push_back(std::move(r));
    }
  }

  result.exit_code = 0;
  for (const auto& r : result.reports) {
    if (r.gating && !r.pass) result.exit_code = 1;
  }

  const auto report_path = cfg.output_dir / "report.txt";
  std::ofstream os(report_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + report_path.string());
  write_report(os, cfg, result);
  result.files.push_back(report_path);
  return result;
}

void write_report(std::ostream& os, const ExperimentConfig& cfg, const RunResult& result) {
  os << "# lasernoise comparison report\n";
  os << "version: " << kVersion << '\n';
  os << "scenario: " << to_string(cfg.scenario) << '\n';
  std::string routes;
  for (auto r : cfg.routes) routes += (routes.empty() ? "" : ", ") + to_string(r);
  os << "routes: " << routes << '\n';
  os << "p: " << io::format_number(cfg.p) << '\n';
  if (cfg.feedback()) os << "lambda: " << io::format_number(cfg.lambda) << '\n';
  if (cfg.coupled()) os << "kappa0_over_kappa: " << io::format_number(cfg.kappa0_over_kappa) << '\n';
  if (cfg.has_route(Route::Simulate)) os << "seed: " << cfg.sim.seed << '\n';
  for (const auto& w : result.warnings) os << "warning: " << w << '\n';
  for (const auto& r : result.reports) {
    os << '\n' << "[" << r.name << "]\n";
    os << "gating: " << (r.gating ? "yes" : "no (informational)") << '\n';
    os << "points: " << r.points << '\n';
    os << "max_abs_deviation: " << io::format_number(r.max_abs) << '\n';
    os << "max_rel_deviation: " << io::format_number(r.max_rel) << '\n';
    os << "omega_of_worst_deviation: " << io::format_number(r.omega_worst) << '\n';
    if (r.ci_coverage) {
      os << "ci_coverage: " << io::format_number(*r.ci_coverage) << '\n';
      os << "required_coverage: " << io::format_number(r.required_coverage) << '\n';
    } else {
      os << "tolerance_abs: " << io::format_number(r.tolerance_abs) << '\n';
      os << "tolerance_rel: " << io::format_number(r.tolerance_rel) << '\n';
    }
    for (const auto& n : r.notes) os << "note: " << n << '\n';
    os << "result: " << (r.pass ? "PASS" : "FAIL") << '\n';
  }
  os << '\n' << "overall: " << (result.exit_code == 0 ? "PASS" : "FAIL") << '\n';
}

}  // namespace lasernoise
