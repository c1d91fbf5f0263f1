#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lasernoise/config.hpp"
#include "lasernoise/curve_io.hpp"
#include "lasernoise/errors.hpp"
#include "lasernoise/experiment.hpp"
#include "lasernoise/params.hpp"
#include "lasernoise/pointproc.hpp"
#include "lasernoise/version.hpp"

namespace ln = lasernoise;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCompareFail = 1;
constexpr int kExitConfigError = 2;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string grid;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "experiment configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "base random seed for the simulation route");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--grid", o.grid, "frequency grid n,lo,hi in units of kappa (lo = 0: linear)");
  cmd->add_option("--set", o.overrides, "override a setting, e.g. --set p=0.5 --set simulation.duration=1e4");
}

ln::ExperimentConfig load(const CommonOptions& o) {
  ln::ExperimentConfig cfg = o.config.empty() ? ln::ExperimentConfig{} : ln::load_config(o.config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ln::ConfigError("--set", 0, kv, "expected key=value");
    ln::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.sim.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.grid.empty()) {
    try {
      cfg.grid = ln::GridSpec::parse(o.grid);
    } catch (const std::exception& e) {
      throw ln::ConfigError("--grid", 0, "grid", e.what());
    }
  }
  cfg.validate(o.config.empty() ? "<command line>" : o.config);
  return cfg;
}

void print_reports(const ln::RunResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& c : r.reports) {
    std::printf("%-4s %s  max_abs=%.3g max_rel=%.3g worst_omega=%.4g", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.max_abs, c.max_rel, c.omega_worst);
    if (c.ci_coverage) std::printf(" coverage=%.3f/%.2f", *c.ci_coverage, c.required_coverage);
    if (!c.gating) std::printf(" (informational)");
    std::printf("\n");
  }
  for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
}

int run_single_route(const CommonOptions& o, ln::Route route) {
  ln::ExperimentConfig cfg = load(o);
  cfg.routes = {route};
  const auto r = ln::run(cfg);
  print_reports(r);
  return r.exit_code;
}

int cmd_simulate(const CommonOptions& o, const std::string& events_path) {
  ln::ExperimentConfig cfg = load(o);
  cfg.routes = {ln::Route::Simulate};
  cfg.validate();
  if (!events_path.empty()) {
    std::optional<ln::FeedbackParams> fbl;
    if (cfg.scenario == ln::ScenarioKind::Fbl) fbl = ln::FeedbackParams{cfg.lambda, cfg.filter_bandwidth};
    ln::LaserParams laser = cfg.laser;
    laser.kappa = 1.0;
    laser.R = cfg.R_over_kappa;
    laser.p = cfg.p;
    auto res = ln::sim::simulate(laser, fbl, cfg.sim);
    res.train.scenario = ln::to_string(cfg.scenario);
    std::ofstream os(events_path);
    if (!os) throw std::runtime_error("cannot write " + events_path);
    ln::sim::write_event_train(os, res.train);
    std::printf("wrote %s (%zu events)\n", events_path.c_str(), res.train.times.size());
  }
  const auto r = ln::run(cfg);
  print_reports(r);
  return r.exit_code;
}

int cmd_compare(const CommonOptions& o, const std::vector<std::string>& files, double tol_abs, double tol_rel,
                double coverage) {
  if (files.empty()) {
    const auto r = ln::run(load(o));
    print_reports(r);
    std::printf("overall: %s\n", r.exit_code == 0 ? "PASS" : "FAIL");
    return r.exit_code;
  }
  if (files.size() != 2) throw ln::ConfigError("compare", 0, "files", "expected exactly two curve files");
  const auto a = ln::io::read_curve_csv(std::filesystem::path(files[0]));
  const auto b = ln::io::read_curve_csv(std::filesystem::path(files[1]));
  const auto rep = ln::compare(a, b, tol_abs, tol_rel, coverage);
  std::printf("%s %s vs %s  max_abs=%.6g max_rel=%.6g worst_omega=%.6g", rep.pass ? "PASS" : "FAIL",
              files[0].c_str(), files[1].c_str(), rep.max_abs, rep.max_rel, rep.omega_worst);
  if (rep.ci_coverage) std::printf(" coverage=%.4f", *rep.ci_coverage);
  std::printf("\n");
  return rep.pass ? kExitPass : kExitCompareFail;
}

void print_steady(const char* title, const ln::SteadyState& s, bool coupled) {
  std::printf("[%s]\n", title);
  std::printf("n = %.10g\n", s.n);
  if (coupled) std::printf("n_tilde = %.10g\n", s.n_tilde);
  std::printf("I = %.10g\n", s.I);
  std::printf("N1_bar = %.10g\nN2_bar = %.10g\ngP_bar = %.10g\n", s.N1_bar, s.N2_bar, s.gP_bar);
  std::printf("i_bar = %.10g\n", s.i_bar);
  if (coupled) std::printf("i_tilde_bar = %.10g\n", s.i_tilde_bar);
  for (const auto& w : s.warnings) std::printf("warning: %s\n", w.c_str());
}

int cmd_steady(const CommonOptions& o) {
  const ln::ExperimentConfig cfg = load(o);
  ln::LaserParams laser = cfg.laser;
  laser.kappa = 1.0;
  laser.R = cfg.R_over_kappa;
  laser.p = cfg.p;
  print_steady("exciting laser, uncoupled", ln::steady_state(laser), false);
  if (cfg.three_level) {
    const auto c = ln::solve_kappa0(laser, *cfg.three_level);
    std::printf("[three-level coupling]\nkappa0 = %.12g\nkappa_tilde = %.10g\nx = %.10g\n", c.kappa0, c.kappa_tilde, c.x);
    for (const auto& w : cfg.three_level->warnings()) std::printf("warning: %s\n", w.c_str());
    print_steady("coupled pair (self-consistent kappa0)", ln::steady_state(laser, c), true);
  } else if (cfg.coupled()) {
    const auto c = ln::CouplingParams::make(cfg.kappa0_over_kappa, 1.0, 1.0);
    print_steady("coupled pair", ln::steady_state(laser, c), true);
  }
  return kExitPass;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::vector<std::string>& values) {
  const ln::ExperimentConfig base = load(o);
  std::vector<ln::ExperimentConfig> runs;
  for (const auto& v : values) {
    ln::ExperimentConfig c = base;
    ln::apply_override(c, param, v);
    c.output_dir = base.output_dir / (param + "_" + v);
    c.validate();
    runs.push_back(std::move(c));
  }
  // Each run owns its output directory, so the runs can proceed concurrently.
  std::vector<std::future<ln::RunResult>> futures;
  for (const auto& c : runs) futures.push_back(std::async(std::launch::async, [&c] { return ln::run(c); }));

  std::filesystem::create_directories(base.output_dir);
  const auto summary_path = base.output_dir / "sweep_summary.csv";
  std::ofstream summary(summary_path);
  summary << "param,value,exit_code,comparison,pass,max_abs,max_rel,omega_worst\n";
  int exit_code = kExitPass;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto r = futures[k].get();
    std::printf("== %s = %s\n", param.c_str(), values[k].c_str());
    print_reports(r);
    exit_code = std::max(exit_code, r.exit_code);
    if (r.reports.empty()) summary << param << ',' << values[k] << ',' << r.exit_code << ",,,,,\n";
    for (const auto& c : r.reports) {
      summary << param << ',' << values[k] << ',' << r.exit_code << ",\"" << c.name << "\"," << (c.pass ? 1 : 0) << ','
              << ln::io::format_number(c.max_abs) << ',' << ln::io::format_number(c.max_rel) << ','
              << ln::io::format_number(c.omega_worst) << '\n';
    }
  }
  std::printf("wrote %s\n", summary_path.string().c_str());
  return exit_code;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photocurrent noise spectra of single, feedback-stabilized and coupled lasers"};
  app.set_version_flag("--version", std::string(ln::kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  auto* analytic = app.add_subcommand("analytic", "closed-form spectrum");
  auto* engine = app.add_subcommand("engine", "linear-response engine spectrum");
  auto* simulate = app.add_subcommand("simulate", "event-level Monte Carlo spectrum");
  auto* compare = app.add_subcommand("compare", "run all enabled routes and compare, or compare two curve files");
  auto* steady = app.add_subcommand("steady", "print the semiclassical steady state");
  auto* sweep = app.add_subcommand("sweep", "run a configuration for several values of one parameter");
  for (auto* cmd : {analytic, engine, simulate, compare, steady, sweep}) add_common(cmd, common);

  std::string events_path;
  simulate->add_option("--events", events_path, "also write the event train of the first seed to this file");

  std::vector<std::string> files;
  double tol_abs = 0.0, tol_rel = 1e-9, coverage = 0.9;
  compare->add_option("files", files, "two curve CSV files (omit to run the configuration)");
  compare->add_option("--tol-abs", tol_abs, "absolute tolerance for curves without intervals");
  compare->add_option("--tol-rel", tol_rel, "relative tolerance for curves without intervals");
  compare->add_option("--coverage", coverage, "required interval coverage when the first curve has intervals");

  std::string param, values_text;
  sweep->add_option("--param", param, "parameter name, e.g. lambda or simulation.duration")->required();
  sweep->add_option("--values", values_text, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (*analytic) return run_single_route(common, ln::Route::Analytic);
    if (*engine) return run_single_route(common, ln::Route::Engine);
    if (*simulate) return cmd_simulate(common, events_path);
    if (*compare) return cmd_compare(common, files, tol_abs, tol_rel, coverage);
    if (*steady) return cmd_steady(common);
    if (*sweep) {
      const auto values = split_csv(values_text);
      if (values.empty()) throw ln::ConfigError("--values", 0, "values", "no values given");
      return cmd_sweep(common, param, values);
    }
  } catch (const ln::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}
