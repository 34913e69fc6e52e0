#include <omp.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "igr1d/dynamics.hpp"
#include "igr1d/eulerian.hpp"
#include "igr1d/io.hpp"
#include "igr1d/scenarios.hpp"
#include "igr1d/solver.hpp"
#include "igr1d/sticky.hpp"
#include "igr1d/studies.hpp"

namespace fs = std::filesystem;
using namespace igr1d;
using nlohmann::json;

namespace {

/// Invalid or missing configuration (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

struct RunConfig {
  std::string scenario = "sinewave";
  double a = 0.0;
  double b = 1.0;
  std::optional<double> alpha;
  std::optional<double> t;
  std::vector<double> times;
  std::size_t cells = 256;
  std::string data_mode = "regularized";
  std::string out = "out";
  std::string format = "csv";
  std::uint64_t seed = 42;
  std::string parallel = "off";
  std::vector<double> alphas;
  int pairs = 200;
  std::vector<std::size_t> Ns;
  std::vector<double> deltas;
  double newton_tol = 1e-10;
  int max_iter = 100;
};

/// Everything derived from the configuration that every verb needs.
struct Setup {
  Scenario scenario;
  Grid grid;
  DiscreteMeasure mu;
  std::vector<double> u0;
  DataMode mode;
  TableFormat format;
  Execution execution;
  fs::path out;
};

void report_error(const std::string& kind, const std::string& message, const json& extra = json::object()) {
  json j = extra;
  j["status"] = "error";
  j["kind"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << std::endl;
}

Setup prepare(const RunConfig& cfg) {
  try {
    Scenario scenario = make_scenario(cfg.scenario, cfg.seed, cfg.a, cfg.b);
    if (cfg.cells < 2) throw ConfigError("--grid must be at least 2");
    Grid grid = scenario.grid(cfg.cells);
    DiscreteMeasure mu = scenario.measure(grid);
    std::vector<double> u0 = scenario.initial_velocity(grid);
    const DataMode mode = data_mode_from_string(cfg.data_mode);
    const TableFormat format = table_format_from_string(cfg.format);
    if (cfg.parallel != "on" && cfg.parallel != "off") throw ConfigError("--parallel must be on or off");
    const Execution execution = cfg.parallel == "on" ? Execution::parallel : Execution::serial;
    return {std::move(scenario), std::move(grid), std::move(mu), std::move(u0), mode, format, execution, cfg.out};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

IgrParams params_for(const RunConfig& cfg, double alpha) {
  IgrParams p;
  p.alpha = alpha;
  p.newton_tol = cfg.newton_tol;
  p.max_iter = cfg.max_iter;
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

double require_alpha(const RunConfig& cfg) {
  if (!cfg.alpha) throw ConfigError("--alpha is required");
  if (!(*cfg.alpha > 0.0)) throw ConfigError("--alpha must be positive");
  return *cfg.alpha;
}

LinearData data_for(const Setup& s) {
  return s.mode == DataMode::raw ? make_raw_data(s.u0) : make_regularized_data(s.u0, s.grid);
}

/// Shortest text that reads back as exactly t; names frame files.
std::string time_label(double t) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, res.ptr);
}

json run_header(const RunConfig& cfg, const Setup& s) {
  json j;
  j["scenario"] = cfg.scenario;
  j["a"] = s.grid.a();
  j["b"] = s.grid.b();
  j["cells"] = s.grid.cells();
  j["data_mode"] = to_string(s.mode);
  j["seed"] = cfg.seed;
  j["shock_time"] = std::isfinite(s.scenario.shock_time) ? json(s.scenario.shock_time) : json(nullptr);
  j["characteristic_time"] = characteristic_time(s.scenario);
  return j;
}

int cmd_solve(const RunConfig& cfg) {
  const Setup s = prepare(cfg);
  const double alpha = require_alpha(cfg);
  std::optional<double> t = cfg.t;
  if (!t && cfg.times.size() == 1) t = cfg.times.front();
  if (!t) throw ConfigError("solve needs a single time (--t)");
  if (!(*t >= 0.0)) throw ConfigError("--t must be nonnegative");
  const IgrParams params = params_for(cfg, alpha);
  const LinearData data = data_for(s);

  const LagrangianFrame frame = make_frame(data, *t, s.mu, s.grid, params);
  const BoundCheck bounds = check_bounds(frame.phi, data, *t, params, s.mu, s.grid);

  write_table(s.out / (std::string("phi") + extension(s.format)), frame_table(frame, s.grid), s.format);
  json report = run_header(cfg, s);
  report["alpha"] = alpha;
  report["t"] = *t;
  report["solve"] = to_json(frame.report);
  report["bound_check_ok"] = bounds.ok();
  const auto kl = kl_pushforward(frame.phi, s.mu, s.grid);
  const auto barrier = log_barrier(frame.phi, s.mu, s.grid);
  report["kl_pushforward"] = kl ? json(*kl) : json(nullptr);
  report["log_barrier"] = barrier ? json(*barrier) : json(nullptr);
  report["kl_minus_barrier"] = kl && barrier ? json(*kl - *barrier) : json(nullptr);
  report["lagrangian_residual"] = lagrangian_residual(frame, params, s.mu, s.grid);
  write_json(s.out / "report.json", report);

  if (!bounds.ok()) {
    json extra;
    extra["cell"] = *bounds.violating_cell;
    extra["min_cell_derivative"] = bounds.min_cell_derivative;
    extra["lower_bound"] = bounds.lower_bound;
    report_error("numerical", "derivative lower bound violated", extra);
    return kNumericalExit;
  }
  std::cout << "solve: " << frame.report.iterations << " Newton iterations, gradient "
            << frame.report.final_grad_norm << ", min dPhi/dx " << frame.report.min_cell_derivative << "\n";
  return 0;
}

int cmd_evolve(const RunConfig& cfg) {
  const Setup s = prepare(cfg);
  const double alpha = require_alpha(cfg);
  std::vector<double> times = cfg.times;
  if (times.empty() && cfg.t) times = {*cfg.t};
  if (times.empty()) throw ConfigError("evolve needs --times (or --t)");
  if (!(times.front() >= 0.0)) throw ConfigError("times must be nonnegative");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ConfigError("times must be strictly increasing");
  }
  const IgrParams params = params_for(cfg, alpha);
  const LinearData data = data_for(s);
  const std::string ext = extension(s.format);
  const fs::path frames_dir = s.out / "frames";
  const fs::path eulerian_dir = s.out / "eulerian";

  auto frame_path = [&](double t) { return frames_dir / (time_label(t) + ext); };
  auto frame_report_path = [&](double t) { return frames_dir / (time_label(t) + ".report.json"); };

  // Frames already on disk are reused unchanged; this makes reruns resume.
  // They are only trusted if they came from the same problem.
  json signature = run_header(cfg, s);
  signature["alpha"] = alpha;
  signature["newton_tol"] = params.newton_tol;
  signature["max_iter"] = params.max_iter;
  signature["execution"] = cfg.parallel == "on" ? "parallel" : "serial";
  signature["format"] = cfg.format;
  const fs::path signature_path = s.out / "run.json";
  if (fs::exists(signature_path) && read_json(signature_path) != signature) {
    throw ConfigError("output directory " + s.out.string() + " holds frames of a different run");
  }
  write_json(signature_path, signature);

  TimeSeries series;
  series.alpha = alpha;
  series.scenario = cfg.scenario;
  series.frames.resize(times.size());
  std::vector<bool> loaded(times.size(), false);
  std::size_t resumed = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (fs::exists(frame_path(times[k])) && fs::exists(frame_report_path(times[k]))) {
      series.frames[k] = frame_from_table(read_table(frame_path(times[k])), times[k]);
      series.frames[k].report = report_from_json(read_json(frame_report_path(times[k])));
      if (series.frames[k].phi.values.size() != s.grid.size()) {
        throw ConfigError("existing frame " + frame_path(times[k]).string() + " has a different grid");
      }
      loaded[k] = true;
      ++resumed;
    }
  }

  auto store = [&](std::size_t k) {
    write_table(frame_path(times[k]), frame_table(series.frames[k], s.grid), s.format);
    write_json(frame_report_path(times[k]), to_json(series.frames[k].report));
  };

  if (s.execution == Execution::serial) {
    std::optional<MonotoneMap> previous;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (!loaded[k]) {
        try {
          series.frames[k] = make_frame(data, times[k], s.mu, s.grid, params, previous);
        } catch (const SolveError& e) {
          throw SolveError(std::string(e.what()) + " at t = " + format_double(times[k]), e.report());
        }
        store(k);
      }
      previous = series.frames[k].phi;
    }
  } else {
    std::vector<double> missing;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (!loaded[k]) missing.push_back(times[k]);
    }
    if (!missing.empty()) {
      const TimeSeries solved = evolve(data, s.mu, s.grid, params, missing, {false, Execution::parallel});
      std::size_t m = 0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        if (loaded[k]) continue;
        series.frames[k] = solved.frames[m++];
        store(k);
      }
    }
  }

  double min_derivative = std::numeric_limits<double>::infinity();
  for (const auto& f : series.frames) {
    const auto path = eulerian_dir / (time_label(f.t) + ext);
    const auto state = entropic_pressure(to_eulerian(f, s.mu, s.grid, s.grid), params);
    write_table(path, eulerian_table(state), s.format);
    const auto slopes = cell_derivative(s.grid, f.phi.values);
    for (double d : slopes) min_derivative = std::min(min_derivative, d);
  }
  const auto rows = conservation_report(series, s.mu, s.grid, s.grid, params);
  write_table(s.out / (std::string("conservation") + ext), conservation_table(rows), s.format);

  double max_drift = 0.0;
  for (const auto& r : rows) max_drift = std::max(max_drift, std::abs(r.mass_drift));
  json report = run_header(cfg, s);
  report["alpha"] = alpha;
  report["times"] = times;
  report["frames"] = times.size();
  report["execution"] = cfg.parallel == "on" ? "parallel" : "serial";
  report["max_mass_drift"] = max_drift;
  report["min_cell_derivative"] = min_derivative;
  write_json(s.out / "report.json", report);
  std::cout << "evolve: " << times.size() << " frames (" << resumed << " resumed), max |mass - 1| " << max_drift
            << ", min dPhi/dx " << min_derivative << "\n";
  return 0;
}

int cmd_gamma(const RunConfig& cfg) {
  const Setup s = prepare(cfg);
  std::vector<double> alphas = cfg.alphas;
  if (alphas.empty() && cfg.alpha) alphas = {*cfg.alpha};
  if (alphas.empty()) {
    for (int k = 0; k <= 6; ++k) alphas.push_back(0.1 * std::ldexp(1.0, -k));
  }
  const double t = cfg.t ? *cfg.t : 2.0 * characteristic_time(s.scenario);
  if (!(t >= 0.0)) throw ConfigError("--t must be nonnegative");
  const IgrParams params = params_for(cfg, alphas.front() > 0.0 ? alphas.front() : 1.0);
  GammaStudy study;
  try {
    study = gamma_study(s.u0, s.mu, s.grid, t, alphas, params, s.mode, s.execution);
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string ext = extension(s.format);
  write_table(s.out / ("gamma" + ext), gamma_table(study.rows), s.format);

  Table sticky;
  sticky.columns = {"x [L]", "phi [L]", "u [L/T]"};
  const auto velocity = sticky_velocity(s.u0, t, s.mu, s.grid);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    sticky.rows.push_back({s.grid.node(i), study.sticky.values[i], velocity[i]});
  }
  write_table(s.out / ("sticky" + ext), sticky, s.format);

  json report = run_header(cfg, s);
  report["t"] = t;
  report["alphas"] = alphas;
  report["min_energy"] = study.min_energy;
  report["mirrored_discrepancy"] = study.mirrored_discrepancy;
  write_json(s.out / "report.json", report);
  std::cout << "gamma: " << study.rows.size() << " rows, final sup distance " << study.rows.back().sup_distance
            << "\n";
  return 0;
}

int cmd_stability(const RunConfig& cfg) {
  const Setup s = prepare(cfg);
  if (!cfg.alpha) throw ConfigError("--alpha is required (0 selects the sticky projection)");
  const double alpha = *cfg.alpha;
  if (!(alpha >= 0.0)) throw ConfigError("--alpha must be nonnegative");
  if (cfg.pairs < 1) throw ConfigError("--pairs must be at least 1");
  const double t = cfg.t ? *cfg.t : 1.0;
  if (!(t > 0.0)) throw ConfigError("--t must be positive");
  const IgrParams params = params_for(cfg, alpha > 0.0 ? alpha : 1.0);
  const StabilityStudy study = stability_study(cfg.pairs, cfg.seed, s.mu, s.grid, t, alpha, params, s.execution);
  write_table(s.out / (std::string("stability") + extension(s.format)), stability_table(study), s.format);
  json report = run_header(cfg, s);
  report["alpha"] = alpha;
  report["t"] = t;
  report["pairs"] = cfg.pairs;
  report["worst_ratio"] = study.worst_ratio;
  write_json(s.out / "report.json", report);
  std::cout << "stability: worst ratio " << format_double(study.worst_ratio) << " over " << cfg.pairs << " pairs\n";
  return 0;
}

int cmd_refine(const RunConfig& cfg) {
  const Setup s = prepare(cfg);
  const double alpha = require_alpha(cfg);
  const IgrParams params = params_for(cfg, alpha);
  const double tc = characteristic_time(s.scenario);
  const double t = cfg.t ? *cfg.t : 0.5 * tc;
  std::vector<std::size_t> Ns = cfg.Ns;
  if (Ns.empty()) Ns = {64, 128, 256, 512};
  std::vector<double> deltas = cfg.deltas;
  if (deltas.empty()) {
    for (std::size_t n : Ns) deltas.push_back(0.8 * tc / static_cast<double>(n));
  }
  std::vector<RefinementRow> rows;
  try {
    rows = refinement_study(s.scenario, params, t, Ns, deltas, s.mode);
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  write_table(s.out / (std::string("refine") + extension(s.format)), refinement_table(rows), s.format);
  std::cout << "refine: " << rows.size() << " rows\n";
  return 0;
}

int cmd_scenarios() {
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name);
    std::cout << name << "\tshock_time=" << format_double(s.shock_time) << "\t" << describe_scenario(name) << "\n";
  }
  return 0;
}

void apply_thread_cap() {
  const char* env = std::getenv("IGR1D_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("IGR1D_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D pressureless Euler with information geometric regularization"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  RunConfig cfg;
  app.add_option("--scenario", cfg.scenario, "identity | sinewave | twoblock | randomfield");
  app.add_option("--a", cfg.a, "left end of the domain");
  app.add_option("--b", cfg.b, "right end of the domain");
  app.add_option("--alpha", cfg.alpha, "regularization strength");
  app.add_option("--t", cfg.t, "single time");
  app.add_option("--times", cfg.times, "comma-separated increasing times")->delimiter(',');
  app.add_option("--grid", cfg.cells, "number of cells N");
  app.add_option("--data-mode", cfg.data_mode, "regularized | raw");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--format", cfg.format, "csv | json");
  app.add_option("--seed", cfg.seed, "seed for randomfield and stability ensembles");
  app.add_option("--parallel", cfg.parallel, "on | off");
  app.add_option("--alphas", cfg.alphas, "decreasing alpha ladder (gamma)")->delimiter(',');
  app.add_option("--pairs", cfg.pairs, "random pairs (stability)");
  app.add_option("--Ns", cfg.Ns, "increasing cell counts (refine)")->delimiter(',');
  app.add_option("--deltas", cfg.deltas, "time steps paired with --Ns (refine)")->delimiter(',');
  app.add_option("--newton-tol", cfg.newton_tol, "gradient sup-norm tolerance");
  app.add_option("--max-iter", cfg.max_iter, "Newton iteration limit");

  auto* solve = app.add_subcommand("solve", "minimize at one time; writes phi and report.json");
  auto* evolve_cmd = app.add_subcommand("evolve", "frames, Eulerian fields and conservation table over --times");
  auto* gamma = app.add_subcommand("gamma", "distance to the sticky solution along an alpha ladder");
  auto* stability = app.add_subcommand("stability", "worst nonexpansiveness ratio over random pairs");
  auto* refine = app.add_subcommand("refine", "residuals and empirical orders under refinement");
  auto* scenarios = app.add_subcommand("scenarios", "list the scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config", e.what());
    return kConfigExit;
  }

  try {
    apply_thread_cap();
    if (*solve) return cmd_solve(cfg);
    if (*evolve_cmd) return cmd_evolve(cfg);
    if (*gamma) return cmd_gamma(cfg);
    if (*stability) return cmd_stability(cfg);
    if (*refine) return cmd_refine(cfg);
    if (*scenarios) return cmd_scenarios();
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return kConfigExit;
  } catch (const SolveError& e) {
    json extra;
    extra["report"] = to_json(e.report());
    report_error("numerical", e.what(), extra);
    return kNumericalExit;
  } catch (const NumericalError& e) {
    report_error("numerical", e.what());
    return kNumericalExit;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
