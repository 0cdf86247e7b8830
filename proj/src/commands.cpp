#include "tdnqs/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>

#include "tdnqs/io.hpp"

namespace tdnqs {

namespace fs = std::filesystem;

bool BenchmarkReport::ground_state_pass() const {
  return std::abs(ground_state.energy - ground_state_exact) <= thresholds.ground_state_energy;
}
bool BenchmarkReport::density_pass() const { return max_density_error <= thresholds.density_error; }
bool BenchmarkReport::energy_pass() const { return energy_drift <= thresholds.energy_drift; }
bool BenchmarkReport::moment_pass() const {
  return max_center_error <= thresholds.moment_error && max_variance_error <= thresholds.moment_error;
}
bool BenchmarkReport::residual_pass() const { return max_solve_residual < thresholds.solve_residual; }
bool BenchmarkReport::parameter_warning() const { return !(parameter_drift < thresholds.parameter_drift); }
bool BenchmarkReport::passed() const {
  return ground_state_pass() && density_pass() && energy_pass() && moment_pass() && residual_pass();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

AnalyticState analytic_for(const RunConfig& cfg) {
  if (cfg.evolve_ham.x0 != 0.0) {
    throw ConfigError(0, "benchmark oracle requires evolve.x0 = 0");
  }
  if (cfg.prepare.omega == cfg.evolve_ham.omega) {
    return AnalyticState::coherent(cfg.evolve_ham.omega, cfg.prepare.x0);
  }
  AnalyticState s = AnalyticState::breathing(cfg.prepare.omega, cfg.evolve_ham.omega);
  s.x0_init = cfg.prepare.x0;
  return s;
}

}  // namespace

BenchmarkReport run_benchmark(const RunConfig& cfg) {
  validate(cfg);
  if (!cfg.has_evolve) throw ConfigError(0, "benchmark needs an evolve block");
  const AnalyticState exact = analytic_for(cfg);
  const Grid grid = cfg.grid();

  BenchmarkReport report;
  report.protocol = cfg.protocol;
  report.amplitude_map = cfg.amplitude_map;
  report.seed = cfg.seed;
  report.ground_state_exact = 0.5 * cfg.prepare.omega;
  report.initial_energy_exact = analytic_energy(exact);

  auto start = Clock::now();
  report.ground_state = find_ground_state(init_parameters(cfg.net, cfg.seed), cfg.prepare, grid,
                                          cfg.ground_state_config(), cfg.convergence());
  report.ground_state_seconds = seconds_since(start);

  start = Clock::now();
  report.trajectory = evolve(report.ground_state.theta, cfg.evolve_ham, grid, cfg.evolution_config());
  report.dynamics_seconds = seconds_since(start);

  for (const StepDiagnostics& d : report.ground_state.trajectory.diagnostics) {
    report.max_solve_residual = std::max(report.max_solve_residual, d.solve_residual);
  }
  const TrajectoryRecord& traj = report.trajectory;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    const Observables& obs = traj.observables[k];
    const DensityError err = density_error(obs.density, analytic_density(exact, t, grid), grid);
    report.max_density_error = std::max(report.max_density_error, err.max_abs);
    report.max_density_l2 = std::max(report.max_density_l2, err.l2);
    report.max_center_error = std::max(report.max_center_error, std::abs(obs.x_mean - exact.center(t)));
    report.max_variance_error =
        std::max(report.max_variance_error, std::abs(obs.variance - exact.sigma2(t)));
    report.max_solve_residual = std::max(report.max_solve_residual, traj.diagnostics[k].solve_residual);
    report.max_cond_estimate = std::max(report.max_cond_estimate, traj.diagnostics[k].cond_estimate);
  }
  report.initial_energy = traj.observables.front().energy;
  report.energy_drift = energy_drift(traj);
  report.parameter_drift = parameter_drift(traj);
  return report;
}

std::string to_text(const BenchmarkReport& r) {
  auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
  std::ostringstream out;
  out << "protocol: " << to_string(r.protocol) << '\n'
      << "amplitude_map: " << to_string(r.amplitude_map) << '\n'
      << "seed: " << r.seed << '\n'
      << "ground_state_energy: " << format_double(r.ground_state.energy) << '\n'
      << "ground_state_energy_exact: " << format_double(r.ground_state_exact) << '\n'
      << "ground_state_steps: " << r.ground_state.steps << '\n'
      << "ground_state_check: " << verdict(r.ground_state_pass()) << " (tolerance "
      << format_double(r.thresholds.ground_state_energy) << ")\n"
      << "initial_energy: " << format_double(r.initial_energy) << '\n'
      << "initial_energy_exact: " << format_double(r.initial_energy_exact) << '\n'
      << "max_density_error: " << format_double(r.max_density_error) << '\n'
      << "max_density_l2: " << format_double(r.max_density_l2) << '\n'
      << "density_check: " << verdict(r.density_pass()) << " (threshold "
      << format_double(r.thresholds.density_error) << ")\n"
      << "energy_drift: " << format_double(r.energy_drift) << '\n'
      << "energy_check: " << verdict(r.energy_pass()) << " (threshold "
      << format_double(r.thresholds.energy_drift) << ")\n"
      << "max_center_error: " << format_double(r.max_center_error) << '\n'
      << "max_variance_error: " << format_double(r.max_variance_error) << '\n'
      << "moment_check: " << verdict(r.moment_pass()) << " (threshold "
      << format_double(r.thresholds.moment_error) << ")\n"
      << "parameter_drift: " << format_double(r.parameter_drift) << '\n'
      << "parameter_check: " << (r.parameter_warning() ? "warning" : "pass") << " (threshold "
      << format_double(r.thresholds.parameter_drift) << ", not gating)\n"
      << "max_solve_residual: " << format_double(r.max_solve_residual) << '\n'
      << "residual_check: " << verdict(r.residual_pass()) << " (threshold "
      << format_double(r.thresholds.solve_residual) << ")\n"
      << "max_cond_estimate: " << format_double(r.max_cond_estimate) << '\n'
      << "ground_state_seconds: " << r.ground_state_seconds << " (reference ~1.5, not gating)\n"
      << "dynamics_seconds: " << r.dynamics_seconds << " (reference ~7.5, not gating)\n"
      << "result: " << (r.passed() ? "pass" : "FAIL") << '\n';
  return out.str();
}

std::string to_json(const BenchmarkReport& r) {
  nlohmann::json j;
  j["protocol"] = to_string(r.protocol);
  j["amplitude_map"] = to_string(r.amplitude_map);
  j["seed"] = r.seed;
  j["ground_state"] = {{"energy", r.ground_state.energy},
                       {"exact", r.ground_state_exact},
                       {"steps", r.ground_state.steps},
                       {"pass", r.ground_state_pass()},
                       {"seconds", r.ground_state_seconds}};
  j["dynamics"] = {{"initial_energy", r.initial_energy},
                   {"initial_energy_exact", r.initial_energy_exact},
                   {"final_energy", r.trajectory.observables.back().energy},
                   {"energy_drift", r.energy_drift},
                   {"max_density_error", r.max_density_error},
                   {"max_density_l2", r.max_density_l2},
                   {"max_center_error", r.max_center_error},
                   {"max_variance_error", r.max_variance_error},
                   {"parameter_drift", r.parameter_drift},
                   {"parameter_drift_warning", r.parameter_warning()},
                   {"max_solve_residual", r.max_solve_residual},
                   {"max_cond_estimate", r.max_cond_estimate},
                   {"seconds", r.dynamics_seconds}};
  j["checks"] = {{"density", r.density_pass()},
                 {"energy", r.energy_pass()},
                 {"moments", r.moment_pass()},
                 {"solve_residual", r.residual_pass()},
                 {"ground_state", r.ground_state_pass()}};
  j["pass"] = r.passed();
  return j.dump(2) + "\n";
}

fs::path resolve_output_dir(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("TDNQS_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string amplitude_map;
};

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  return parse_config(text, base);
}

void apply_flags(RunConfig& cfg, const CommonFlags& flags) {
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.amplitude_map.empty()) {
    try {
      cfg.amplitude_map = parse_amplitude_map(flags.amplitude_map);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
  }
}

void write_ground_state_outputs(const fs::path& dir, const RunConfig& cfg, const Grid& grid,
                                const TrajectoryRecord& traj, const Parameters& theta,
                                bool converged, std::int64_t steps) {
  write_checkpoint(dir / "ground_state.ckpt",
                   Checkpoint{Checkpoint::kFormatVersion, cfg.net, cfg.seed, cfg.amplitude_map, theta});
  write_file_atomic(dir / "gs_energy.csv", energy_history_csv(traj, cfg.gs_dt));
  if (!traj.empty()) {
    write_file_atomic(dir / "gs_density.csv", final_density_csv(traj.observables.back(), grid));
  }
  nlohmann::json j;
  j["command"] = "ground-state";
  j["converged"] = converged;
  j["steps"] = steps;
  j["energy"] = traj.empty() ? 0.0 : traj.observables.back().energy;
  j["exact_energy"] = 0.5 * cfg.prepare.omega;
  j["seed"] = cfg.seed;
  j["amplitude_map"] = to_string(cfg.amplitude_map);
  write_file_atomic(dir / "gs_summary.json", j.dump(2) + "\n");
}

void write_evolve_outputs(const fs::path& dir, const RunConfig& cfg, const Grid& grid,
                          const TrajectoryRecord& traj, bool completed) {
  write_file_atomic(dir / "trajectory.csv", trajectory_csv(traj));
  write_file_atomic(dir / "density.csv", density_csv(traj, grid));
  nlohmann::json j;
  j["command"] = "evolve";
  j["completed"] = completed;
  j["records"] = traj.size();
  if (!traj.empty()) {
    j["t_final"] = traj.times.back();
    j["initial_energy"] = traj.observables.front().energy;
    j["final_energy"] = traj.observables.back().energy;
    j["energy_drift"] = energy_drift(traj);
    j["parameter_drift"] = parameter_drift(traj);
  }
  j["amplitude_map"] = to_string(cfg.amplitude_map);
  write_file_atomic(dir / "evolve_summary.json", j.dump(2) + "\n");
}

int cmd_ground_state(const std::string& config_path, const CommonFlags& flags, std::ostream& out,
                     std::ostream& err) {
  RunConfig cfg = load_config(config_path, RunConfig{});
  apply_flags(cfg, flags);
  const fs::path dir = resolve_output_dir(flags.output_dir, cfg);
  const Grid grid = cfg.grid();
  write_file_atomic(dir / "effective_config.txt", to_text(cfg));
  try {
    const GroundStateResult gs = find_ground_state(init_parameters(cfg.net, cfg.seed), cfg.prepare,
                                                   grid, cfg.ground_state_config(), cfg.convergence());
    write_ground_state_outputs(dir, cfg, grid, gs.trajectory, gs.theta, true, gs.steps);
    out << "converged energy " << format_double(gs.energy) << " after " << gs.steps << " steps\n";
    return 0;
  } catch (const NotConvergedError& e) {
    write_ground_state_outputs(dir, cfg, grid, e.trajectory, e.theta, false, cfg.gs_max_steps);
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const EvolutionError& e) {
    write_ground_state_outputs(dir, cfg, grid, e.trajectory, e.theta, false,
                               static_cast<std::int64_t>(e.trajectory.size()));
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_evolve(const std::string& config_path, const std::string& checkpoint_path,
               const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(config_path, RunConfig{});
  apply_flags(cfg, flags);
  if (!cfg.has_evolve) throw ConfigError(0, "config has no evolve.* entries");
  Checkpoint ckpt;
  try {
    ckpt = read_checkpoint(checkpoint_path);
  } catch (const std::exception& e) {
    throw ConfigError(0, std::string("checkpoint: ") + e.what());
  }
  if (!(ckpt.spec == cfg.net)) throw ConfigError(0, "checkpoint network differs from net.hidden");
  if (!flags.amplitude_map.empty() && ckpt.amplitude_map != cfg.amplitude_map) {
    throw ConfigError(0, "checkpoint was produced with amplitude map " +
                             to_string(ckpt.amplitude_map));
  }
  cfg.amplitude_map = ckpt.amplitude_map;
  const fs::path dir = resolve_output_dir(flags.output_dir, cfg);
  const Grid grid = cfg.grid();
  write_file_atomic(dir / "effective_config.txt", to_text(cfg));
  try {
    const TrajectoryRecord traj = evolve(ckpt.theta, cfg.evolve_ham, grid, cfg.evolution_config());
    write_evolve_outputs(dir, cfg, grid, traj, true);
    out << "evolved to t = " << format_double(traj.times.back()) << ", energy drift "
        << format_double(energy_drift(traj)) << '\n';
    return 0;
  } catch (const EvolutionError& e) {
    write_evolve_outputs(dir, cfg, grid, e.trajectory, false);
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_benchmark(const std::string& protocol_name, const std::string& config_path,
                  const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  Protocol protocol = Protocol::none;
  if (!protocol_name.empty()) protocol = parse_protocol(protocol_name);
  std::string text;
  if (!config_path.empty()) {
    try {
      text = read_file(config_path);
    } catch (const std::exception& e) {
      throw ConfigError(0, e.what());
    }
    if (protocol == Protocol::none) protocol = parse_config(text, preset(Protocol::coherent)).protocol;
  }
  if (protocol == Protocol::none) throw ConfigError(0, "benchmark needs --protocol coherent|breathing");

  RunConfig cfg = text.empty() ? preset(protocol) : parse_config(text, preset(protocol));
  cfg.protocol = protocol;
  apply_flags(cfg, flags);
  const fs::path dir = resolve_output_dir(flags.output_dir, cfg);
  const Grid grid = cfg.grid();
  write_file_atomic(dir / "effective_config.txt", to_text(cfg));

  BenchmarkReport report;
  try {
    report = run_benchmark(cfg);
  } catch (const NotConvergedError& e) {
    write_ground_state_outputs(dir, cfg, grid, e.trajectory, e.theta, false, cfg.gs_max_steps);
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const EvolutionError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  write_ground_state_outputs(dir, cfg, grid, report.ground_state.trajectory, report.ground_state.theta,
                             true, report.ground_state.steps);
  write_evolve_outputs(dir, cfg, grid, report.trajectory, true);
  write_file_atomic(dir / "benchmark_report.txt", to_text(report));
  write_file_atomic(dir / "benchmark_summary.json", to_json(report));
  out << to_text(report);
  return report.passed() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-dependent neural quantum states for the 1D harmonic oscillator", "tdnqs"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "Network initialization seed");
    sub->add_option("--output-dir", flags.output_dir, "Directory for output files");
    sub->add_option("--amplitude-map", flags.amplitude_map, "exp_of_f or f_direct");
  };

  std::string config_path, checkpoint_path, protocol;
  CLI::App* gs = app.add_subcommand("ground-state", "Imaginary-time ground-state search");
  gs->add_option("--config", config_path, "Config file")->required();
  add_common(gs);

  CLI::App* ev = app.add_subcommand("evolve", "Real-time evolution from a checkpoint");
  ev->add_option("--config", config_path, "Config file")->required();
  ev->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  add_common(ev);

  CLI::App* bm = app.add_subcommand("benchmark", "Run a protocol and compare to the analytic solution");
  bm->add_option("--protocol", protocol, "coherent or breathing");
  bm->add_option("--config", config_path, "Optional config overriding the preset");
  add_common(bm);

  std::vector<const char*> argv;
  argv.push_back("tdnqs");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*gs) return cmd_ground_state(config_path, flags, out, err);
    if (*ev) return cmd_evolve(config_path, checkpoint_path, flags, out, err);
    return cmd_benchmark(protocol, config_path, flags, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace tdnqs
