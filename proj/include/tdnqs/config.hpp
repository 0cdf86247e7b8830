#pragma once

// Run configuration and its line-oriented text format.
//
// Grammar, one entry per line:
//   line    := blank | comment | entry
//   comment := '#' any*
//   entry   := section '.' key '=' value
// Whitespace around tokens is ignored. Keys may appear at most once.
//
// Sections and keys (defaults in parentheses):
//   grid.x_min (-8)  grid.x_max (8)  grid.n (100)
//   net.hidden (5)                         comma-separated widths
//   run.seed  run.amplitude_map (exp_of_f)  run.output_dir  run.protocol
//   prepare.omega (1)  prepare.x0 (0)
//   evolve.omega (1)  evolve.x0 (0)  evolve.dt (0.1)  evolve.t_max (50)
//   evolve.lambda_re (0)  evolve.lambda_im (1e-6)  evolve.record_every (1)
//   gs.tol (1e-8)  gs.patience (10)  gs.max_steps (100000)  gs.lambda (1e-4)
//   gs.dt (0.1)  gs.record_every (1)

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tdnqs/integrator.hpp"

namespace tdnqs {

/// Default network seed. Chosen so the default ground-state searches converge
/// from the Xavier start; some seeds diverge on the first RK4 step.
inline constexpr std::uint64_t kDefaultSeed = 400;

/// Config error; line() is 0 when the problem is a constraint on the parsed
/// values rather than a syntax error on a specific line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what
                                    : "config: " + what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class Protocol { none, coherent, breathing };

std::string to_string(Protocol p);
/// Throws ConfigError for anything but "coherent" / "breathing".
Protocol parse_protocol(const std::string& name);

struct RunConfig {
  double grid_x_min = -8.0;
  double grid_x_max = 8.0;
  std::int64_t grid_n = 100;
  NetworkSpec net;
  std::uint64_t seed = kDefaultSeed;
  AmplitudeMap amplitude_map = AmplitudeMap::exp_of_f;
  std::string output_dir;  ///< empty: not set in the file
  Protocol protocol = Protocol::none;

  HamiltonianSpec prepare{1.0, 0.0};

  bool has_evolve = false;  ///< any evolve.* key present, or a protocol preset
  HamiltonianSpec evolve_ham{1.0, 0.0};
  double evolve_dt = 0.1;
  double evolve_t_max = 50.0;
  double evolve_lambda_re = 0.0;
  double evolve_lambda_im = 1e-6;
  int evolve_record_every = 1;

  double gs_tol = 1e-8;
  int gs_patience = 10;
  std::int64_t gs_max_steps = 100000;
  double gs_lambda = 1e-4;
  double gs_dt = 0.1;
  int gs_record_every = 1;

  Grid grid() const { return make_grid(grid_x_min, grid_x_max, grid_n); }
  EvolutionConfig ground_state_config() const;
  ConvergenceCriterion convergence() const;
  EvolutionConfig evolution_config() const;
};

/// Parses `text` on top of `base`. Throws ConfigError.
RunConfig parse_config(const std::string& text, const RunConfig& base = RunConfig{});

/// Checks every numeric constraint; throws ConfigError naming the key.
void validate(const RunConfig& cfg);

/// Full effective configuration in the same grammar; parse_config(to_text(c))
/// reproduces c.
std::string to_text(const RunConfig& cfg);

/// Built-in protocol: ground state in the prepare trap, then a sudden quench
/// to the evolve trap, t in [0, 50].
///   coherent:  prepare (omega 1, x0 1) -> evolve (omega 1, x0 0)
///   breathing: prepare (omega 1, x0 0) -> evolve (omega 0.5, x0 0)
RunConfig preset(Protocol p);

}  // namespace tdnqs
