#include "tdnqs/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdnqs {

EvolutionConfig EvolutionConfig::ground_state_defaults() {
  EvolutionConfig cfg;
  cfg.mode = EvolutionMode::imaginary_time;
  cfg.lambda = Complex(1e-4, 0.0);
  return cfg;
}

void validate(const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (cfg.mode == EvolutionMode::real_time && !(cfg.t_max >= cfg.dt)) {
    throw std::invalid_argument("t_max must be >= dt");
  }
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (!(std::abs(cfg.lambda) < kMaxShiftMagnitude)) {
    throw std::invalid_argument("|lambda| must be < 0.1");
  }
}

void validate(const ConvergenceCriterion& crit) {
  if (!(crit.tol > 0.0)) throw std::invalid_argument("convergence tol must be > 0");
  if (crit.patience < 1) throw std::invalid_argument("convergence patience must be >= 1");
  if (crit.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

void StepDiagnostics::merge(const StepDiagnostics& other) {
  step = std::max(step, other.step);
  solve_residual = std::max(solve_residual, other.solve_residual);
  cond_estimate = std::max(cond_estimate, other.cond_estimate);
  energy_imag_ratio = std::max(energy_imag_ratio, other.energy_imag_ratio);
  max_velocity = std::max(max_velocity, other.max_velocity);
  ill_conditioned = ill_conditioned || other.ill_conditioned;
}

TdvpVelocity::TdvpVelocity(Grid grid, HamiltonianSpec ham, AmplitudeMap map, Complex lambda,
                           EvolutionMode mode)
    : grid_(std::move(grid)), ham_(ham), map_(map), lambda_(lambda), mode_(mode) {}

Parameters TdvpVelocity::operator()(const Parameters& theta) {
  const WaveFunctionOnGrid wf = evaluate_on_grid(theta, grid_, map_);
  const QGTSystem sys = regularize(assemble(wf, ham_, grid_, mode_), lambda_);
  const double imag_ratio = std::abs(sys.energy.imag()) / std::max(1.0, std::abs(sys.energy.real()));
  if (mode_ == EvolutionMode::real_time && imag_ratio > kEnergyImagLimit) {
    std::ostringstream msg;
    msg << "energy expectation has relative imaginary part " << imag_ratio;
    throw NumericalError(msg.str());
  }
  ParameterVelocity v = solve_velocity(sys);

  StepDiagnostics stage;
  stage.solve_residual = v.report.residual;
  stage.cond_estimate = v.report.cond_estimate;
  stage.ill_conditioned = v.report.ill_conditioned;
  stage.energy_imag_ratio = imag_ratio;
  stage.max_velocity = v.values.cwiseAbs().maxCoeff();
  diag_.merge(stage);
  return std::move(v.values);
}

namespace {

void record(TrajectoryRecord& traj, double t, const Parameters& theta, Observables obs,
            const StepDiagnostics& diag) {
  traj.times.push_back(t);
  traj.observables.push_back(std::move(obs));
  traj.theta_snapshots.emplace_back(t, theta);
  traj.diagnostics.push_back(diag);
}

StepDiagnostics probe(TdvpVelocity& field, const Parameters& theta) {
  field.reset();
  (void)field(theta);
  StepDiagnostics d = field.diagnostics();
  field.reset();
  return d;
}

}  // namespace

GroundStateResult find_ground_state(const Parameters& theta0, const HamiltonianSpec& ham,
                                    const Grid& grid, const EvolutionConfig& cfg,
                                    const ConvergenceCriterion& crit) {
  validate(cfg);
  validate(crit);
  validate(ham);
  if (cfg.mode != EvolutionMode::imaginary_time) {
    throw std::invalid_argument("ground-state search requires imaginary-time mode");
  }
  if (cfg.lambda.imag() != 0.0 || cfg.lambda.real() < 0.0) {
    throw std::invalid_argument("ground-state search requires a real, non-negative shift");
  }

  TdvpVelocity field(grid, ham, cfg.amplitude_map, cfg.lambda, cfg.mode);
  GroundStateResult result;
  TrajectoryRecord& traj = result.trajectory;
  Parameters theta = theta0;

  try {
    Observables obs = observables(theta, ham, grid, cfg.amplitude_map);
    double previous = obs.energy;
    record(traj, 0.0, theta, std::move(obs), probe(field, theta));

    int calm = 0;
    StepDiagnostics pending;
    for (std::int64_t step = 1; step <= crit.max_steps; ++step) {
      field.reset();
      theta = rk4_step(theta, cfg.dt, field);
      StepDiagnostics d = field.diagnostics();
      d.step = step;
      pending.merge(d);

      obs = observables(theta, ham, grid, cfg.amplitude_map);
      const double energy = obs.energy;
      calm = std::abs(energy - previous) <= crit.tol ? calm + 1 : 0;
      previous = energy;

      const bool done = calm >= crit.patience;
      if (done || step % cfg.record_every == 0) {
        record(traj, double(step) * cfg.dt, theta, std::move(obs), pending);
        pending = StepDiagnostics{};
      }
      if (done) {
        result.theta = theta;
        result.steps = step;
        result.energy = energy;
        return result;
      }
    }
  } catch (const NumericalError& e) {
    throw EvolutionError(std::string("ground-state search failed: ") + e.what(), std::move(traj),
                         theta);
  }
  std::ostringstream msg;
  msg << "ground-state search did not converge within " << crit.max_steps << " steps";
  throw NotConvergedError(msg.str(), std::move(traj), theta);
}

TrajectoryRecord evolve(const Parameters& theta0, const HamiltonianSpec& ham, const Grid& grid,
                        const EvolutionConfig& cfg) {
  validate(cfg);
  validate(ham);
  if (cfg.mode != EvolutionMode::real_time) {
    throw std::invalid_argument("evolve requires real-time mode");
  }

  TdvpVelocity field(grid, ham, cfg.amplitude_map, cfg.lambda, cfg.mode);
  TrajectoryRecord traj;
  Parameters theta = theta0;
  const auto steps = static_cast<std::int64_t>(std::llround(cfg.t_max / cfg.dt));

  try {
    record(traj, 0.0, theta, observables(theta, ham, grid, cfg.amplitude_map), probe(field, theta));
    StepDiagnostics pending;
    for (std::int64_t step = 1; step <= steps; ++step) {
      field.reset();
      theta = rk4_step(theta, cfg.dt, field);
      StepDiagnostics d = field.diagnostics();
      d.step = step;
      pending.merge(d);
      if (step % cfg.record_every == 0 || step == steps) {
        record(traj, double(step) * cfg.dt, theta, observables(theta, ham, grid, cfg.amplitude_map),
               pending);
        pending = StepDiagnostics{};
      }
    }
  } catch (const NumericalError& e) {
    throw EvolutionError(std::string("real-time evolution failed: ") + e.what(), std::move(traj),
                         theta);
  }
  return traj;
}

}  // namespace tdnqs
