#include <doctest.h>

#include <cmath>

#include "tdnqs/config.hpp"
#include "tdnqs/errors.hpp"
#include "tdnqs/integrator.hpp"
#include "tdnqs/oracle.hpp"

using namespace tdnqs;

namespace {

Parameters initial_parameters() { return init_parameters(NetworkSpec{}, kDefaultSeed); }

const GroundStateResult& ground_state(double x0) {
  static const GroundStateResult centered =
      find_ground_state(initial_parameters(), HamiltonianSpec{1.0, 0.0}, default_grid(),
                        EvolutionConfig::ground_state_defaults(), ConvergenceCriterion{});
  static const GroundStateResult displaced =
      find_ground_state(initial_parameters(), HamiltonianSpec{1.0, 1.0}, default_grid(),
                        EvolutionConfig::ground_state_defaults(), ConvergenceCriterion{});
  return x0 == 0.0 ? centered : displaced;
}

}  // namespace

TEST_CASE("rk4_step on scalar test equations") {
  using V = Eigen::VectorXcd;
  const V one = V::Constant(1, 1.0);

  SUBCASE("zero field leaves the state unchanged") {
    const V out = rk4_step(one, 0.1, [](const V& v) { return V::Zero(v.size()); });
    CHECK(out == one);
  }
  SUBCASE("decay: theta' = -theta") {
    const V out = rk4_step(one, 0.1, [](const V& v) { return V(-v); });
    // RK4 update factor 1 - h + h^2/2 - h^3/6 + h^4/24
    CHECK(std::abs(out(0) - 0.9048375) < 1e-15);
    CHECK(std::abs(out(0) - std::exp(-0.1)) < 1e-7);
  }
  SUBCASE("rotation: theta' = -i theta") {
    const V out = rk4_step(one, 0.1, [](const V& v) { return V(Complex(0, -1) * v); });
    CHECK(std::abs(std::abs(out(0)) - 1.0) < 1e-7);
    CHECK(std::abs(out(0) - std::exp(Complex(0, -0.1))) < 1e-7);
  }
}

TEST_CASE("rk4_step tags numerical failures with the stage index") {
  using V = Eigen::VectorXcd;
  for (int failing = 1; failing <= 4; ++failing) {
    int calls = 0;
    auto field = [&](const V& v) -> V {
      if (++calls == failing) throw SingularSystemError("boom");
      return -v;
    };
    try {
      (void)rk4_step(V(V::Ones(2)), 0.1, field);
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == failing);
      CHECK(std::string(e.what()) == "RK4 stage " + std::to_string(failing) + ": boom");
    }
  }
}

TEST_CASE("configuration validation") {
  EvolutionConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.dt = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = EvolutionConfig{};
  cfg.t_max = 0.05;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = EvolutionConfig{};
  cfg.record_every = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);

  ConvergenceCriterion crit;
  CHECK_NOTHROW(validate(crit));
  crit.tol = 0.0;
  CHECK_THROWS_AS(validate(crit), std::invalid_argument);
  crit = ConvergenceCriterion{};
  crit.patience = 0;
  CHECK_THROWS_AS(validate(crit), std::invalid_argument);

  const Parameters theta = initial_parameters();
  CHECK_THROWS_AS(find_ground_state(theta, HamiltonianSpec{}, default_grid(), EvolutionConfig{},
                                    ConvergenceCriterion{}),
                  std::invalid_argument);
  EvolutionConfig complex_shift = EvolutionConfig::ground_state_defaults();
  complex_shift.lambda = Complex(0.0, 1e-6);
  CHECK_THROWS_AS(find_ground_state(theta, HamiltonianSpec{}, default_grid(), complex_shift,
                                    ConvergenceCriterion{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(evolve(theta, HamiltonianSpec{}, default_grid(), EvolutionConfig::ground_state_defaults()),
                  std::invalid_argument);
}

TEST_CASE("ground state in the centered trap") {
  const GroundStateResult& gs = ground_state(0.0);
  CHECK(std::abs(gs.energy - 0.5) < 1e-6);
  const Observables& last = gs.trajectory.observables.back();
  CHECK(std::abs(last.x_mean) < 1e-4);
  CHECK(gs.trajectory.times.back() == doctest::Approx(double(gs.steps) * 0.1));
}

TEST_CASE("ground state in the displaced trap") {
  const GroundStateResult& gs = ground_state(1.0);
  CHECK(std::abs(gs.energy - 0.5) < 1e-6);
  const Grid g = default_grid();
  const Observables obs = observables(gs.theta, HamiltonianSpec{1.0, 1.0}, g, AmplitudeMap::exp_of_f);
  const DensityError err =
      density_error(obs.density, analytic_density(AnalyticState::ground(1.0, 1.0), 0.0, g), g);
  CHECK(err.max_abs < 1e-4);
}

TEST_CASE("imaginary-time energy descends monotonically") {
  for (double x0 : {0.0, 1.0}) {
    const auto& obs = ground_state(x0).trajectory.observables;
    for (std::size_t k = 1; k < obs.size(); ++k) CHECK(obs[k].energy <= obs[k - 1].energy + 1e-10);
  }
}

TEST_CASE("trajectory bookkeeping of the ground-state search") {
  const TrajectoryRecord& traj = ground_state(0.0).trajectory;
  CHECK(traj.times.size() == traj.observables.size());
  CHECK(traj.times.size() == traj.theta_snapshots.size());
  CHECK(traj.times.size() == traj.diagnostics.size());
  CHECK(traj.times.front() == 0.0);
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
  for (const StepDiagnostics& d : traj.diagnostics) CHECK(d.solve_residual < 1e-8);
}

TEST_CASE("an already converged start terminates after patience steps") {
  const GroundStateResult& gs = ground_state(1.0);
  const ConvergenceCriterion crit;
  const GroundStateResult again = find_ground_state(gs.theta, HamiltonianSpec{1.0, 1.0}, default_grid(),
                                                    EvolutionConfig::ground_state_defaults(), crit);
  CHECK(again.steps == crit.patience);
  CHECK(std::abs(again.energy - gs.energy) <= crit.patience * crit.tol);
}

TEST_CASE("exhausting max_steps raises NotConverged with the partial trajectory") {
  ConvergenceCriterion crit;
  crit.max_steps = 3;
  try {
    (void)find_ground_state(initial_parameters(), HamiltonianSpec{}, default_grid(),
                            EvolutionConfig::ground_state_defaults(), crit);
    FAIL("expected NotConvergedError");
  } catch (const NotConvergedError& e) {
    CHECK(e.trajectory.size() == 4);
    CHECK(e.theta.size() == 16);
  }
}

TEST_CASE("numerical failures inside a run carry the partial trajectory") {
  Parameters theta = Parameters::Zero(16);
  theta(15) = Complex(700.0, 0.0);
  theta(10) = Complex(20.0, 0.0);  // Re f reaches 720 for large x: exp(f) overflows
  theta(0) = Complex(1.0, 0.0);
  try {
    (void)evolve(theta, HamiltonianSpec{}, default_grid(), EvolutionConfig{});
    FAIL("expected EvolutionError");
  } catch (const EvolutionError& e) {
    CHECK(std::string(e.what()).find("real-time evolution failed") != std::string::npos);
    CHECK(std::string(e.what()).find("overflows") != std::string::npos);
    CHECK(e.theta == theta);
  }
}

TEST_CASE("stationary state: no quench keeps energy and density fixed") {
  const GroundStateResult& gs = ground_state(0.0);
  EvolutionConfig cfg;
  cfg.t_max = 10.0;
  const Grid g = default_grid();
  const TrajectoryRecord traj = evolve(gs.theta, HamiltonianSpec{1.0, 0.0}, g, cfg);
  CHECK(traj.size() == 101);
  CHECK(traj.times.back() == doctest::Approx(10.0));
  CHECK(energy_drift(traj) < 1e-8);
  double density_drift = 0.0;
  for (const Observables& o : traj.observables) {
    density_drift = std::max(density_drift, (o.density - traj.observables.front().density).cwiseAbs().maxCoeff());
  }
  CHECK(density_drift < 1e-6);
  for (const StepDiagnostics& d : traj.diagnostics) CHECK(d.solve_residual < 1e-8);
}

TEST_CASE("stationarity holds once the ground state is converged far below the default tolerance") {
  ConvergenceCriterion crit;
  crit.tol = 1e-14;
  crit.max_steps = 200000;
  const Grid g = default_grid();
  const HamiltonianSpec ham{1.0, 0.0};
  const GroundStateResult tight =
      find_ground_state(ground_state(0.0).theta, ham, g, EvolutionConfig::ground_state_defaults(), crit);
  EvolutionConfig cfg;
  cfg.t_max = 10.0;
  const TrajectoryRecord traj = evolve(tight.theta, ham, g, cfg);
  CHECK(energy_drift(traj) < 1e-8);
  double density_drift = 0.0;
  for (const Observables& o : traj.observables) {
    density_drift = std::max(density_drift, (o.density - traj.observables.front().density).cwiseAbs().maxCoeff());
  }
  CHECK(density_drift < 1e-6);
}

TEST_CASE("evolution records every record_every steps plus the final step") {
  const GroundStateResult& gs = ground_state(0.0);
  EvolutionConfig cfg;
  cfg.t_max = 1.0;
  cfg.record_every = 3;
  const TrajectoryRecord traj = evolve(gs.theta, HamiltonianSpec{1.0, 0.0}, default_grid(), cfg);
  REQUIRE(traj.size() == 5);
  CHECK(traj.times[1] == doctest::Approx(0.3));
  CHECK(traj.times[3] == doctest::Approx(0.9));
  CHECK(traj.times[4] == doctest::Approx(1.0));
  CHECK(traj.diagnostics[4].step == 10);
}

TEST_CASE("evolution is deterministic") {
  const GroundStateResult& gs = ground_state(1.0);
  EvolutionConfig cfg;
  cfg.t_max = 2.0;
  const TrajectoryRecord a = evolve(gs.theta, HamiltonianSpec{1.0, 0.0}, default_grid(), cfg);
  const TrajectoryRecord b = evolve(gs.theta, HamiltonianSpec{1.0, 0.0}, default_grid(), cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.theta_snapshots[k].second == b.theta_snapshots[k].second);
    CHECK(a.observables[k].energy == b.observables[k].energy);
  }
}
