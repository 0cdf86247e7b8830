#include "tdnqs/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tdnqs {

Grid make_grid(double x_min, double x_max, Eigen::Index n) {
  if (n < 3) throw std::invalid_argument("grid.n must be >= 3, got " + std::to_string(n));
  if (!(x_min < x_max)) throw std::invalid_argument("grid.x_min must be < grid.x_max");
  Grid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.spacing = (x_max - x_min) / double(n - 1);
  g.points.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) g.points(i) = x_min + double(i) * g.spacing;
  g.points(n - 1) = x_max;
  g.weights = Eigen::VectorXd::Constant(n, g.spacing);
  g.weights(0) = g.weights(n - 1) = 0.5 * g.spacing;
  return g;
}

void validate(const HamiltonianSpec& ham) {
  if (!(ham.omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  if (!std::isfinite(ham.x0)) throw std::invalid_argument("x0 must be finite");
}

WaveFunctionOnGrid evaluate_on_grid(const Parameters& theta, const Grid& grid, AmplitudeMap map) {
  const Eigen::Index n = grid.n;
  WaveFunctionOnGrid wf;
  wf.log_psi.resize(n);
  wf.dlog_psi.resize(n);
  wf.d2log_psi.resize(n);
  wf.log_derivs.resize(n, theta.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      const LogAmplitude la = log_amplitude(forward_with_derivatives(theta, grid.points(i)), map);
      wf.log_psi(i) = la.value;
      wf.dlog_psi(i) = la.d_dx;
      wf.d2log_psi(i) = la.d2_dx2;
      wf.log_derivs.row(i) = la.d_dtheta.transpose();
    } catch (const SingularityError& e) {
      throw SingularityError("grid index " + std::to_string(i) + ": " + e.what());
    } catch (const OverflowError& e) {
      throw OverflowError("grid index " + std::to_string(i) + ": " + e.what());
    }
  }
  return wf;
}

Eigen::VectorXcd local_energy(const WaveFunctionOnGrid& wf, const HamiltonianSpec& ham,
                              const Grid& grid) {
  if (wf.size() != grid.n) throw std::invalid_argument("wavefunction and grid sizes differ");
  const Eigen::ArrayXd dx = grid.points.array() - ham.x0;
  const Eigen::ArrayXcd kinetic =
      -0.5 * (wf.d2log_psi.array() + wf.dlog_psi.array().square());
  Eigen::VectorXcd e_loc = kinetic + (0.5 * ham.omega * ham.omega * dx.square()).cast<Complex>();
  if (!e_loc.allFinite()) throw NumericalError("local energy is not finite");
  return e_loc;
}

QuadratureDensity quadrature_density(const WaveFunctionOnGrid& wf, const Grid& grid) {
  if (wf.size() != grid.n) throw std::invalid_argument("wavefunction and grid sizes differ");
  const Eigen::ArrayXd log_rho = 2.0 * wf.log_psi.real().array();
  const double peak = log_rho.maxCoeff();
  if (!std::isfinite(peak)) throw ZeroNormError("log density is not finite");
  const Eigen::ArrayXd scaled = grid.weights.array() * (log_rho - peak).exp();
  const double sum = scaled.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) throw ZeroNormError("quadrature norm vanished");
  QuadratureDensity out;
  out.probabilities = scaled / sum;
  out.log_norm = peak + std::log(sum);
  return out;
}

double Observables::energy_imag_ratio() const {
  return std::abs(energy_imag) / std::max(1.0, std::abs(energy));
}

Observables observables(const WaveFunctionOnGrid& wf, const HamiltonianSpec& ham, const Grid& grid) {
  const QuadratureDensity q = quadrature_density(wf, grid);
  const Eigen::VectorXcd e_loc = local_energy(wf, ham, grid);
  const Eigen::ArrayXd& p = q.probabilities.array();
  const Eigen::ArrayXd x = grid.points.array();

  Observables obs;
  const Complex e = (p.cast<Complex>() * e_loc.array()).sum();
  obs.energy = e.real();
  obs.energy_imag = e.imag();
  obs.log_norm = q.log_norm;
  obs.norm = std::exp(q.log_norm);
  obs.x_mean = (p * x).sum();
  obs.x2_mean = (p * x.square()).sum();
  obs.variance = (p * (x - obs.x_mean).square()).sum();
  obs.density = (p / grid.weights.array()).matrix();
  return obs;
}

}  // namespace tdnqs
