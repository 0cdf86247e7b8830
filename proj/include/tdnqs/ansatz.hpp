#pragma once

// Holomorphic 1-H-1 sigmoid network used as the log-amplitude of a 1D
// wavefunction. Evaluation is templated on the real scalar so the same code
// runs in double and long double.
//
// Parameter layout (fixed, checkpoints depend on it), H = hidden width:
//   [0, H)      input->hidden weights W1
//   [H, 2H)     hidden biases b1
//   [2H, 3H)    hidden->output weights W2
//   3H          output bias b2

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tdnqs/errors.hpp"

namespace tdnqs {

using Complex = std::complex<double>;
using Parameters = Eigen::VectorXcd;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

enum class Activation { sigmoid };

/// Selects how the network output f maps to log Psi.
enum class AmplitudeMap {
  exp_of_f,  ///< log Psi = e^f
  f_direct,  ///< log Psi = f
};

struct NetworkSpec {
  int input_dim = 1;
  std::vector<int> hidden_widths{5};
  int output_dim = 1;
  Activation activation = Activation::sigmoid;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Throws std::invalid_argument unless the spec describes a 1-H-1 network.
void validate(const NetworkSpec& spec);

/// Sum over layers of fan_in * fan_out + fan_out.
Eigen::Index parameter_count(const NetworkSpec& spec);

/// Xavier-uniform weights, zero biases. Real and imaginary parts are drawn
/// independently from U(-a, a) with a = sqrt(6 / (fan_in + fan_out)) / sqrt(2),
/// so that E|w|^2 = 2 / (fan_in + fan_out).
Parameters init_parameters(const NetworkSpec& spec, std::uint64_t seed);

/// Index helper for the flat parameter layout.
struct ParameterLayout {
  Eigen::Index hidden;

  Eigen::Index w1(Eigen::Index j) const { return j; }
  Eigen::Index b1(Eigen::Index j) const { return hidden + j; }
  Eigen::Index w2(Eigen::Index j) const { return 2 * hidden + j; }
  Eigen::Index b2() const { return 3 * hidden; }
  Eigen::Index size() const { return 3 * hidden + 1; }

  static ParameterLayout of(Eigen::Index parameter_count);
};

std::string to_string(AmplitudeMap map);
AmplitudeMap parse_amplitude_map(const std::string& name);

inline constexpr double kSigmoidPoleTolerance = 1e-12;

/// Complex logistic function 1 / (1 + e^(-z)). Evaluated in the branch that
/// never overflows, so it saturates to 0 or 1 for large |Re z|. Throws
/// SingularityError near the poles z = i*pi*(2k+1).
template <typename Real>
std::complex<Real> sigmoid(const std::complex<Real>& z) {
  if (z.real() >= Real(0)) {
    const std::complex<Real> denom = Real(1) + std::exp(-z);
    if (std::abs(denom) < Real(kSigmoidPoleTolerance)) {
      throw SingularityError("complex sigmoid pole near z = " + std::to_string(double(z.real())) +
                             " + " + std::to_string(double(z.imag())) + "i");
    }
    return Real(1) / denom;
  }
  const std::complex<Real> e = std::exp(z);
  const std::complex<Real> denom = Real(1) + e;
  if (std::abs(denom) < Real(kSigmoidPoleTolerance)) {
    throw SingularityError("complex sigmoid pole near z = " + std::to_string(double(z.real())) +
                           " + " + std::to_string(double(z.imag())) + "i");
  }
  return e / denom;
}

/// Network output together with its x-derivatives and parameter Jacobian.
template <typename Real>
struct FieldSampleT {
  Real x{};
  std::complex<Real> f{};
  std::complex<Real> df_dx{};
  std::complex<Real> d2f_dx2{};
  ComplexVector<Real> jac;  ///< df / d theta_mu
  Real theta_norm{};        ///< carried for error reporting only
};
using FieldSample = FieldSampleT<double>;

template <typename Real>
struct LogAmplitudeT {
  std::complex<Real> value{};
  std::complex<Real> d_dx{};
  std::complex<Real> d2_dx2{};
  ComplexVector<Real> d_dtheta;
};
using LogAmplitude = LogAmplitudeT<double>;

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& theta) {
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const auto v = theta(i);
    if (!std::isfinite(double(v.real())) || !std::isfinite(double(v.imag()))) {
      throw std::invalid_argument("parameter " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace detail

template <typename Real>
std::complex<Real> forward(const ComplexVector<Real>& theta, Real x) {
  detail::require_finite(theta);
  const ParameterLayout layout = ParameterLayout::of(theta.size());
  std::complex<Real> f = theta(layout.b2());
  for (Eigen::Index j = 0; j < layout.hidden; ++j) {
    const std::complex<Real> z = theta(layout.w1(j)) * x + theta(layout.b1(j));
    f += theta(layout.w2(j)) * sigmoid(z);
  }
  return f;
}

inline Complex forward(const Parameters& theta, double x) { return forward<double>(theta, x); }

/// Closed-form f, f', f'' and df/dtheta. Uses sigma' = s(1-s) and
/// sigma'' = s(1-s)(1-2s).
template <typename Real>
FieldSampleT<Real> forward_with_derivatives(const ComplexVector<Real>& theta, Real x) {
  detail::require_finite(theta);
  const ParameterLayout layout = ParameterLayout::of(theta.size());
  FieldSampleT<Real> out;
  out.x = x;
  out.theta_norm = theta.norm();
  out.jac.resize(theta.size());
  out.f = theta(layout.b2());
  for (Eigen::Index j = 0; j < layout.hidden; ++j) {
    const std::complex<Real> w1 = theta(layout.w1(j));
    const std::complex<Real> w2 = theta(layout.w2(j));
    const std::complex<Real> s = sigmoid(w1 * x + theta(layout.b1(j)));
    const std::complex<Real> ds = s * (Real(1) - s);
    const std::complex<Real> d2s = ds * (Real(1) - Real(2) * s);
    out.f += w2 * s;
    out.df_dx += w2 * ds * w1;
    out.d2f_dx2 += w2 * d2s * w1 * w1;
    out.jac(layout.w1(j)) = w2 * ds * x;
    out.jac(layout.b1(j)) = w2 * ds;
    out.jac(layout.w2(j)) = s;
  }
  out.jac(layout.b2()) = Real(1);
  return out;
}

inline FieldSample forward_with_derivatives(const Parameters& theta, double x) {
  return forward_with_derivatives<double>(theta, x);
}

/// Maps a network sample to log Psi and its derivatives.
/// exp_of_f: L = e^f, L' = e^f f', L'' = e^f (f'' + f'^2), dL/dtheta = e^f df/dtheta.
template <typename Real>
LogAmplitudeT<Real> log_amplitude(const FieldSampleT<Real>& s, AmplitudeMap map) {
  LogAmplitudeT<Real> out;
  if (map == AmplitudeMap::f_direct) {
    out.value = s.f;
    out.d_dx = s.df_dx;
    out.d2_dx2 = s.d2f_dx2;
    out.d_dtheta = s.jac;
    return out;
  }
  // e^f overflows double beyond Re f ~ 709.78.
  if (!(s.f.real() < Real(709))) {
    std::ostringstream msg;
    msg << "exp(f) overflows at x = " << double(s.x) << " (Re f = " << double(s.f.real())
        << ", |theta| = " << double(s.theta_norm) << ")";
    throw OverflowError(msg.str());
  }
  const std::complex<Real> e = std::exp(s.f);
  out.value = e;
  out.d_dx = e * s.df_dx;
  out.d2_dx2 = e * (s.d2f_dx2 + s.df_dx * s.df_dx);
  out.d_dtheta = e * s.jac;
  return out;
}

}  // namespace tdnqs
