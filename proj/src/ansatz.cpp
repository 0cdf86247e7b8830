#include "tdnqs/ansatz.hpp"

#include <random>

namespace tdnqs {

void validate(const NetworkSpec& spec) {
  if (spec.input_dim != 1 || spec.output_dim != 1) {
    throw std::invalid_argument("network input and output dimensions must be 1");
  }
  if (spec.hidden_widths.size() != 1) {
    throw std::invalid_argument("network must have exactly one hidden layer, got " +
                                std::to_string(spec.hidden_widths.size()));
  }
  if (spec.hidden_widths.front() < 1) {
    throw std::invalid_argument("hidden width must be >= 1");
  }
}

Eigen::Index parameter_count(const NetworkSpec& spec) {
  Eigen::Index count = 0;
  int fan_in = spec.input_dim;
  for (int width : spec.hidden_widths) {
    count += Eigen::Index(fan_in) * width + width;
    fan_in = width;
  }
  count += Eigen::Index(fan_in) * spec.output_dim + spec.output_dim;
  return count;
}

ParameterLayout ParameterLayout::of(Eigen::Index parameter_count) {
  if (parameter_count < 4 || (parameter_count - 1) % 3 != 0) {
    throw std::invalid_argument("parameter vector of length " + std::to_string(parameter_count) +
                                " does not describe a 1-H-1 network");
  }
  return ParameterLayout{(parameter_count - 1) / 3};
}

Parameters init_parameters(const NetworkSpec& spec, std::uint64_t seed) {
  validate(spec);
  const int hidden = spec.hidden_widths.front();
  const ParameterLayout layout{hidden};
  Parameters theta = Parameters::Zero(layout.size());

  std::mt19937_64 rng(seed);
  auto draw = [&rng](int fan_in, int fan_out) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out)) / std::sqrt(2.0);
    std::uniform_real_distribution<double> u(-a, a);
    const double re = u(rng);
    const double im = u(rng);
    return Complex(re, im);
  };
  for (Eigen::Index j = 0; j < hidden; ++j) theta(layout.w1(j)) = draw(spec.input_dim, hidden);
  for (Eigen::Index j = 0; j < hidden; ++j) theta(layout.w2(j)) = draw(hidden, spec.output_dim);
  return theta;
}

std::string to_string(AmplitudeMap map) {
  return map == AmplitudeMap::exp_of_f ? "exp_of_f" : "f_direct";
}

AmplitudeMap parse_amplitude_map(const std::string& name) {
  if (name == "exp_of_f") return AmplitudeMap::exp_of_f;
  if (name == "f_direct") return AmplitudeMap::f_direct;
  throw std::invalid_argument("unknown amplitude map '" + name + "' (expected exp_of_f or f_direct)");
}

}  // namespace tdnqs
