#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tdnqs/ansatz.hpp"
#include "tdnqs/errors.hpp"

using namespace tdnqs;
using tdnqs::testing::random_parameters;

TEST_CASE("parameter count and layout of the 1-5-1 network") {
  NetworkSpec spec;
  CHECK(parameter_count(spec) == 16);
  const ParameterLayout layout = ParameterLayout::of(16);
  CHECK(layout.hidden == 5);
  CHECK(layout.w1(0) == 0);
  CHECK(layout.b1(0) == 5);
  CHECK(layout.w2(0) == 10);
  CHECK(layout.b2() == 15);
  CHECK_THROWS_AS(ParameterLayout::of(15), std::invalid_argument);
  CHECK_THROWS_AS(ParameterLayout::of(1), std::invalid_argument);
}

TEST_CASE("network spec validation") {
  NetworkSpec spec;
  CHECK_NOTHROW(validate(spec));
  spec.hidden_widths = {5, 5};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.hidden_widths = {0};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.hidden_widths = {5};
  spec.input_dim = 2;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("initialization: deterministic, zero biases, Xavier bounds") {
  NetworkSpec spec;
  const Parameters a = init_parameters(spec, 42);
  const Parameters b = init_parameters(spec, 42);
  const Parameters c = init_parameters(spec, 43);
  CHECK(a == b);
  CHECK(a != c);

  const ParameterLayout layout = ParameterLayout::of(a.size());
  const double bound = std::sqrt(6.0 / 6.0) / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < layout.hidden; ++j) {
    CHECK(a(layout.b1(j)) == Complex(0.0, 0.0));
    for (Complex w : {a(layout.w1(j)), a(layout.w2(j))}) {
      CHECK(std::abs(w.real()) <= bound);
      CHECK(std::abs(w.imag()) <= bound);
    }
  }
  CHECK(a(layout.b2()) == Complex(0.0, 0.0));
}

TEST_CASE("initialization statistics: E|w|^2 = 2/(fan_in + fan_out)") {
  // Each component is U(-a, a) with a = sqrt(3/(fan_in+fan_out)), so
  // E|w|^2 = 2 a^2 / 3 = 1/3 and Var|w|^2 = 2 Var(u^2) = 2 (a^4/5 - a^4/9).
  NetworkSpec spec;
  const ParameterLayout layout = ParameterLayout::of(parameter_count(spec));
  const int seeds = 10000;
  double sum_w1 = 0.0, sum_w2 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Parameters theta = init_parameters(spec, static_cast<std::uint64_t>(s));
    for (Eigen::Index j = 0; j < layout.hidden; ++j) {
      sum_w1 += std::norm(theta(layout.w1(j)));
      sum_w2 += std::norm(theta(layout.w2(j)));
    }
  }
  const double samples = double(seeds) * layout.hidden;
  const double a2 = 3.0 / 6.0;
  const double expected = 2.0 * a2 / 3.0;
  const double sd = std::sqrt(2.0 * (a2 * a2 / 5.0 - a2 * a2 / 9.0));
  const double se = sd / std::sqrt(samples);
  CHECK(std::abs(sum_w1 / samples - expected) < 3.0 * se);
  CHECK(std::abs(sum_w2 / samples - expected) < 3.0 * se);
}

TEST_CASE("sigmoid: reference values, symmetry and saturation") {
  CHECK(sigmoid(Complex(0.0, 0.0)) == Complex(0.5, 0.0));
  const Complex z(0.3, -1.1);
  const Complex ref = 1.0 / (1.0 + std::exp(-z));
  CHECK(std::abs(sigmoid(z) - ref) < 1e-15);
  // sigma(z) + sigma(-z) = 1
  for (double re : {-3.0, -0.2, 0.0, 0.7, 4.0}) {
    for (double im : {-2.0, 0.5, 1.3}) {
      const Complex w(re, im);
      CHECK(std::abs(sigmoid(w) + sigmoid(-w) - 1.0) < 1e-14);
    }
  }
  // Large |Re z| saturates without overflow or NaN.
  const Complex hi = sigmoid(Complex(800.0, 1.0));
  const Complex lo = sigmoid(Complex(-800.0, 1.0));
  CHECK(hi == Complex(1.0, 0.0));
  CHECK(std::abs(lo) == 0.0);
  CHECK(std::isfinite(lo.real()));
}

TEST_CASE("sigmoid pole raises SingularityError") {
  const Complex pole(0.0, std::numbers::pi);
  CHECK_THROWS_AS(sigmoid(pole), SingularityError);
  CHECK_THROWS_AS(sigmoid(Complex(0.0, -3.0 * std::numbers::pi)), SingularityError);
  CHECK_NOTHROW(sigmoid(Complex(1e-3, std::numbers::pi)));

  Parameters theta = Parameters::Zero(16);
  theta(5) = Complex(0.0, std::numbers::pi);  // b1_0 at a pole, W1_0 = 0
  theta(10) = 1.0;
  CHECK_THROWS_AS(forward(theta, 0.5), SingularityError);
  CHECK_THROWS_AS(forward_with_derivatives(theta, 0.5), SingularityError);
}

TEST_CASE("non-finite parameters are rejected") {
  Parameters theta = Parameters::Zero(16);
  theta(3) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(forward(theta, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(forward_with_derivatives(theta, 0.0), std::invalid_argument);
}

TEST_CASE("forward pass matches a 50-digit evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Parameters theta = random_parameters(rng);
    for (double x : {-8.0, -3.3, 0.0, 1.7, 8.0}) {
      const Complex ref = tdnqs::testing::forward_high_precision(theta, x);
      CHECK(std::abs(forward(theta, x) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("forward_with_derivatives agrees with forward and finite differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Parameters theta = random_parameters(rng);
    for (double x : {-6.0, -1.2, 0.0, 0.9, 5.5}) {
      const FieldSample s = forward_with_derivatives(theta, x);
      CHECK(std::abs(s.f - forward(theta, x)) < 1e-14 * std::max(1.0, std::abs(s.f)));
      CHECK(tdnqs::testing::rel_err(s.df_dx, tdnqs::testing::fd_dx(theta, x)) < 1e-7);
      CHECK(tdnqs::testing::rel_err(s.d2f_dx2, tdnqs::testing::fd_d2x(theta, x)) < 1e-5);
      for (Eigen::Index mu = 0; mu < theta.size(); ++mu) {
        const Complex fd = tdnqs::testing::fd_dtheta(theta, x, mu, 1.0);
        CHECK(tdnqs::testing::rel_err(s.jac(mu), fd) < 1e-7);
      }
    }
  }
}

TEST_CASE("derivative consistency on 100 random draws against 50-digit differences") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> xs(-8.0, 8.0);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const Parameters theta = random_parameters(rng, 5, 0.5);
    const double x = xs(rng);
    const FieldSample s = forward_with_derivatives(theta, x);
    worst = std::max(worst, tdnqs::testing::rel_err(s.df_dx, tdnqs::testing::mp_fd_dx(theta, x)));
    worst = std::max(worst, tdnqs::testing::rel_err(s.d2f_dx2, tdnqs::testing::mp_fd_d2x(theta, x)));
    for (Eigen::Index mu = 0; mu < theta.size(); ++mu) {
      worst = std::max(worst, tdnqs::testing::rel_err(s.jac(mu), tdnqs::testing::mp_fd_dtheta(theta, x, mu)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("f is holomorphic in each parameter (Cauchy-Riemann)") {
  // df/d(Re theta) = df/dtheta and df/d(Im theta) = i df/dtheta.
  std::mt19937_64 rng(8);
  const Parameters theta = random_parameters(rng);
  for (double x : {-2.0, 0.4, 3.1}) {
    const FieldSample s = forward_with_derivatives(theta, x);
    for (Eigen::Index mu = 0; mu < theta.size(); ++mu) {
      const Complex d_re = tdnqs::testing::fd_dtheta(theta, x, mu, 1.0);
      const Complex d_im = tdnqs::testing::fd_dtheta(theta, x, mu, Complex(0.0, 1.0));
      CHECK(tdnqs::testing::rel_err(d_im, Complex(0.0, 1.0) * d_re) < 1e-7);
      CHECK(tdnqs::testing::rel_err(d_re, s.jac(mu)) < 1e-7);
    }
  }
}

TEST_CASE("templated forward pass in long double agrees with double") {
  std::mt19937_64 rng(3);
  const Parameters theta = random_parameters(rng);
  const ComplexVector<long double> theta_ld = theta.cast<std::complex<long double>>();
  for (double x : {-4.0, 0.25, 7.0}) {
    const auto f_ld = forward<long double>(theta_ld, x);
    const Complex f = forward(theta, x);
    CHECK(std::abs(Complex(double(f_ld.real()), double(f_ld.imag())) - f) < 1e-13);
  }
}

TEST_CASE("log amplitude maps") {
  std::mt19937_64 rng(21);
  const Parameters theta = random_parameters(rng);
  const FieldSample s = forward_with_derivatives(theta, 0.7);

  SUBCASE("f_direct is the identity") {
    const LogAmplitude l = log_amplitude(s, AmplitudeMap::f_direct);
    CHECK(l.value == s.f);
    CHECK(l.d_dx == s.df_dx);
    CHECK(l.d2_dx2 == s.d2f_dx2);
    CHECK(l.d_dtheta == s.jac);
  }

  SUBCASE("exp_of_f chain rule matches finite differences of e^f") {
    const LogAmplitude l = log_amplitude(s, AmplitudeMap::exp_of_f);
    auto L = [&](double x) { return std::exp(forward(theta, x)); };
    const double h = 1e-4;
    CHECK(std::abs(l.value - std::exp(s.f)) < 1e-14);
    CHECK(tdnqs::testing::rel_err(l.d_dx, (L(0.7 + h) - L(0.7 - h)) / (2 * h)) < 1e-7);
    CHECK(tdnqs::testing::rel_err(l.d2_dx2, (L(0.7 + h) - 2.0 * L(0.7) + L(0.7 - h)) / (h * h)) < 1e-5);
    for (Eigen::Index mu = 0; mu < theta.size(); ++mu) {
      CHECK(std::abs(l.d_dtheta(mu) - l.value * s.jac(mu)) < 1e-15);
    }
  }

  SUBCASE("exp_of_f overflow is reported with x and |theta|") {
    FieldSample big = s;
    big.f = Complex(710.0, 0.0);
    try {
      (void)log_amplitude(big, AmplitudeMap::exp_of_f);
      FAIL("expected OverflowError");
    } catch (const OverflowError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("x = 0.7") != std::string::npos);
      CHECK(msg.find("|theta|") != std::string::npos);
    }
    CHECK_NOTHROW(log_amplitude(big, AmplitudeMap::f_direct));
  }
}

TEST_CASE("amplitude map names round-trip") {
  for (AmplitudeMap m : {AmplitudeMap::exp_of_f, AmplitudeMap::f_direct}) {
    CHECK(parse_amplitude_map(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_amplitude_map("exp"), std::invalid_argument);
}
