#include <doctest.h>

#include <cmath>
#include <complex>

#include "gms/quadrature.hpp"

using namespace gms;

TEST_CASE("gk adaptive: smooth integrands") {
  auto e = gk_adaptive([](double x) { return std::sin(x); }, 0.0, pi);
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(e.error < 1e-10);

  auto g = gk_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK(g.value == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
}

TEST_CASE("gk adaptive: integrable endpoint singularity") {
  auto e = gk_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                       {1e-12, 1e-14, 20000});
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("gk adaptive: split points help kinked integrands") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  auto e = gk_adaptive(f, 0.0, 1.0, {}, {0.3});
  // int |x - 0.3| dx on [0,1] = 0.29
  CHECK(e.value == doctest::Approx(0.29).epsilon(1e-14));
}

TEST_CASE("tail and line integrals") {
  auto t = integrate_tail([](double x) { return std::exp(-x); }, 1.0);
  CHECK(t.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));

  auto cauchy = integrate_line([](double x) { return 1.0 / (gms::pi * (1.0 + x * x)); }, 5.0);
  CHECK(cauchy.value == doctest::Approx(1.0).epsilon(1e-9));

  auto left = integrate_tail([](double x) { return std::exp(x); }, 2.0, true);
  CHECK(left.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("gauss rules") {
  const auto& gl = gauss_legendre(5);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += gl.w[i] * std::pow(gl.x[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-13));

  CHECK(gauss_expectation([](double z) { return z * z; }, 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gauss_expectation([](double z) { return z * z * z * z; }, 0.0, 1.0) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(gauss_expectation([](double z) { return std::exp(z); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  // nonzero mean and sd
  CHECK(gauss_expectation([](double z) { return z * z; }, 2.0, 3.0) ==
        doctest::Approx(13.0).epsilon(1e-12));
}

TEST_CASE("gauss-legendre panel doubling, real and complex") {
  double v = gl_doubling([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));

  std::complex<double> c =
      gl_doubling([](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, 1.0);
  CHECK(c.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
  CHECK(c.imag() == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
}
