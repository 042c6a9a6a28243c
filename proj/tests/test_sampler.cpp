#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gms/density.hpp"
#include "gms/sampler.hpp"

using namespace gms;

namespace {
const rng::Stream stream(20240817, 5);
}

TEST_CASE("sampler: gaussian matches mean and covariance") {
  Vec mean(2);
  mean << 1.0, -2.0;
  Mat cov(2, 2);
  cov << 2.0, 1.0, 1.0, 2.0;
  auto s = make_gaussian_sampler(mean, cov);
  const int n = 200000;
  Vec m = Vec::Zero(2);
  Mat c = Mat::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    Vec x = (*s)(stream, i);
    m += x;
    c += x * x.transpose();
  }
  m /= n;
  c = c / n - m * m.transpose();
  CHECK((m - mean).norm() < 0.02);
  CHECK((c - cov).norm() < 0.05);
}

TEST_CASE("sampler: one-dimensional stable") {
  // alpha = 1 is cauchy: P(|X| > 1) = 1/2
  auto s = make_stable_sampler(1, 1.0, 1.0);
  const int n = 200000;
  int beyond = 0;
  double char_re = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = (*s)(stream, i)[0];
    if (std::abs(x) > 1.0) ++beyond;
    char_re += std::cos(x);
  }
  CHECK(double(beyond) / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(char_re / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));

  // alpha = 1.5: empirical char fn against exp(-|xi|^1.5)
  auto s15 = make_stable_sampler(1, 1.5, 1.0);
  double c1 = 0.0, c2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = (*s15)(stream, i)[0];
    c1 += std::cos(x);
    c2 += std::cos(0.5 * x);
  }
  CHECK(c1 / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
  CHECK(c2 / n == doctest::Approx(std::exp(-std::pow(0.5, 1.5))).epsilon(0.02));
}

TEST_CASE("sampler: one-sided stable subordinator") {
  // laplace transform at 1: E exp(-A) = exp(-1) for alpha = 1/2
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(-one_sided_stable(stream, i, 0, 0.5));
  CHECK(acc / n == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("sampler: isotropic stable in dimension 2") {
  auto s = make_stable_sampler(2, 1.5, 1.0);
  const int n = 200000;
  double c_e1 = 0.0, c_diag = 0.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    Vec x = (*s)(stream, i);
    c_e1 += std::cos(x[0]);
    c_diag += std::cos(inv_sqrt2 * (x[0] + x[1]));
  }
  // both unit frequencies: isotropy forces equal values exp(-1)
  CHECK(c_e1 / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
  CHECK(c_diag / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("sampler: laplace, dirac, convolution") {
  auto lap = make_laplace_sampler(1.0);
  const int n = 200000;
  double s2 = 0.0;
  int pos = 0;
  for (int i = 0; i < n; ++i) {
    double x = (*lap)(stream, i)[0];
    s2 += x * x;
    if (x > 0) ++pos;
  }
  CHECK(s2 / n == doctest::Approx(2.0).epsilon(0.03));
  CHECK(double(pos) / n == doctest::Approx(0.5).epsilon(0.01));

  Vec pt = Vec::Constant(1, 3.25);
  auto dir = make_dirac_sampler(pt);
  CHECK((*dir)(stream, 99)[0] == 3.25);

  auto gauss = make_gaussian_sampler(Vec::Zero(1), Mat::Identity(1, 1));
  auto conv = make_convolution_sampler({gauss, lap, dir});
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = (*conv)(stream, i)[0];
    mean += x;
    var += x * x;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(mean == doctest::Approx(3.25).epsilon(0.01));
  CHECK(var == doctest::Approx(3.0).epsilon(0.03));

  // factor draws use disjoint slots: factor 0 alone reproduces its component
  Vec alone = gauss->draw(stream, 7, 0);
  Vec within = conv->draw(stream, 7, 0);
  Vec lap_part = lap->draw(stream, 7, gauss->slot_span());
  Vec dir_part = dir->draw(stream, 7, gauss->slot_span() + lap->slot_span());
  CHECK(within[0] == doctest::Approx(alone[0] + lap_part[0] + dir_part[0]).epsilon(1e-15));
}

TEST_CASE("sampler: grid quantile sampling") {
  const double L = 10.0;
  const size_t n = 1 << 12;
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) {
    double x = -L + 2.0 * L * double(i) / double(n);
    d[i] = gaussian_pdf(x, 0.5, 1.2);
  }
  auto grid = std::make_shared<GridMeasure>(L, std::move(d));
  auto s = make_grid_sampler(grid);
  const int m = 200000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < m; ++i) {
    double x = (*s)(stream, i)[0];
    mean += x;
    var += x * x;
  }
  mean /= m;
  var = var / m - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.44).epsilon(0.02));
}

TEST_CASE("sampler: poisson counts") {
  const int n = 100000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    int k = poisson_count(stream, i, 0, 3.0);
    mean += k;
    var += double(k) * k;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(var == doctest::Approx(3.0).epsilon(0.03));
  CHECK(poisson_count(stream, 0, 0, 0.0) == 0);
}

TEST_CASE("sampler: determinism across stream copies") {
  auto s = make_stable_sampler(1, 1.2, 0.7);
  rng::Stream a(99, 1), b(99, 1);
  for (int i = 0; i < 100; ++i) CHECK((*s)(a, i)[0] == (*s)(b, i)[0]);
}
