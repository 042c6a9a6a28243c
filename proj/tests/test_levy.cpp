#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "gms/levy.hpp"
#include "gms/quadrature.hpp"

using namespace gms;
using cd = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec v1(double x) { return Vec::Constant(1, x); }

// stable noise with gaussian component: the running example with invariant
// law N(0,1) convolved with cauchy(1)
LevyTriple stable_triple() {
  LevyTriple t;
  t.b = Vec::Zero(1);
  t.Q = Mat::Constant(1, 1, 2.0);
  t.nu = LevyMeasureSpec::symmetric_stable(1.0, 1.0);
  return t;
}

// compound poisson with laplace jumps plus gaussian part; invariant jump
// factor is laplace(1) when rate = 2 beta
LevyTriple cp_triple(double beta, double delta) {
  LevyTriple t;
  t.b = Vec::Zero(1);
  t.Q = Mat::Constant(1, 1, 2.0 * delta);
  t.nu = LevyMeasureSpec::compound_poisson_laplace(2.0 * beta, 1.0);
  return t;
}

}  // namespace

TEST_CASE("levy: characteristic exponent closed forms") {
  // frozen: b=0, Q=2, stable(alpha=1, scale=1) at xi=2 gives 0.5*2*4 + 2 = 6
  auto lam = char_exponent(stable_triple(), v1(2.0));
  CHECK(lam.real() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(lam.imag() == doctest::Approx(0.0).epsilon(1e-14));

  LevyTriple with_drift = stable_triple();
  with_drift.b = v1(1.0);
  auto lam2 = char_exponent(with_drift, v1(2.0));
  CHECK(lam2.real() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(lam2.imag() == doctest::Approx(-2.0).epsilon(1e-14));

  // compound poisson with laplace jumps: rate * u^2/(1+u^2)
  auto lam3 = char_exponent(cp_triple(1.0, 0.0), v1(1.0));
  CHECK(lam3.real() == doctest::Approx(1.0).epsilon(1e-14));

  // single atom below radius one is compensated
  LevyTriple atom;
  atom.b = Vec::Zero(1);
  atom.Q = Mat::Zero(1, 1);
  atom.nu = LevyMeasureSpec::finite_atoms({{v1(0.5), 2.0}});
  auto lam4 = char_exponent(atom, v1(1.0));
  CHECK(lam4.real() == doctest::Approx(2.0 * (1.0 - std::cos(0.5))).epsilon(1e-14));
  CHECK(lam4.imag() == doctest::Approx(2.0 * (0.5 - std::sin(0.5))).epsilon(1e-14));
}

TEST_CASE("levy: stable normalizer") {
  // frozen: alpha = 1 has density 1/(pi y^2)
  CHECK(stable_levy_constant(1.0) == doctest::Approx(1.0 / pi).epsilon(1e-10));
  // independent closed form Gamma(1+a) sin(pi a / 2) / pi
  for (double a : {0.5, 0.8, 1.3, 1.7}) {
    const double closed = std::tgamma(1.0 + a) * std::sin(pi * a / 2.0) / pi;
    CHECK(stable_levy_constant(a) == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("levy: integrated exponent, stable model closed form") {
  auto sg = SemigroupSpec::diagonal(v1(1.0));
  const double t = std::log(2.0);
  // Lambda_t(1) = (1 - e^-t) + (1 - e^-2t)/2 * 2 * 1/2 ... = 0.875
  auto lam = integrated_exponent(stable_triple(), sg, t, v1(1.0));
  CHECK(lam.real() == doctest::Approx(0.875).epsilon(1e-13));
  CHECK(std::abs(char_fn_mu_t(stable_triple(), sg, t, v1(1.0)) -
                 std::exp(-0.875)) < 1e-13);
  // frozen decimal expansion of exp(-0.875)
  CHECK(char_fn_mu_t(stable_triple(), sg, t, v1(1.0)).real() ==
        doctest::Approx(0.41686201967850839).epsilon(1e-12));

  // invariant exponent: |xi| + xi^2/2
  auto inf_lam = integrated_exponent(stable_triple(), sg, kInf, v1(1.0));
  CHECK(inf_lam.real() == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("levy: integrated exponent, compound poisson closed form") {
  const double beta = 1.0, delta = 1.0;
  auto sg = SemigroupSpec::diagonal(v1(beta));
  auto trip = cp_triple(beta, delta);
  for (double t : {0.3, std::log(2.0), 2.0}) {
    for (double xi : {0.5, 1.0, 2.0}) {
      const double e2 = std::exp(-2.0 * beta * t);
      const cd expect = (delta / (2.0 * beta)) * (1.0 - e2) * xi * xi +
                        std::log((1.0 + xi * xi) / (1.0 + e2 * xi * xi));
      auto got = integrated_exponent(trip, sg, t, v1(xi));
      CHECK(std::abs(got - expect) < 1e-12);
    }
  }
  // invariant characteristic function factorizes into gaussian * laplace
  auto fac = invariant_factorization(trip, sg);
  CHECK(fac.Q_inf(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fac.b_inf.norm() < 1e-12);
  for (double xi : {0.5, 1.0, 3.0}) {
    CHECK(std::abs(fac.pi_charfn(v1(xi)) - 1.0 / (1.0 + xi * xi)) < 1e-12);
    CHECK(std::abs(fac.mu_charfn(v1(xi)) -
                   std::exp(-0.5 * xi * xi) / (1.0 + xi * xi)) < 1e-12);
  }
}

TEST_CASE("levy: stable invariant factorization is gaussian times cauchy") {
  auto sg = SemigroupSpec::diagonal(v1(1.0));
  auto fac = invariant_factorization(stable_triple(), sg);
  CHECK(fac.Q_inf(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double xi : {0.25, 1.0, 2.0})
    CHECK(std::abs(fac.pi_charfn(v1(xi)) - std::exp(-xi)) < 1e-12);
}

TEST_CASE("levy: flow identity for quadrature-backed kinds") {
  // Lambda_{t+s}(xi) = Lambda_s(xi) + Lambda_t(S(s)^T xi)
  auto sg = SemigroupSpec::diagonal(v1(1.0));
  LevyTriple atoms;
  atoms.b = v1(0.3);
  atoms.Q = Mat::Constant(1, 1, 0.5);
  atoms.nu = LevyMeasureSpec::finite_atoms({{v1(1.5), 0.7}, {v1(-0.4), 1.1}});
  const double t = 0.7, s = 0.4;
  const Vec xi = v1(1.3);
  auto lhs = integrated_exponent(atoms, sg, t + s, xi);
  auto rhs = integrated_exponent(atoms, sg, s, xi) +
             integrated_exponent(atoms, sg, t, Vec(sg.S(s).transpose() * xi));
  CHECK(std::abs(lhs - rhs) < 1e-10);

  LevyTriple cpg;
  cpg.b = Vec::Zero(1);
  cpg.Q = Mat::Zero(1, 1);
  cpg.nu = LevyMeasureSpec::compound_poisson_gaussian(1.5, 0.8);
  auto l2 = integrated_exponent(cpg, sg, t + s, xi);
  auto r2 = integrated_exponent(cpg, sg, s, xi) +
            integrated_exponent(cpg, sg, t, Vec(sg.S(s).transpose() * xi));
  CHECK(std::abs(l2 - r2) < 1e-10);
}

TEST_CASE("levy: matrix semigroup agrees with diagonal closed forms") {
  auto diag = SemigroupSpec::diagonal(v1(1.0));
  auto mat = SemigroupSpec::matrix(Mat::Constant(1, 1, -1.0));
  LevyTriple gauss;
  gauss.b = v1(0.7);
  gauss.Q = Mat::Constant(1, 1, 2.0);
  gauss.nu = LevyMeasureSpec::zero();
  for (double t : {0.5, 2.0}) {
    auto a = integrated_exponent(gauss, diag, t, v1(1.2));
    auto b = integrated_exponent(gauss, mat, t, v1(1.2));
    CHECK(std::abs(a - b) < 1e-12);
    auto ca = characteristics_t(gauss, diag, t);
    auto cb = characteristics_t(gauss, mat, t);
    CHECK(std::abs(ca.Q_t(0, 0) - cb.Q_t(0, 0)) < 1e-12);
    CHECK(std::abs(ca.b_t[0] - cb.b_t[0]) < 1e-12);
  }

  // genuinely non-normal generator: check the covariance solve against a
  // direct quadrature of S(r) Q S(r)^T
  Mat A(2, 2);
  A << -1.0, 0.6, 0.0, -2.0;
  auto sg2 = SemigroupSpec::matrix(A);
  LevyTriple g2;
  g2.b = Vec::Zero(2);
  g2.Q = Mat::Identity(2, 2);
  g2.nu = LevyMeasureSpec::zero();
  const double t = 0.9;
  auto ch = characteristics_t(g2, sg2, t);
  Mat ref = gl_doubling([&](double r) { return Mat(sg2.S(r) * g2.Q * sg2.S(r).transpose()); },
                        0.0, t, 1e-12, 1e-14);
  CHECK((ch.Q_t - ref).norm() < 1e-10);
}

TEST_CASE("levy: time characteristics with indicator correction") {
  // frozen: Q_t of the stable model is 1 - e^{-2t}
  auto sg = SemigroupSpec::diagonal(v1(1.0));
  auto ch = characteristics_t(stable_triple(), sg, 1.0);
  CHECK(ch.Q_t(0, 0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
  CHECK(ch.b_t.norm() < 1e-13);

  // atom at 3 with unit mass: the indicator flips at r* = ln 3, so
  // b_inf picks up int_{ln 3}^inf 3 e^{-r} dr = 1
  LevyTriple atom;
  atom.b = Vec::Zero(1);
  atom.Q = Mat::Zero(1, 1);
  atom.nu = LevyMeasureSpec::finite_atoms({{v1(3.0), 1.0}});
  auto chi = characteristics_t(atom, sg, kInf);
  CHECK(chi.b_t[0] == doctest::Approx(1.0).epsilon(1e-10));
  // finite horizon t=2 > ln 3: contribution 3(e^{-ln3} - e^{-2})
  auto ch2 = characteristics_t(atom, sg, 2.0);
  CHECK(ch2.b_t[0] == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-10));
  // before the crossing: no correction
  auto ch3 = characteristics_t(atom, sg, 0.5);
  CHECK(std::abs(ch3.b_t[0]) < 1e-12);
}

TEST_CASE("levy: jump time integrals") {
  auto sg = SemigroupSpec::diagonal(v1(1.0));
  // stable alpha=1: int min(1,y^2) dnu_inf = (1/(alpha beta)) * 2c(1 + 1) = 4/pi
  auto e = jump_time_integral(stable_triple(), sg, kInf,
                              [](const Vec& y) { return std::min(1.0, y.squaredNorm()); });
  CHECK(e.value == doctest::Approx(4.0 / pi).epsilon(1e-7));

  // atom at 2, mass 0.3, g = y^2: int_0^inf 0.3 * 4 e^{-2r} dr = 0.6
  LevyTriple atom;
  atom.b = Vec::Zero(1);
  atom.Q = Mat::Zero(1, 1);
  atom.nu = LevyMeasureSpec::finite_atoms({{v1(2.0), 0.3}});
  auto e2 = jump_time_integral(atom, sg, kInf, [](const Vec& y) { return y.squaredNorm(); });
  CHECK(e2.value == doctest::Approx(0.6).epsilon(1e-8));

  // finite horizon
  auto e3 = jump_time_integral(atom, sg, 1.0, [](const Vec& y) { return y.squaredNorm(); });
  CHECK(e3.value == doctest::Approx(0.6 * (1.0 - std::exp(-2.0))).epsilon(1e-8));
}

TEST_CASE("levy: stability hypotheses report") {
  auto sg = SemigroupSpec::diagonal(v1(1.0));
  auto rep = check_hypotheses_FR(stable_triple(), sg);
  CHECK(rep.all());
  CHECK(rep.log_moment_finite);
  CHECK(rep.trace_q_inf == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.nu_inf_integral == doctest::Approx(4.0 / pi).epsilon(1e-6));

  // zero decay rate: semigroup does not vanish, variance diverges
  auto flat = SemigroupSpec::diagonal(v1(0.0));
  LevyTriple pure_gauss;
  pure_gauss.b = Vec::Zero(1);
  pure_gauss.Q = Mat::Constant(1, 1, 2.0);
  pure_gauss.nu = LevyMeasureSpec::zero();
  auto rep2 = check_hypotheses_FR(pure_gauss, flat);
  CHECK(!rep2.semigroup_vanishes);
  CHECK(!rep2.trace_bounded);
  CHECK(!rep2.all());
  CHECK_THROWS_AS(invariant_factorization(pure_gauss, flat), NumericError);
}

TEST_CASE("levy: cameron-martin norms") {
  // frozen: diag(1/2, 1/4) against covariance diag(1, 4) has norm 1/2
  Mat T(2, 2), Q(2, 2);
  T << 0.5, 0.0, 0.0, 0.25;
  Q << 1.0, 0.0, 0.0, 4.0;
  CHECK(cameron_martin_norm(T, Q) == doctest::Approx(0.5).epsilon(1e-14));

  // rank-deficient covariance with an invariant operator
  Mat Q2(2, 2), T2(2, 2);
  Q2 << 1.0, 0.0, 0.0, 0.0;
  T2 << 0.3, 0.0, 0.0, 0.9;
  CHECK(cameron_martin_norm(T2, Q2) == doctest::Approx(0.3).epsilon(1e-12));

  // operator leaking out of the space is rejected
  Mat T3(2, 2);
  T3 << 0.0, 0.0, 1.0, 0.0;
  CHECK_THROWS_AS(cameron_martin_norm(T3, Q2), NumericError);
}

TEST_CASE("levy: admissible exponent and decay rate") {
  // frozen: p=2 with norm e^{-1} gives 1 + e^2
  CHECK(admissible_q(2.0, std::exp(-1.0)) ==
        doctest::Approx(8.389056098930650).epsilon(1e-13));
  CHECK_THROWS_AS(admissible_q(1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(admissible_q(2.0, 1.5), ConfigError);

  Vec rates(2);
  rates << 0.7, 1.2;
  auto sg = SemigroupSpec::diagonal(rates);
  Mat Qinf = Mat::Identity(2, 2);
  CHECK(q0_rate(sg, Qinf) == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(q0_rate(sg, Qinf, true) == doctest::Approx(1.4).epsilon(1e-5));

  // frozen: scalar rate 1 gives q0 = 2, numerically as well
  auto sg1 = SemigroupSpec::diagonal(v1(1.0));
  CHECK(q0_rate(sg1, Mat::Identity(1, 1)) == 2.0);
  CHECK(q0_rate(sg1, Mat::Identity(1, 1), true) == doctest::Approx(2.0).epsilon(1e-5));

  // matrix generator falls back to the dyadic estimator
  Mat A(2, 2);
  A << -1.0, 0.5, 0.0, -3.0;
  auto sgm = SemigroupSpec::matrix(A);
  // invariant covariance of the OU process with Q = I
  LevyTriple g;
  g.b = Vec::Zero(2);
  g.Q = Mat::Identity(2, 2);
  g.nu = LevyMeasureSpec::zero();
  Mat Qi = characteristics_t(g, sgm, kInf).Q_t;
  const double q0 = q0_rate(sgm, Qi, true);
  CHECK(q0 > 0.0);
  CHECK(q0 < 6.1);
}

TEST_CASE("levy: validation catches bad specifications") {
  LevyTriple t = stable_triple();
  CHECK_NOTHROW(t.validate());
  t.nu = LevyMeasureSpec::symmetric_stable(1.999, 1.0);  // at the cap: rejected
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t.nu = LevyMeasureSpec::symmetric_stable(1.9985, 1.0);
  CHECK_NOTHROW(t.validate());
  t.nu = LevyMeasureSpec::symmetric_stable(-0.5, 1.0);
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t.nu = LevyMeasureSpec::finite_atoms({{v1(1.0), -2.0}});
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t.nu = LevyMeasureSpec::compound_poisson_laplace(-1.0, 1.0);
  CHECK_THROWS_AS(t.validate(), ConfigError);

  Mat asym(1, 1);
  LevyTriple bad;
  bad.b = Vec::Zero(2);
  bad.Q = Mat::Zero(2, 2);
  bad.Q(0, 1) = 1.0;  // not symmetric
  bad.nu = LevyMeasureSpec::zero();
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK_THROWS_AS(SemigroupSpec::diagonal(v1(-1.0)), ConfigError);
  CHECK_THROWS_AS(SemigroupSpec::matrix(Mat::Zero(2, 2)), ConfigError);
  CHECK_NOTHROW(SemigroupSpec::diagonal(v1(0.0)));  // allowed; hypotheses fail later
}
