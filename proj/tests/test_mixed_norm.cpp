#include <doctest.h>

#include <cmath>

#include "gms/mehler.hpp"
#include "gms/mixed_norm.hpp"
#include "gms/test_fn.hpp"
#include "gms/toml.hpp"

using namespace gms;

namespace {

const char* kM1 = R"(
[model]
name = "m1"
dim = 1
semigroup = "diagonal"
rates = [1.0]

[noise]
Q = [[2.0]]
kind = "stable"
alpha = 1.0
scale = 1.0
)";

const Factorization& m1_fac() {
  static MehlerModel m(ModelSpec::from_doc(toml::parse(kM1), "m1"));
  static Factorization fac = factorization_of(m);
  return fac;
}

std::vector<SmoothTestFn> small_battery() {
  std::vector<SmoothTestFn> fs;
  fs.push_back(fn_gaussian_bump(0.0, 0.7071067811865476));
  fs.push_back(fn_gaussian_bump(-1.5, 1.2));
  fs.push_back(fn_cosine(1.0));
  fs.push_back(fn_cosine(0.4));
  fs.push_back(fn_power(-1.0, 0.5));
  fs.push_back(fn_power(-0.5, 1.0));
  return fs;
}

}  // namespace

TEST_CASE("constant functions collapse to |c| under every exponent pair") {
  const auto& fac = m1_fac();
  for (double c : {1.0, -2.5}) {
    auto f = [c](double) { return c; };
    CHECK(mixed_norm(f, fac, {2.0, 4.0}).value == doctest::Approx(std::abs(c)).epsilon(1e-8));
    CHECK(mixed_norm(f, fac, {1.0, 3.0}).value == doctest::Approx(std::abs(c)).epsilon(1e-8));
    CHECK(lr_norm(f, fac, 2.0).value == doctest::Approx(std::abs(c)).epsilon(1e-8));
    CHECK(lr_norm(f, fac, 4.0).value == doctest::Approx(std::abs(c)).epsilon(1e-8));
  }
}

TEST_CASE("nested double integral reproduces the convolved norm exactly") {
  const auto& fac = m1_fac();
  for (const auto& f : small_battery()) {
    for (double r : {2.0, 3.0}) {
      auto rep = lift_norm_identity(f.value, fac, r);
      CHECK(rep.verdict == Verdict::Pass);
      const double gap = std::abs(rep.lhs - rep.rhs) / std::max(rep.lhs, 1e-300);
      CHECK(gap < 1e-8);
    }
  }
}

TEST_CASE("inclusion chain holds with positive margins on the battery") {
  const auto& fac = m1_fac();
  for (const auto& f : small_battery()) {
    auto reps = check_inclusion_chain(f.value, fac, 2.0, 4.0);
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) {
      CHECK(r.verdict == Verdict::Pass);
      CHECK(r.margin() >= -3.0 * (r.lhs_error + r.rhs_error));
    }
    CHECK(reps[0].scenario == "inclusion-upper");
    CHECK(reps[1].scenario == "inclusion-lower");
  }
  CHECK_THROWS_AS(check_inclusion_chain([](double) { return 1.0; }, fac, 4.0, 2.0), ConfigError);
}

TEST_CASE("equal exponents reduce the mixed norm to the convolved Lebesgue norm") {
  const auto& fac = m1_fac();
  for (const auto& f : small_battery()) {
    for (double r : {1.0, 2.0, 4.0}) {
      const double a = mixed_norm(f.value, fac, {r, r}).value;
      const double b = lr_norm(f.value, fac, r).value;
      CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
  }
}

TEST_CASE("outer exponent monotonicity and homogeneity") {
  const auto& fac = m1_fac();
  for (const auto& f : small_battery()) {
    const double n22 = mixed_norm(f.value, fac, {2.0, 2.0}).value;
    const double n23 = mixed_norm(f.value, fac, {2.0, 3.0}).value;
    const double n24 = mixed_norm(f.value, fac, {2.0, 4.0}).value;
    CHECK(n22 <= n23 * (1.0 + 1e-9));
    CHECK(n23 <= n24 * (1.0 + 1e-9));

    auto scaled = [&](double x) { return -3.5 * f.value(x); };
    CHECK(std::abs(mixed_norm(scaled, fac, {2.0, 4.0}).value - 3.5 * n24) <= 1e-10 * (1.0 + n24));
  }
}

TEST_CASE("triangle inequality on battery pairs") {
  const auto& fac = m1_fac();
  auto fs = small_battery();
  for (std::size_t i = 0; i + 1 < fs.size(); i += 2) {
    auto sum = [&](double x) { return fs[i].value(x) + fs[i + 1].value(x); };
    const auto ns = mixed_norm(sum, fac, {2.0, 4.0});
    const auto na = mixed_norm(fs[i].value, fac, {2.0, 4.0});
    const auto nb = mixed_norm(fs[i + 1].value, fac, {2.0, 4.0});
    CHECK(ns.value <= na.value + nb.value + 3.0 * (ns.error + na.error + nb.error) + 1e-12);
  }
}

TEST_CASE("near-point outer measure recovers the inner Lebesgue norm") {
  const auto& fac = m1_fac();
  // narrow gaussian outer factor on the same lattice spacing
  const std::size_t n = 256;
  const double L = 2.0;
  REQUIRE(2.0 * L / double(n) == doctest::Approx(fac.dx).epsilon(1e-12));
  std::vector<double> rho(n);
  const double sigma = 0.02;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = -L + 2.0 * L * double(i) / double(n);
    rho[i] = std::exp(-0.5 * y * y / (sigma * sigma));
  }
  auto pi = std::make_shared<GridMeasure>(L, std::move(rho));
  auto fd = make_factorization(fac.gamma, pi);

  auto f = fn_gaussian_bump(0.3, 1.0);
  // direct inner norm against the gamma lattice pmf
  double direct = 0.0;
  for (std::size_t j = 0; j < fd.gamma_w.size(); ++j) {
    const double x = fd.gamma_x0 + double(j) * fd.dx;
    direct += fd.gamma_w[j] * f.value(x) * f.value(x);
  }
  direct = std::sqrt(direct);
  CHECK(mixed_norm(f.value, fd, {2.0, 4.0}).value == doctest::Approx(direct).epsilon(5e-3));
}

TEST_CASE("degenerate jump factor collapses onto the gaussian lattice") {
  const char* doc = R"(
[model]
name = "gauss"
dim = 1
semigroup = "diagonal"
rates = [1.0]

[noise]
Q = [[2.0]]
kind = "none"
)";
  MehlerModel m(ModelSpec::from_doc(toml::parse(doc), "gauss"));
  REQUIRE(m.pi_is_point());
  auto fac = factorization_of(m);
  CHECK(fac.pi_point.has_value());
  auto f = fn_gaussian_bump(0.0, 1.0);
  const double a = mixed_norm(f.value, fac, {2.0, 4.0}).value;
  const double b = lr_norm(f.value, fac, 2.0).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("monte carlo estimate agrees with the grid within its own error bar") {
  const auto& fac = m1_fac();
  auto f = fn_gaussian_bump(0.0, 0.7071067811865476);
  const auto g = mixed_norm(f.value, fac, {2.0, 4.0});
  const auto mc = mixed_norm(f.value, fac, {2.0, 4.0}, NormMethod::Mc, {200000, 7});
  CHECK(std::abs(mc.value - g.value) <= std::max(5.0 * mc.error, 0.03));
  // deterministic: same seed, same value
  const auto mc2 = mixed_norm(f.value, fac, {2.0, 4.0}, NormMethod::Mc, {200000, 7});
  CHECK(mc.value == mc2.value);
}

TEST_CASE("inner divergence is flagged as non-membership with a witness") {
  const auto& fac = m1_fac();
  auto f = [](double x) { return std::pow(std::abs(x), -0.9); };
  const auto g = mixed_norm(f, fac, {2.0, 4.0});
  CHECK_FALSE(g.in_space);
  CHECK(std::abs(g.witness_y) < 1.0);
  CHECK_FALSE(lr_norm(f, fac, 4.0).in_space);
}

TEST_CASE("heavy tail family normalizes to unit mass") {
  auto g = heavy_tail_pi(1.5, 2048.0, 1 << 16);
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.mass_defect() < 0.02);  // truncated algebraic tail
  CHECK(g.density_at(0.0) > g.density_at(10.0));
  CHECK_THROWS_AS(heavy_tail_pi(1.0, 100.0, 1024), ConfigError);
  CHECK_THROWS_AS(heavy_tail_pi(3.0, 100.0, 1024), ConfigError);
}

TEST_CASE("singular witness grows at the predicted decade rate") {
  WitnessSpec w;
  w.kind = WitnessSpec::Kind::Singular;
  w.levels = 4;
  auto rows = strictness_witness(w);
  REQUIRE(rows.size() == 4);
  // level-1 values pinned against 15-digit reference quadrature
  CHECK(rows[0].lq_norm == doctest::Approx(621.138671261).epsilon(1e-4));
  CHECK(rows[0].xpq_norm == doctest::Approx(2.27668152567).epsilon(1e-4));
  CHECK(rows[1].lq_norm == doctest::Approx(984.438451657).epsilon(1e-4));
  const double decade = std::pow(10.0, 0.2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].ratio == doctest::Approx(decade).epsilon(2e-3));
    CHECK(rows[i].ratio >= 1.4);
  }
  // the mixed norm stays put while the Lebesgue norm explodes
  const double drift = rows[3].xpq_norm / rows[2].xpq_norm - 1.0;
  CHECK(std::abs(drift) < 0.02);
}

TEST_CASE("polynomial witness grows at the predicted decade rate") {
  WitnessSpec w;
  w.kind = WitnessSpec::Kind::Polynomial;
  w.levels = 4;
  auto rows = strictness_witness(w);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].lq_norm == doctest::Approx(1.9234869431).epsilon(1e-4));
  CHECK(rows[0].xpq_norm == doctest::Approx(5.12407021956).epsilon(1e-4));
  const double decade = std::pow(10.0, 0.075);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].ratio == doctest::Approx(decade).epsilon(2e-3));
    CHECK(rows[i].ratio >= 1.15);
    // the Lebesgue column converges: shrinking per-decade increments
    const double step = rows[i].lq_norm / rows[i - 1].lq_norm - 1.0;
    CHECK(step >= 0.0);
    CHECK(step < 0.02);
  }
}

TEST_CASE("witness with exponent zero is flat") {
  WitnessSpec w;
  w.kind = WitnessSpec::Kind::Singular;
  w.beta = 0.0;
  w.levels = 3;
  auto rows = strictness_witness(w);
  for (const auto& r : rows) {
    CHECK(r.lq_norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.xpq_norm == doctest::Approx(1.0).epsilon(1e-6));
    if (r.level > 1) CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("witness parameters outside the admissible window are rejected") {
  WitnessSpec w;
  w.kind = WitnessSpec::Kind::Singular;
  w.beta = 0.5;  // = 1/p: no longer p-integrable anywhere
  CHECK_THROWS_AS(strictness_witness(w), ConfigError);
  w.beta = -0.1;
  CHECK_THROWS_AS(strictness_witness(w), ConfigError);

  WitnessSpec v;
  v.kind = WitnessSpec::Kind::Polynomial;
  v.omega = 0.25;  // = (alpha-1)/p
  CHECK_THROWS_AS(strictness_witness(v), ConfigError);
  v.omega = 0.2;
  v.alpha = 3.5;
  CHECK_THROWS_AS(strictness_witness(v), ConfigError);
  v.alpha = 1.5;
  v.levels = 0;
  CHECK_THROWS_AS(strictness_witness(v), ConfigError);
}
