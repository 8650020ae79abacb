#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "discospec/asymptotics.hpp"
#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "oracles.hpp"

using namespace discospec;
using std::numbers::pi;

TEST_CASE("constants: a from a1") {
  const auto c = constants(oracle::free_problem(0.0, Robin{0.0}, 2.0, 0.0));
  CHECK(c.a == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("constants: q = 1 worked example") {
  auto p = oracle::free_problem(0.3, Robin{-0.2}, 2.0, 1.0);
  p.q = Potential::constant(1.0);
  const auto c = constants(p);
  CHECK(c.omega0 == doctest::Approx(1.2).epsilon(1e-14));
  REQUIRE(c.omega);
  REQUIRE(c.omega1);
  CHECK(*c.omega == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*c.omega1 == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(*c.omega - c.omega0 == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("constants: free problem vanishes") {
  const auto c = constants(oracle::free_problem(0.0, Robin{0.0}, 1.0, 0.0));
  CHECK(c.a == 0.0);
  CHECK(c.omega0 == 0.0);
  CHECK(*c.omega == 0.0);
  CHECK(*c.omega1 == 0.0);
}

TEST_CASE("constants: Dirichlet has no omega") {
  const auto c = constants(oracle::free_problem(0.1, Dirichlet{}, 1.5, 0.2));
  CHECK_FALSE(c.omega);
  CHECK_FALSE(c.omega1);
}

TEST_CASE("predictions") {
  AsymptoticConstants zero;
  zero.omega = 0.0;
  zero.omega1 = 0.0;
  CHECK(predict_sqrt(Family::BType, zero, 7) == doctest::Approx(7 * pi).epsilon(1e-15));

  AsymptoticConstants d;
  d.a = 0.6;
  CHECK(predict_sqrt(Family::BInfType, d, 0) == doctest::Approx(2.2142975).epsilon(1e-7));
  CHECK(predict_sqrt(Family::BInfType, d, 0) == doctest::Approx(pi / 2 + std::asin(0.6)).epsilon(1e-15));

  AsymptoticConstants c;
  c.omega = 1.0;
  c.omega1 = 0.1;
  CHECK(predict_sqrt(Family::BType, c, 4) == doctest::Approx(4 * pi + 1.1 / (4 * pi)).epsilon(1e-15));
}

TEST_CASE("gamma alternation identity") {
  for (double a : {-0.9, -0.3, 0.0, 0.6, 0.95})
    for (int n = 0; n < 40; ++n) {
      const double expect = pi - 2.0 * (n % 2 == 0 ? 1.0 : -1.0) * std::asin(a);
      CHECK(gamma_n(a, n + 1) - gamma_n(a, n) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("adding a constant to q shifts omega0 by c/2 and keeps omega1") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    auto p = oracle::smooth_problem(u(rng), Robin{u(rng)}, 0.2 + std::abs(u(rng)), u(rng));
    const double c = u(rng);
    auto shifted = p;
    std::vector<Piece> pieces = p.q.pieces();
    for (auto& pc : pieces) pc.coeffs[0] += c;
    shifted.q = Potential(pieces);
    const auto c0 = constants(p), c1 = constants(shifted);
    CHECK(c1.omega0 - c0.omega0 == doctest::Approx(c / 2).epsilon(1e-12));
    CHECK(std::abs(*c1.omega1 - *c0.omega1) < 1e-12);
  }
}

TEST_CASE("residuals vanish on exact spectra") {
  const auto b = eigenvalues(oracle::free_problem(0.0, Robin{0.0}, 2.0, 0.0), 30);
  auto c = constants(b.problem);
  c.omega = 0.0;
  c.omega1 = 0.0;
  for (const auto& [n, r] : residuals(b, c).residuals) CHECK(std::abs(r) < 1e-9 * n);

  const auto d = eigenvalues(oracle::free_problem(0.0, Dirichlet{}, 1.0, 0.0), 30);
  for (const auto& [n, r] : residuals(d, constants(d.problem)).residuals) CHECK(std::abs(r) < 1e-9 * n);
}

TEST_CASE("short spectra are rejected") {
  const auto s = eigenvalues(oracle::free_problem(0.0, Robin{0.0}, 1.0, 0.0), 6);
  CHECK_THROWS_AS(residuals(s, constants(s.problem)), InsufficientData);
}

TEST_CASE("residuals small at high index for a smooth potential") {
  auto p = oracle::free_problem(0.2, Robin{0.1}, 1.5, 0.5);
  p.q = oracle::smooth_q(1.0, 0.0);
  const auto s = eigenvalues(p, 100);
  const auto rep = residuals(s, constants(p));
  double worst = 0.0;
  for (const auto& [n, r] : rep.residuals)
    if (n >= 50) worst = std::max(worst, std::abs(r));
  CHECK(worst < 0.02);
  CHECK(rep.max_abs_last_quartile <= worst);

  // Even and odd tails of n (sqrt(lambda_n) - n pi) sit 2 omega1 / pi apart.
  const double expect = 2.0 * *constants(p).omega1 / pi;
  CHECK(std::abs(parity_limits(s, 50).difference() - expect) < 0.1 * std::abs(expect));
}

TEST_CASE("signed root") {
  CHECK(signed_sqrt(4.0) == 2.0);
  CHECK(signed_sqrt(-9.0) == -3.0);
}
