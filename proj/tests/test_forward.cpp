#include <doctest.h>

#include <cmath>
#include <numbers>

#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "oracles.hpp"

using namespace discospec;
using std::numbers::pi;
using cplx = std::complex<double>;

TEST_CASE("free identity jump: cosine at pi^2") {
  const auto p = oracle::free_problem(0.0, Robin{0.0}, 1.0, 0.0);
  const auto s = propagate(p, pi * pi).value();
  CHECK(std::abs(s.y - cplx(-1.0)) < 1e-13);
  CHECK(std::abs(s.dy) < 1e-12);
}

TEST_CASE("jump state just right of 1/2 matches closed form") {
  const auto p = oracle::free_problem(0.0, Robin{0.0}, 2.0, 0.0);
  for (double k : {0.7, 3.0, 11.5}) {
    const auto s = propagate(p, k * k, {}, 0.5, JumpSide::Right).value();
    CHECK(std::abs(s.y - 2.0 * std::cos(k / 2)) < 1e-12 * (1 + k));
    CHECK(std::abs(s.dy - (-(k / 2) * std::sin(k / 2))) < 1e-12 * (1 + k));
  }
}

TEST_CASE("lambda = 0 linear solution") {
  const auto p = oracle::free_problem(1.0, Robin{0.0}, 1.0, 0.0);
  const auto s = propagate(p, 0.0).value();
  CHECK(std::abs(s.y - cplx(2.0)) < 1e-14);
  CHECK(std::abs(s.dy - cplx(1.0)) < 1e-14);
}

TEST_CASE("non-finite lambda is a domain error") {
  const auto p = oracle::free_problem(0.0, Robin{0.0}, 1.0, 0.0);
  CHECK_THROWS_AS(propagate(p, cplx(NAN, 0)), DomainError);
  CHECK_THROWS_AS(propagate(p, 1.0, {}, 1.5), DomainError);
}

TEST_CASE("characteristic closed forms") {
  const auto rob = oracle::free_problem(0.0, Robin{0.0}, 2.0, 0.0);
  const auto dir = oracle::free_problem(0.0, Dirichlet{}, 2.0, 0.0);
  for (double k : {0.3, 1.7, 4.2, 20.0}) {
    const cplx d = characteristic(rob, k * k);
    CHECK(std::abs(d - cplx(-1.25 * k * std::sin(k))) < 1e-11 * (1 + k));
    const double c = std::cos(k / 2), s = std::sin(k / 2);
    CHECK(std::abs(characteristic(dir, k * k) - cplx(2 * c * c - 0.5 * s * s)) < 1e-12);
  }
  const auto n1 = oracle::free_problem(0.0, Dirichlet{}, 1.0, 0.0);
  CHECK(std::abs(characteristic(n1, pi * pi / 4)) < 1e-14);
}

TEST_CASE("closed-form spectra") {
  const auto jump = oracle::free_problem(0.0, Robin{0.0}, 2.0, 0.0);
  const auto s = eigenvalues(jump, 3);
  CHECK(s.values[0].lambda == doctest::Approx(0.0).epsilon(1e-12));
  for (int n = 1; n <= 3; ++n) CHECK(s.values[n].lambda == doctest::Approx(n * n * pi * pi).epsilon(1e-12));

  const auto dir = eigenvalues(oracle::free_problem(0.0, Dirichlet{}, 2.0, 0.0), 1);
  CHECK(std::sqrt(dir.values[0].lambda) == doctest::Approx(2.2142974355881813).epsilon(1e-12));
  CHECK(std::sqrt(dir.values[1].lambda) == doctest::Approx(4.0688878715914053).epsilon(1e-12));

  const auto nd = eigenvalues(oracle::free_problem(0.0, Dirichlet{}, 1.0, 0.0), 2);
  for (int n = 0; n <= 2; ++n)
    CHECK(nd.values[n].lambda == doctest::Approx((n + 0.5) * (n + 0.5) * pi * pi).epsilon(1e-12));
}

TEST_CASE("transfer matrix is unimodular") {
  const auto p = oracle::smooth_problem(0.3, Robin{-0.2}, 2.0, 1.0);
  for (cplx lam : {cplx(5.0), cplx(-30.0, 4.0), cplx(400.0, -50.0)}) {
    for (double x : {0.25, 0.5, 0.8, 1.0}) {
      const auto m = transfer_matrix(p, lam, {}, x);
      const cplx det = m[0] * m[3] - m[1] * m[2];
      CHECK(std::abs(det - 1.0) < 1e-12 * (std::abs(m[0] * m[3]) + std::abs(m[1] * m[2])));
    }
  }
}

TEST_CASE("piecewise-constant potential: cell refinement leaves the state unchanged") {
  const double edges[] = {0.0, 0.25, 0.5, 0.625, 1.0};
  const double vals[] = {3.0, -1.0, 2.0, 0.5};
  ProblemSpec p = oracle::free_problem(0.4, Robin{0.7}, 1.5, -0.3);
  p.q = Potential::piecewise_constant(edges, vals);
  for (cplx lam : {cplx(17.0), cplx(300.0, 20.0)}) {
    const auto a = propagate(p, lam, {64}).value();
    const auto b = propagate(p, lam, {128}).value();
    CHECK(std::abs(a.y - b.y) <= 1e-13 * (std::abs(a.y) + std::abs(a.dy)));
    CHECK(std::abs(a.dy - b.dy) <= 1e-13 * (std::abs(a.y) + std::abs(a.dy)) * (1 + std::sqrt(std::abs(lam))));
  }
}

TEST_CASE("eigenvalues are roots and the phase count is exact") {
  const auto p = oracle::smooth_problem(0.3, Robin{-0.2}, 2.0, 1.0);
  const auto s = eigenvalues(p, 30);
  const RealEvaluator ev(p, PropagatorConfig{});
  for (const auto& v : s.values) {
    const double gap = v.n == 0 ? 1.0 : v.lambda - s.values[v.n - 1].lambda;
    CHECK(ev.evaluate(v.lambda - 1e-6 * gap).count == v.n);
    CHECK(ev.evaluate(v.lambda + 1e-6 * gap).count == v.n + 1);
  }
}

TEST_CASE("negative eigenvalue for a large Robin coefficient") {
  const auto p = oracle::free_problem(-6.0, Robin{0.0}, 1.0, 0.0);
  const auto s = eigenvalues(p, 2);
  CHECK(s.values[0].lambda < -30.0);
  CHECK(std::abs(characteristic(p, s.values[0].lambda)) < 1e-6);
}

TEST_CASE("B and B_inf spectra interlace") {
  const auto b = oracle::smooth_problem(0.3, Robin{-0.2}, 2.0, 1.0);
  auto binf = b;
  binf.right = Dirichlet{};
  const auto l = eigenvalues(b, 50).lambdas();
  const auto m = eigenvalues(binf, 50).lambdas();
  for (std::size_t n = 0; n + 1 < l.size(); ++n) {
    CHECK(l[n] < m[n]);
    CHECK(m[n] < l[n + 1]);
  }
}

TEST_CASE("Wronskian of two problems") {
  const auto b = oracle::smooth_problem(0.3, Robin{-0.2}, 2.0, 1.0);
  CHECK(std::abs(g_wronskian(b, b, 3.3)) == 0.0);
  const auto p = oracle::free_problem(0.5, Robin{0.0}, 1.0, 0.0);
  const auto pt = oracle::free_problem(1.25, Robin{0.0}, 1.0, 0.0);
  CHECK(std::abs(g_wronskian(p, pt, 0.0) - cplx(0.75)) < 1e-14);
  auto other = b;
  other.jump = Transmission(1.5, 1.0);
  CHECK_THROWS_AS(g_wronskian(b, other, 1.0), ContractError);
}

TEST_CASE("count is right when y(1) underflows against y'(1)") {
  // At k = pi/2 the free solution cos(kx) vanishes at x = 1 up to rounding.
  const auto p = oracle::free_problem(0.0, Robin{0.0}, 1.0, 0.0);
  const double l = (pi / 2) * (pi / 2);
  CHECK(count_below(p, l) == 1);
  CHECK(count_below(p, std::nextafter(l, 0.0)) == 1);
  const auto s = eigenvalues(p, 6);
  CHECK(std::abs(s.values[0].lambda) < 1e-12);
  for (int n = 1; n <= 6; ++n) CHECK(s.values[n].lambda == doctest::Approx(n * n * pi * pi).epsilon(1e-12));
}
