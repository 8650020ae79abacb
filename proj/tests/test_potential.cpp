#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "discospec/errors.hpp"
#include "discospec/grid.hpp"
#include "discospec/potential.hpp"
#include "discospec/problem.hpp"

using namespace discospec;

TEST_CASE("evaluation") {
  CHECK(eval_potential(Potential(), 0.3) == 0.0);
  CHECK(eval_potential(Potential::constant(1.0), 0.75) == 1.0);
  const double c[] = {0.0, 2.0};
  CHECK(eval_potential(Potential::polynomial(c), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(eval_potential(Potential(), 1.0001), DomainError);
  CHECK_THROWS_AS(eval_potential(Potential(), -1e-9), DomainError);
}

TEST_CASE("left-piece convention at breakpoints") {
  const double e[] = {0.0, 0.3, 1.0};
  const double v[] = {5.0, 7.0};
  const auto q = Potential::piecewise_constant(e, v);
  CHECK(q(0.3) == 5.0);
  CHECK(q(0.3000001) == 7.0);
  CHECK(q(0.0) == 5.0);
  CHECK(q(1.0) == 7.0);
}

TEST_CASE("integration") {
  CHECK(integrate_potential(Potential::constant(1.0), 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(integrate_potential(Potential(), 0.2, 0.9) == 0.0);
  const double c[] = {0.0, 2.0};
  CHECK(integrate_potential(Potential::polynomial(c), 0.5, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(integrate_potential(Potential(), 0.6, 0.4), DomainError);
  CHECK_THROWS_AS(integrate_potential(Potential(), -0.1, 0.4), DomainError);
}

TEST_CASE("one half is always a breakpoint") {
  const double c[] = {1.0, -2.0, 3.0, 0.5};
  const auto q = Potential::polynomial(c);
  const auto br = q.breakpoints();
  CHECK(std::find(br.begin(), br.end(), 0.5) != br.end());
  // Splitting preserves values on both sides.
  for (double x : {0.1, 0.49, 0.5, 0.51, 0.9}) {
    const double ref = ((0.5 * x + 3.0) * x - 2.0) * x + 1.0;
    CHECK(q(x) == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Potential({Piece{0.0, 0.4, {}}, Piece{0.5, 1.0, {}}}), DomainError);
  CHECK_THROWS_AS(Potential({Piece{0.0, 0.6, {}}, Piece{0.5, 1.0, {}}}), DomainError);
  CHECK_THROWS_AS(Potential({Piece{0.1, 1.0, {}}}), DomainError);
  CHECK_THROWS_AS(Potential({Piece{0.0, 1.0, {NAN, 0, 0, 0}}}), DomainError);
}

TEST_CASE("property: additivity and partition length") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0), x(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> edges{0.0, 1.0};
    for (int i = 0; i < 5; ++i) edges.push_back(x(rng));
    std::sort(edges.begin(), edges.end());
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (edges[i + 1] > edges[i]) pieces.push_back({edges[i], edges[i + 1], {u(rng), u(rng), u(rng), u(rng)}});
    const Potential q(pieces);
    double len = 0.0;
    for (const auto& p : q.pieces()) len += p.x1 - p.x0;
    CHECK(std::abs(len - 1.0) <= 4e-16);
    double pts[3] = {x(rng), x(rng), x(rng)};
    std::sort(pts, pts + 3);
    const double whole = q.integrate(pts[0], pts[2]);
    const double parts = q.integrate(pts[0], pts[1]) + q.integrate(pts[1], pts[2]);
    const double scale = std::abs(q.integrate(pts[0], pts[1])) + std::abs(q.integrate(pts[1], pts[2]));
    CHECK(std::abs(whole - parts) <= 1e-14 * std::max(scale, 1e-300) + 1e-300);
    for (int k = 0; k < 10; ++k) CHECK(std::isfinite(q(x(rng))));
  }
}

TEST_CASE("projection and head replacement") {
  const double c[] = {0.0, 2.0};
  const auto q = Potential::polynomial(c);
  const double e[] = {0.0, 0.25, 0.5, 1.0};
  const auto p = Potential::projected(q, e);
  CHECK(p(0.1) == doctest::Approx(0.25));
  CHECK(p(0.7) == doctest::Approx(1.5));
  const double he[] = {0.0, 0.5};
  const double hv[] = {9.0};
  const auto w = q.with_head(he, hv);
  CHECK(w(0.2) == 9.0);
  CHECK(w(0.8) == doctest::Approx(1.6));
  CHECK(w.l2_distance(q, 0.5, 1.0) == 0.0);
  CHECK(Potential::constant(1.0).l2_distance(Potential(), 0.0, 0.25) == doctest::Approx(0.5));
}

TEST_CASE("transmission and problem validation") {
  CHECK_THROWS_AS(Transmission(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Transmission(-1.0, 1.0), DomainError);
  for (double a1 : {0.3, 1.0, 2.0, 7.5}) {
    const auto m = Transmission(a1, 0.4).matrix();
    CHECK(std::abs(m[0] * m[3] - m[1] * m[2] - 1.0) <= 1e-15);
  }
  ProblemSpec p;
  p.h = NAN;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.h = 0.0;
  p.right = Robin{INFINITY};
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("cell grid keeps breakpoints and 1/2") {
  const double e[] = {0.0, 0.3, 0.55, 1.0};
  const double v[] = {1.0, 2.0, 3.0};
  const auto q = Potential::piecewise_constant(e, v);
  const auto g = CellGrid::build(q, 16);
  CHECK(g.edges.front() == 0.0);
  CHECK(g.edges.back() == 1.0);
  CHECK(g.edges[g.jump_cell] == 0.5);
  CHECK(std::find(g.edges.begin(), g.edges.end(), 0.3) != g.edges.end());
  double total = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i) total += g.qbar[i] * g.width[i];
  CHECK(total == doctest::Approx(q.integrate(0.0, 1.0)).epsilon(1e-14));
  CHECK(g.qmax == 3.0);
}
