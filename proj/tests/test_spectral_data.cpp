#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "discospec/spectral_data.hpp"
#include "oracles.hpp"

using namespace discospec;
using std::numbers::pi;

namespace {

// Closed-form spectrum {(n pi)^2} of the free problem, no solver involved.
Spectrum lattice_spectrum(int n_max, bool dirichlet = false, double a = 0.0) {
  Spectrum s;
  s.problem = oracle::free_problem(0.0, Robin{0.0}, 1.0, 0.0);
  if (dirichlet) s.problem.right = Dirichlet{};
  for (int n = 0; n <= n_max; ++n) {
    const double k = dirichlet ? (n + 0.5) * pi + (n % 2 == 0 ? 1 : -1) * std::asin(a) : n * pi;
    s.values.push_back({n, k * k, 0.0});
  }
  return s;
}

std::vector<int> stride(int from, int to, int step) {
  std::vector<int> v;
  for (int i = from; i <= to; i += step) v.push_back(i);
  return v;
}

std::vector<double> r_grid(double top, int points = 40) {
  std::vector<double> g;
  for (int i = 1; i <= points; ++i) g.push_back(top * i / points);
  return g;
}

}  // namespace

TEST_CASE("counting function") {
  const auto s = lattice_spectrum(20).lambdas();
  CHECK(counting(s, 10.0) == 4);
  CHECK(counting(std::vector<double>{}, 3.0) == 0);
  CHECK(counting(std::vector<double>{-1.0, 0.0, 5.0}, 1.0) == 2);
}

TEST_CASE("property: counting is monotone and additive over disjoint sets") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 500.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a, b;
    for (int i = 0; i < 30; ++i) a.push_back(u(rng));
    for (int i = 0; i < 25; ++i) b.push_back(u(rng));
    std::vector<double> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    long prev = 0;
    for (double r = 0.5; r < 25.0; r += 0.5) {
      const long c = counting(ab, r);
      CHECK(c >= prev);
      prev = c;
      CHECK(c == counting(a, r) + counting(b, r));
    }
  }
}

TEST_CASE("condition (I)") {
  const auto s = lattice_spectrum(40);
  auto all = check_condition_I(make_subset(s, stride(0, 40, 1)), 40);
  CHECK(all.verdict == Verdict::Pass);
  CHECK(all.stats["even"] == 21);
  CHECK(all.stats["odd"] == 20);
  auto evens = check_condition_I(make_subset(s, stride(0, 40, 2)), 40);
  CHECK(evens.verdict == Verdict::Indeterminate);
  CHECK(evens.stats["odd"] == 0);
  CHECK(!evens.notes.empty());
  auto idx = stride(0, 40, 2);
  idx.push_back(3);
  auto one = check_condition_I(make_subset(s, idx), 40);
  CHECK(one.verdict == Verdict::Indeterminate);
  CHECK(one.stats["odd"] == 1);
}

TEST_CASE("density condition") {
  const auto l1 = lattice_spectrum(200);
  const auto l2 = lattice_spectrum(200, true, 0.6);
  const auto grid = r_grid(190 * pi);
  const auto full1 = make_subset(l1, stride(0, 200, 1));
  const auto full2 = make_subset(l2, stride(0, 200, 1));
  auto r = check_density_i(full1, full2, l1, l2, 1.0, grid);
  CHECK(r.verdict == Verdict::Pass);
  for (auto [x, m] : r.margins) CHECK(m == 0.0);

  const SpectralSubset empty;
  const auto even1 = make_subset(l1, stride(0, 200, 2));
  auto f = check_density_i(even1, empty, l1, l2, 0.3, grid);
  CHECK(f.verdict == Verdict::Fail);
  CHECK(f.stats["sigma_star"] == doctest::Approx(0.25).epsilon(0.02));

  const auto even2 = make_subset(l2, stride(0, 200, 2));
  auto b = check_density_i(even1, even2, l1, l2, 0.5, grid);
  CHECK(std::abs(b.stats["slope"]) <= b.stats["eps_slope"]);
  CHECK(b.stats["sigma_star"] == doctest::Approx(0.5).epsilon(0.02));

  CHECK_THROWS_AS(check_density_i(full1, full2, l1, l2, 1.0, r_grid(100.0, 5)), InsufficientData);
}

TEST_CASE("summability condition") {
  // Eigenvalues with bounded deviation from the lattice: lambda_n = (n pi)^2 + 2.
  const auto p = oracle::smooth_problem(0.3, Robin{-0.2}, 1.2, 0.5);
  auto pd = p;
  pd.right = Dirichlet{};
  const auto l1 = eigenvalues(p, 200);
  const auto l2 = eigenvalues(pd, 200);
  const double a = (1.2 - 1 / 1.2) / (1.2 + 1 / 1.2);
  const auto s1 = make_subset(l1, stride(0, 200, 2));
  const auto s2 = make_subset(l2, stride(0, 200, 2));
  CHECK(check_summability_ii(s1, s2, 0.5, 0.5, 0.5, a).verdict == Verdict::Pass);
  const SpectralSubset empty;
  CHECK(check_summability_ii(make_subset(l1, stride(0, 200, 1)), empty, 1.0, 0.0, 0.5, a).verdict == Verdict::Pass);
  auto f = check_summability_ii(make_subset(l1, stride(0, 200, 3)), empty, 1.0, 0.0, 0.5, a);
  CHECK(f.verdict == Verdict::Fail);
  CHECK_THROWS_AS(check_summability_ii(s1, s2, 0.5, 0.4, 0.5, a), ContractError);
  CHECK_THROWS_AS(check_summability_ii(s1, s2, 1.0, 0.0, 0.5, a), ContractError);
}

TEST_CASE("property: enlarging a subset with sub-lattice picks never flips pass to fail") {
  std::mt19937_64 rng(5);
  const auto l1 = lattice_spectrum(120);
  for (int t = 0; t < 20; ++t) {
    // Values at or below the comparison lattice contribute nothing.
    std::vector<int> base = stride(0, 120, 1);
    auto s = make_subset(l1, base);
    const auto r0 = check_summability_ii(s, {}, 1.0, 0.0, 0.5, 0.0);
    std::uniform_int_distribution<int> pick(0, 120);
    std::vector<int> extra = base;
    for (int i = 0; i < 5; ++i) extra.push_back(pick(rng));
    const auto r1 = check_summability_ii(make_subset(l1, extra), {}, 1.0, 0.0, 0.5, 0.0);
    CHECK(r0.verdict == Verdict::Pass);
    CHECK(r1.verdict != Verdict::Fail);
  }
}

TEST_CASE("regular subsets") {
  const auto s = lattice_spectrum(30);
  auto one = generate_regular_subset(s, 1.0);
  CHECK(one.subset.picks.size() == 31);
  for (std::size_t i = 0; i < one.subset.picks.size(); ++i) CHECK(one.subset.picks[i].n == static_cast<int>(i));
  for (auto [n, e] : one.eps) CHECK(e == 0.0);
  auto half = generate_regular_subset(s, 0.5);
  for (std::size_t i = 0; i < half.subset.picks.size(); ++i) CHECK(half.subset.picks[i].n == 2 * static_cast<int>(i));
  auto third = generate_regular_subset(s, 1.0 / 3.0);
  CHECK(third.subset.picks.size() == 11);
  CHECK(third.subset.picks.back().n == 30);
  auto tiny = generate_regular_subset(s, 0.05);
  CHECK(!tiny.warnings.empty());
  const auto d = lattice_spectrum(60, true, 0.6);
  auto dr = generate_regular_subset(d, 0.5);
  const double tail_eps = dr.eps.back().second;
  CHECK(std::abs(tail_eps) < 0.05);
  CHECK_NOTHROW(dr.subset.validate_against(d));
}

TEST_CASE("multi-spectra conditions") {
  std::vector<Spectrum> spectra{lattice_spectrum(180), lattice_spectrum(180, true, 0.0), lattice_spectrum(180)};
  spectra[2].problem.right = Robin{1.0};
  std::vector<SpectralSubset> thirds;
  for (const auto& s : spectra) thirds.push_back(make_subset(s, stride(0, 180, 3)));
  MultiParams ii;
  ii.mode = MultiMode::SummabilityII;
  ii.sigmas = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(check_multi_N(thirds, spectra, ii).verdict == Verdict::Pass);

  MultiParams i;
  i.sigma = 1.0 / 3 + 0.02;
  std::vector<SpectralSubset> only_first{make_subset(spectra[0], stride(0, 180, 1)), {}, {}};
  CHECK(check_multi_N(only_first, spectra, i).verdict == Verdict::Fail);

  std::vector<SpectralSubset> none(3);
  CHECK(check_multi_N(none, spectra, ii).verdict == Verdict::Fail);
  CHECK(check_multi_N(none, spectra, i).verdict == Verdict::Fail);

  auto dup = spectra;
  dup[2].problem.right = Robin{0.0};
  CHECK_THROWS_AS(check_multi_N(thirds, dup, ii), ContractError);
}
