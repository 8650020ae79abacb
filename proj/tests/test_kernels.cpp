#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <vector>

#include "discospec/detail/transfer.hpp"
#include "discospec/kernels.hpp"

using namespace discospec;
using namespace discospec::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Table {
  std::vector<double> width, qbar;
  PropagationInput input(double h, double a1, double a2) const {
    return {width.data(), qbar.data(), width.size(), width.size() / 2, h, a1, a2};
  }
};

Table random_table(std::mt19937_64& rng, int cells) {
  std::uniform_real_distribution<double> q(-20.0, 20.0);
  Table t;
  for (int i = 0; i < cells; ++i) {
    t.width.push_back(1.0 / cells);
    t.qbar.push_back(q(rng));
  }
  return t;
}

}  // namespace

TEST_CASE("Taylor cos/sinc agrees with the library functions") {
  for (double v = -9.0; v <= 9.0; v += 0.37) {
    double c, s;
    detail::cos_sinc(v, c, s);
    double rc, rs;
    if (v < 0) {
      const double w = std::sqrt(-v);
      rc = std::cos(w);
      rs = std::sin(w) / w;
    } else if (v > 0) {
      const double w = std::sqrt(v);
      rc = std::cosh(w);
      rs = std::sinh(w) / w;
    } else {
      rc = rs = 1.0;
    }
    CHECK(std::abs(c - rc) <= 4e-15 * std::max(1.0, std::abs(rc)));
    CHECK(std::abs(s - rs) <= 4e-15 * std::max(1.0, std::abs(rs)));
  }
  using cplx = std::complex<double>;
  for (cplx v : {cplx(-4.0, 3.0), cplx(2.0, -8.0), cplx(0.0, 9.0)}) {
    cplx c, s;
    detail::cos_sinc(v, c, s);
    const cplx w = std::sqrt(-v);
    CHECK(std::abs(c - std::cos(w)) <= 1e-14 * std::abs(std::cos(w)) + 1e-15);
    CHECK(std::abs(s - std::sin(w) / w) <= 1e-14 * std::abs(std::sin(w) / w) + 1e-15);
  }
}

TEST_CASE("renorm scale maps into [0.5, 1)") {
  for (double x : {1e-300, 3e-5, 0.5, 0.75, 1.0, 3.0, 1e300}) {
    double k;
    const double s = detail::renorm_scale(x, k);
    CHECK(x * s >= 0.5);
    CHECK(x * s < 1.0);
    CHECK(x * s == std::ldexp(x, -static_cast<int>(k)));
  }
}

TEST_CASE("substep count") {
  CHECK(substeps_for(0.0, 0.0, 1.0 / 256, 3.0) == 1);
  CHECK(substeps_for(9e6, 0.0, 1.0 / 256, 3.0) == 4);
}

TEST_CASE("propagation: scalar and AVX2 agree bit for bit") {
  if (detected_isa() != Isa::Avx2) return;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-500.0, 2e5);
  for (int trial = 0; trial < 20; ++trial) {
    const Table t = random_table(rng, 64 + trial);
    const auto in = t.input(0.3 * trial - 2.0, 0.5 + 0.1 * trial, 1.0 - 0.07 * trial);
    double l[kLanes];
    int m[kLanes];
    for (int i = 0; i < kLanes; ++i) {
      l[i] = lam(rng);
      m[i] = substeps_for(std::abs(l[i]), 20.0, 1.0 / (64 + trial), 3.0);
    }
    m[trial % kLanes] += 2;  // unequal substep counts exercise the lane mask
    LaneState a[kLanes], b[kLanes];
    propagate_lanes_scalar(in, l, m, a);
    propagate_lanes_avx2(in, l, m, b);
    for (int i = 0; i < kLanes; ++i) {
      CHECK(same_bits(a[i].y, b[i].y));
      CHECK(same_bits(a[i].dy, b[i].dy));
      CHECK(a[i].exponent == b[i].exponent);
      CHECK(a[i].zeros == b[i].zeros);
    }
  }
}

TEST_CASE("propagation: scalar lane matches the closed form") {
  // q = 0, identity jump: y = cos(k x), sign changes of y on (0,1] counted exactly.
  const Table t{std::vector<double>(256, 1.0 / 256), std::vector<double>(256, 0.0)};
  const auto in = t.input(0.0, 1.0, 0.0);
  const double k[kLanes] = {0.5, 10.3, 77.7, 200.1};
  double l[kLanes];
  int m[kLanes];
  for (int i = 0; i < kLanes; ++i) {
    l[i] = k[i] * k[i];
    m[i] = substeps_for(l[i], 0.0, 1.0 / 256, 3.0);
  }
  LaneState s[kLanes];
  propagate_lanes_scalar(in, l, m, s);
  for (int i = 0; i < kLanes; ++i) {
    const double f = std::ldexp(1.0, static_cast<int>(s[i].exponent));
    CHECK(std::abs(s[i].y * f - std::cos(k[i])) < 1e-12 * k[i]);
    CHECK(std::abs(s[i].dy * f + k[i] * std::sin(k[i])) < 1e-11 * k[i] * k[i]);
    CHECK(s[i].zeros == std::floor(k[i] / M_PI + 0.5));
  }
}

TEST_CASE("factor product: scalar and AVX2 agree bit for bit") {
  if (detected_isa() != Isa::Avx2) return;
  std::vector<double> kappa;
  for (int n = 1; n <= 1003; ++n) kappa.push_back(n * n * 9.8696044010893586 + 0.3 * (n % 3));
  for (auto [re, im] : {std::pair{5.0, 0.0}, {-40.0, 80.0}, {1e4, -3e3}}) {
    const auto a = factor_product_scalar(kappa.data(), 1000, re, im);
    const auto b = factor_product_avx2(kappa.data(), 1000, re, im);
    CHECK(same_bits(a.re, b.re));
    CHECK(same_bits(a.im, b.im));
    CHECK(a.exponent == b.exponent);
    CHECK(same_bits(a.weight, b.weight));
  }
}

TEST_CASE("factor product matches a direct complex product") {
  std::vector<double> kappa;
  for (int n = 1; n <= 203; ++n) kappa.push_back(n * 3.7 + 0.1 * n * n);
  const std::complex<double> lam(13.0, -4.0);
  std::complex<double> ref = 1.0;
  for (double k : kappa) ref *= 1.0 - lam / k;
  for (Isa isa : {Isa::Scalar, detected_isa()}) {
    force_isa(isa);
    const auto r = factor_product(kappa.data(), kappa.size(), lam.real(), lam.imag());
    const std::complex<double> v = std::complex<double>(r.re, r.im) * std::exp2(r.exponent);
    CHECK(std::abs(v - ref) <= 1e-12 * std::abs(ref));
    CHECK(r.weight > 0.0);
  }
  force_isa(detected_isa());
}
