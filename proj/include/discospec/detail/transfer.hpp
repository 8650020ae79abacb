#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace discospec::detail {

inline constexpr int kTaylorTerms = 18;

// 1/(2k)! and 1/(2k+1)!, k = 0..17; enough for |v| <= 9 to full double precision.
inline constexpr std::array<double, kTaylorTerms> kCosCoef = [] {
  std::array<double, kTaylorTerms> c{};
  double f = 1.0;
  for (int k = 0; k < kTaylorTerms; ++k) {
    c[k] = 1.0 / f;
    f *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  return c;
}();

inline constexpr std::array<double, kTaylorTerms> kSincCoef = [] {
  std::array<double, kTaylorTerms> c{};
  double f = 1.0;
  for (int k = 0; k < kTaylorTerms; ++k) {
    c[k] = 1.0 / f;
    f *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
  }
  return c;
}();

/// With v = (qbar - lambda) d^2: c = cos(sqrt(-v)), s = sin(sqrt(-v))/sqrt(-v), as entire
/// series in v. Valid for real or complex v.
template <class T>
inline void cos_sinc(const T& v, T& c, T& s) {
  c = T(kCosCoef[kTaylorTerms - 1]);
  s = T(kSincCoef[kTaylorTerms - 1]);
  for (int k = kTaylorTerms - 2; k >= 0; --k) {
    c = c * v + kCosCoef[k];
    s = s * v + kSincCoef[k];
  }
}

/// Power of two 2^-k such that x * 2^-k lies in [0.5, 1); x must be positive and normal.
inline double renorm_scale(double x, double& k_out) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const auto biased = static_cast<std::int64_t>(bits >> 52);
  k_out = static_cast<double>(biased - 1022);
  return std::bit_cast<double>(static_cast<std::uint64_t>(2045 - biased) << 52);
}

}  // namespace discospec::detail
